#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "rankstab/csv.hpp"
#include "rankstab/errors.hpp"

namespace testutil {

inline std::string env_or_die(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) throw std::runtime_error(std::string("missing env var ") + name);
  return v;
}

inline std::string data_path(const std::string& file) {
  return env_or_die("RANKSTAB_DATA") + "/" + file;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline rankstab::Dataset load_fixture(const std::string& file, const std::string& id_column) {
  std::istringstream in(read_file(data_path(file)));
  rankstab::CsvTable table = rankstab::parse_csv(in);
  return rankstab::dataset_from_table(table, id_column,
                                      rankstab::detect_numeric_columns(table, id_column));
}

inline rankstab::Dataset universities() { return load_fixture("table1.csv", "university"); }
inline rankstab::Dataset csrankings() { return load_fixture("csrankings_top10.csv", "university"); }

}  // namespace testutil

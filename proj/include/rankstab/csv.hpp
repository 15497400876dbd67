#pragma once

#include <istream>
#include <string>
#include <vector>

#include "rankstab/core.hpp"

namespace rankstab {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // data rows, header excluded
};

// RFC-4180 style reader: quoted fields, doubled quotes, CRLF tolerated.
// Ragged rows are integrity errors reported with 1-based row numbers.
CsvTable parse_csv(std::istream& in);

// Columns other than the id whose every cell parses as a finite real.
std::vector<std::string> detect_numeric_columns(const CsvTable& table, const std::string& id_column);

Dataset dataset_from_table(const CsvTable& table, const std::string& id_column,
                           const std::vector<std::string>& attribute_columns);

Dataset load_dataset(std::istream& in, const std::string& id_column,
                     const std::vector<std::string>& attribute_columns);

// Wire format consumed by external ranking processes: header id,<attrs...>,
// full numeric precision, one row per tuple in dataset order.
std::string dataset_to_csv(const Dataset& d);

std::string csv_escape(const std::string& field);

}  // namespace rankstab

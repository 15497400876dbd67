#include "rankstab/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace rankstab {

namespace {

// One record, honoring quotes; returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t row_no) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;

  std::string field;
  bool quoted = false;
  bool any = false;
  while (true) {
    if (quoted) {
      if (c == EOF) fail(errc::parse, "csv: unterminated quote in row " + std::to_string(row_no));
      if (c == '"') {
        int next = in.get();
        if (next == '"') {
          field += '"';
        } else {
          quoted = false;
          c = next;
          continue;
        }
      } else {
        field += static_cast<char>(c);
      }
    } else {
      if (c == EOF || c == '\n') {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        fields.push_back(field);
        return true;
      }
      if (c == ',') {
        fields.push_back(field);
        field.clear();
        any = true;
      } else if (c == '"' && field.empty()) {
        quoted = true;
      } else {
        field += static_cast<char>(c);
      }
    }
    c = in.get();
  }
  (void)any;
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) return false;
  out = v;
  return true;
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::string> fields;
  std::size_t row_no = 1;
  if (!read_record(in, fields, row_no)) fail(errc::parse, "csv: empty input");
  table.header = fields;
  while (read_record(in, fields, ++row_no)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
    if (fields.size() != table.header.size()) {
      fail(errc::integrity, "csv: row " + std::to_string(row_no) + " has " +
                                std::to_string(fields.size()) + " fields, header has " +
                                std::to_string(table.header.size()));
    }
    table.rows.push_back(fields);
  }
  return table;
}

std::vector<std::string> detect_numeric_columns(const CsvTable& table, const std::string& id_column) {
  std::vector<std::string> out;
  for (std::size_t col = 0; col < table.header.size(); ++col) {
    if (table.header[col] == id_column) continue;
    bool numeric = true;
    double v;
    for (const auto& row : table.rows) {
      if (!parse_real(row[col], v)) {
        numeric = false;
        break;
      }
    }
    if (numeric) out.push_back(table.header[col]);
  }
  return out;
}

Dataset dataset_from_table(const CsvTable& table, const std::string& id_column,
                           const std::vector<std::string>& attribute_columns) {
  if (attribute_columns.empty()) fail(errc::schema, "load_dataset: no attribute columns selected");

  auto column_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (table.header[i] == name) return static_cast<int>(i);
    }
    fail(errc::schema, "load_dataset: column '" + name + "' not found in header");
  };

  int id_col = column_index(id_column);
  std::vector<int> attr_cols;
  attr_cols.reserve(attribute_columns.size());
  for (const auto& name : attribute_columns) {
    if (name == id_column) fail(errc::schema, "load_dataset: id column listed as attribute");
    attr_cols.push_back(column_index(name));
  }

  AttributeSchema schema{attribute_columns};
  std::vector<DataTuple> tuples;
  tuples.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    DataTuple t;
    t.id = row[static_cast<std::size_t>(id_col)];
    t.values = Vector(static_cast<Eigen::Index>(attr_cols.size()));
    for (std::size_t a = 0; a < attr_cols.size(); ++a) {
      const std::string& cell = row[static_cast<std::size_t>(attr_cols[a])];
      double v;
      if (!parse_real(cell, v)) {
        fail(errc::parse, "load_dataset: row " + std::to_string(r + 2) + ", column '" +
                              attribute_columns[a] + "': cannot parse '" + cell + "' as a real");
      }
      t.values[static_cast<Eigen::Index>(a)] = v;
    }
    tuples.push_back(std::move(t));
  }
  return Dataset(std::move(schema), std::move(tuples));
}

Dataset load_dataset(std::istream& in, const std::string& id_column,
                     const std::vector<std::string>& attribute_columns) {
  return dataset_from_table(parse_csv(in), id_column, attribute_columns);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += '"';
  return out;
}

std::string dataset_to_csv(const Dataset& d) {
  std::string out = "id";
  for (const auto& name : d.schema().names) {
    out += ',';
    out += csv_escape(name);
  }
  out += '\n';
  char buf[64];
  for (const auto& t : d.tuples()) {
    out += csv_escape(t.id);
    for (Eigen::Index i = 0; i < t.values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", t.values[i]);
      out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace rankstab

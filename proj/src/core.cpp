#include "rankstab/core.hpp"

#include <cmath>
#include <unordered_set>

namespace rankstab {

void AttributeSchema::validate() const {
  if (names.empty()) fail(errc::schema, "schema: at least one attribute is required");
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) fail(errc::schema, "schema: empty attribute name");
    if (!seen.insert(n).second) fail(errc::schema, "schema: duplicate attribute name '" + n + "'");
  }
}

int AttributeSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Dataset::Dataset(AttributeSchema schema, std::vector<DataTuple> tuples)
    : schema_(std::move(schema)), tuples_(std::move(tuples)) {
  schema_.validate();
  index_.reserve(tuples_.size());
  for (std::size_t row = 0; row < tuples_.size(); ++row) {
    const DataTuple& t = tuples_[row];
    if (t.id.empty()) {
      fail(errc::integrity, "dataset: empty tuple id at row " + std::to_string(row + 1));
    }
    if (t.values.size() != schema_.count()) {
      fail(errc::integrity, "dataset: tuple '" + t.id + "' has " +
                                std::to_string(t.values.size()) + " values, schema has " +
                                std::to_string(schema_.count()));
    }
    for (Eigen::Index i = 0; i < t.values.size(); ++i) {
      if (!std::isfinite(t.values[i])) {
        fail(errc::integrity, "dataset: non-finite value in tuple '" + t.id + "', attribute '" +
                                  schema_.names[static_cast<std::size_t>(i)] + "'");
      }
    }
    if (!index_.emplace(t.id, static_cast<int>(row)).second) {
      fail(errc::integrity, "dataset: duplicate tuple id '" + t.id + "'");
    }
  }
}

int Dataset::index_of(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

const DataTuple& Dataset::require(const std::string& id) const {
  int row = index_of(id);
  if (row < 0) fail(errc::lookup, "dataset: unknown tuple id '" + id + "'");
  return tuples_[static_cast<std::size_t>(row)];
}

Dataset Dataset::with_replaced(const DataTuple& t) const {
  int row = index_of(t.id);
  if (row < 0) fail(errc::lookup, "with_replaced: unknown tuple id '" + t.id + "'");
  std::vector<DataTuple> copy = tuples_;
  copy[static_cast<std::size_t>(row)] = t;
  return Dataset(schema_, std::move(copy));
}

DataTuple apply_refinement(const DataTuple& t, const Vector& eps) {
  check_same_size(t.values.size(), eps.size(), "apply_refinement");
  for (Eigen::Index i = 0; i < eps.size(); ++i) {
    if (!std::isfinite(eps[i])) fail(errc::domain, "apply_refinement: non-finite delta");
  }
  return DataTuple{t.id, t.values + eps};
}

}  // namespace rankstab

#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "rankstab/geometry.hpp"

namespace rankstab {

struct AttributeSchema {
  std::vector<std::string> names;

  int count() const { return static_cast<int>(names.size()); }
  void validate() const;
  int index_of(const std::string& name) const;  // -1 when absent
};

struct DataTuple {
  std::string id;
  Vector values;
};

// Immutable collection of tuples sharing one schema. Ids are unique and
// values finite; both are enforced at construction.
class Dataset {
 public:
  Dataset(AttributeSchema schema, std::vector<DataTuple> tuples);

  const AttributeSchema& schema() const { return schema_; }
  int attr_count() const { return schema_.count(); }
  int size() const { return static_cast<int>(tuples_.size()); }
  const std::vector<DataTuple>& tuples() const { return tuples_; }
  const DataTuple& at(int row) const { return tuples_.at(static_cast<std::size_t>(row)); }

  int index_of(const std::string& id) const;        // -1 when absent
  const DataTuple& require(const std::string& id) const;  // lookup error when absent

  // Copy with one row's values replaced; the id must already be present.
  Dataset with_replaced(const DataTuple& t) const;

 private:
  AttributeSchema schema_;
  std::vector<DataTuple> tuples_;
  std::unordered_map<std::string, int> index_;
};

// t shifted by a signed per-attribute delta. Identity is preserved.
DataTuple apply_refinement(const DataTuple& t, const Vector& eps);

}  // namespace rankstab

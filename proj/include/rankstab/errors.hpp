#pragma once

#include <stdexcept>
#include <string>

namespace rankstab {

// Error taxonomy. The CLI maps these onto exit codes: config/usage -> 1,
// data problems -> 2, external ranking process failures -> 3.
enum class errc {
  schema,       // bad column sets, duplicate attribute names, flag conflicts
  parse,        // malformed CSV / JSON cell content
  integrity,    // duplicate ids, ragged rows, non-finite values
  dimension,    // vector length mismatch
  domain,       // value outside a scoring function's domain
  lookup,       // unknown tuple id or attribute name
  ranking,      // external ranking process failed or emitted a non-permutation
  unsupported,  // operation not defined for this ranking function kind
  size,         // request exceeds a documented size guard
  config,       // invalid engine or CLI configuration
};

class error : public std::runtime_error {
 public:
  error(errc kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  errc kind() const noexcept { return kind_; }

 private:
  errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& msg) { throw error(kind, msg); }

}  // namespace rankstab

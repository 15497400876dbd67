#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "rankstab/core.hpp"
#include "rankstab/geometry.hpp"

namespace rankstab {

// Dense-region benchmark generator. Regions get scores descending by
// `margin`; each tuple is drawn around (score / dims) per attribute with
// isotropic Gaussian noise, so ranking by attribute sum groups regions into
// contiguous blocks when the noise is small against the margin.
struct SyntheticParams {
  int n_tuples = 100;
  int dims = 2;
  double margin = 10.0;
  int region_min = 2;
  int region_max = 6;
  double noise_sigma = -1.0;  // < 0 means margin / 20
  std::uint64_t seed = 0;

  double sigma() const { return noise_sigma < 0.0 ? margin / 20.0 : noise_sigma; }
  void validate() const;
};

struct TupleTruth {
  int region = 0;
  int k = 0;  // positions the tuple can move inside its region:
              // max(rank offset from region top, offset from region bottom)
};

struct SyntheticResult {
  Dataset data;
  std::map<std::string, TupleTruth> truth;  // ordered for stable serialization
  ReasonableChanges default_rc;             // margin / dims per attribute
};

SyntheticResult generate_dense_dataset(const SyntheticParams& params);

}  // namespace rankstab

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "rankstab/engine.hpp"

namespace rankstab {

// Exhaustive reference estimate on a signed grid: classifies every grid
// refinement exactly, builds the exact grid skyline of unstable magnitudes,
// and returns the fraction of grid points whose magnitude stays in the
// stable zone. Guarded to <= 3 attributes and <= 1e7 grid points.
double grid_stability(const RankingFunctionSpec& spec, const Dataset& d,
                      const std::string& tuple_id, int k, const ReasonableChanges& rc,
                      int grid_per_dim, bool fast_rerank = false);

// Independent estimate of P[refinement k-unstable | magnitude in the stable
// zone of sb], by rejection sampling from RC. Empty when sampling exhausts.
std::optional<double> audit_boundary(const RankingFunctionSpec& spec, const Dataset& d,
                                     const std::string& tuple_id, int k,
                                     const ReasonableChanges& rc, const Boundary& sb, long samples,
                                     std::mt19937_64& rng, int rejection_max_tries = 1000);

// Fraction of uniformly drawn two-attribute linear weightings (angle uniform
// in [0, pi/2], weights (cos, sin)) reproducing the reference ranking taken
// at weights (1, 1). Dimension error unless the dataset has two attributes.
double global_stability_2d(const Dataset& d, long samples, std::mt19937_64& rng);

// Checks a declared tuple-independence flag on random single-tuple
// refinements: the relative order of the other tuples must never change.
bool audit_tuple_independence(const RankingFunctionSpec& spec, const Dataset& d, int samples,
                              const ReasonableChanges& rc, std::mt19937_64& rng);

}  // namespace rankstab

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rankstab/engine.hpp"

namespace rankstab {

// estimates[k] approximates the k-stable zone volume fraction for
// k = 0..k_star, where k_star is the largest observed position change.
// The sequence is non-decreasing and ends at exactly 1.
struct StabilityCurve {
  int k_star = 0;
  std::vector<double> estimates;
};

struct JenksSplit {
  std::size_t small_count = 0;       // sorted values below the break
  std::vector<double> small;         // ascending
  std::vector<double> large;         // ascending; empty when all values tie
};

// Two-class Fisher-Jenks on one-dimensional data: the contiguous split of
// the sorted values minimizing the summed within-class squared deviation.
// The class with the greater mean is "large". All-equal input cannot split.
JenksSplit jenks_two_class(const std::vector<double>& values);

struct DenseRegionReport {
  int k = 0;  // recommended stability window
  StabilityCurve curve;
  std::vector<double> differences;  // d_0 = estimates[0], d_k = estimates[k] - estimates[k-1]
  JenksSplit clusters;
  std::uint64_t seed = 0;
};

// Builds the curve from one pool of N uniform refinement draws. A sample
// with position change <= k stays in the unstable pool at level k only while
// it contains some sample still moving more than k positions.
StabilityCurve stability_curve(const RankingFunctionSpec& spec, const Dataset& d,
                               const std::string& tuple_id, const ReasonableChanges& rc, long n,
                               std::mt19937_64& rng);

// Recommends the smallest k whose stability gain d_k falls in the large
// Jenks class; 0 when the gains cannot be split.
DenseRegionReport detect_dense_region(const RankingFunctionSpec& spec, const Dataset& d,
                                      const std::string& tuple_id, const ReasonableChanges& rc,
                                      long n, std::uint64_t seed);

}  // namespace rankstab

#include "rankstab/dense_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rankstab/rng.hpp"

namespace rankstab {

StabilityCurve stability_curve(const RankingFunctionSpec& spec, const Dataset& d,
                               const std::string& tuple_id, const ReasonableChanges& rc, long n,
                               std::mt19937_64& rng) {
  if (n < 1) fail(errc::config, "stability_curve: sample count must be positive");
  check_same_size(rc.dim(), d.attr_count(), "stability_curve");
  RankEvaluator ev(spec, d, tuple_id);

  std::vector<Vector> mags;
  std::vector<int> moves;
  mags.reserve(static_cast<std::size_t>(n));
  moves.reserve(static_cast<std::size_t>(n));
  int k_star = 0;
  for (long s = 0; s < n; ++s) {
    Vector eps = sample_uniform_rc(rc, rng);
    int delta = ev.position_change(eps);
    k_star = std::max(k_star, delta);
    mags.push_back(eps.abs());
    moves.push_back(delta);
  }

  StabilityCurve curve;
  curve.k_star = k_star;
  curve.estimates.assign(static_cast<std::size_t>(k_star) + 1, 1.0);

  // Sweep k upward, dropping pool entries that moved at most k positions and
  // no longer contain any entry still moving more than k. What survives is
  // exactly the sample estimate of the k-unstable volume.
  std::vector<bool> in_pool(mags.size(), true);
  long pool = n;
  for (int k = 0; k < k_star; ++k) {
    Boundary over_k;
    for (std::size_t i = 0; i < mags.size(); ++i) {
      if (moves[i] > k) over_k.insert(mags[i]);
    }
    for (std::size_t i = 0; i < mags.size(); ++i) {
      if (!in_pool[i] || moves[i] > k) continue;
      if (!over_k.excludes(mags[i])) {
        in_pool[i] = false;
        --pool;
      }
    }
    curve.estimates[static_cast<std::size_t>(k)] =
        1.0 - static_cast<double>(pool) / static_cast<double>(n);
  }
  return curve;
}

JenksSplit jenks_two_class(const std::vector<double>& values) {
  JenksSplit split;
  if (values.empty()) return split;

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    // no variance to explain; convention: everything is small
    split.small = sorted;
    split.small_count = sorted.size();
    return split;
  }

  std::size_t m = sorted.size();
  std::vector<double> pre(m + 1, 0.0), pre2(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    pre[i + 1] = pre[i] + sorted[i];
    pre2[i + 1] = pre2[i] + sorted[i] * sorted[i];
  }
  auto ssd = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
    double cnt = static_cast<double>(hi - lo);
    double sum = pre[hi] - pre[lo];
    return (pre2[hi] - pre2[lo]) - sum * sum / cnt;
  };

  std::size_t best = 1;
  double best_ssd = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < m; ++j) {
    double v = ssd(0, j) + ssd(j, m);
    if (v < best_ssd) {
      best_ssd = v;
      best = j;
    }
  }

  split.small_count = best;
  split.small.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(best));
  split.large.assign(sorted.begin() + static_cast<std::ptrdiff_t>(best), sorted.end());
  return split;
}

DenseRegionReport detect_dense_region(const RankingFunctionSpec& spec, const Dataset& d,
                                      const std::string& tuple_id, const ReasonableChanges& rc,
                                      long n, std::uint64_t seed) {
  DenseRegionReport rep;
  rep.seed = seed;
  auto rng = substream(seed, streams::dense);
  rep.curve = stability_curve(spec, d, tuple_id, rc, n, rng);

  const auto& est = rep.curve.estimates;
  rep.differences.resize(est.size());
  rep.differences[0] = est[0];
  for (std::size_t i = 1; i < est.size(); ++i) rep.differences[i] = est[i] - est[i - 1];

  rep.clusters = jenks_two_class(rep.differences);
  rep.k = 0;
  if (!rep.clusters.large.empty()) {
    // membership via the sorted split: ties across the break count as large
    double threshold = rep.clusters.large.front();
    for (std::size_t i = 0; i < rep.differences.size(); ++i) {
      if (rep.differences[i] >= threshold) {
        rep.k = static_cast<int>(i);
        break;
      }
    }
  }
  return rep;
}

}  // namespace rankstab

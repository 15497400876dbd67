#include "rankstab/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "rankstab/rng.hpp"

namespace rankstab {

double grid_stability(const RankingFunctionSpec& spec, const Dataset& d,
                      const std::string& tuple_id, int k, const ReasonableChanges& rc,
                      int grid_per_dim, bool fast_rerank) {
  if (k < 0) fail(errc::config, "grid_stability: k must be non-negative");
  if (grid_per_dim < 2) fail(errc::config, "grid_stability: need at least two grid points per dim");
  check_same_size(rc.dim(), d.attr_count(), "grid_stability");
  Eigen::Index dims = rc.dim();
  if (dims > 3) fail(errc::size, "grid_stability: guarded to at most 3 attributes");
  double cells = std::pow(static_cast<double>(grid_per_dim), static_cast<double>(dims));
  if (cells > 1e7) fail(errc::size, "grid_stability: grid exceeds 1e7 points");

  RankEvaluator ev(spec, d, tuple_id);

  // signed grid covering the box edge to edge, including both endpoints
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(dims));
  for (Eigen::Index i = 0; i < dims; ++i) {
    auto& axis = axes[static_cast<std::size_t>(i)];
    axis.resize(static_cast<std::size_t>(grid_per_dim));
    double w = rc.eps_max[i];
    for (int j = 0; j < grid_per_dim; ++j) {
      axis[static_cast<std::size_t>(j)] = -w + 2.0 * w * j / (grid_per_dim - 1);
    }
  }

  long total = 1;
  for (Eigen::Index i = 0; i < dims; ++i) total *= grid_per_dim;

  auto at = [&](long idx, Vector& eps) {
    long rest = idx;
    for (Eigen::Index i = 0; i < dims; ++i) {
      eps[i] = axes[static_cast<std::size_t>(i)][static_cast<std::size_t>(rest % grid_per_dim)];
      rest /= grid_per_dim;
    }
  };

  // first pass: exact grid skyline of unstable magnitudes
  Boundary sb;
  Vector eps(dims);
  for (long idx = 0; idx < total; ++idx) {
    at(idx, eps);
    if (!ev.k_stable(eps, k, fast_rerank)) sb.insert(eps.abs());
  }

  // second pass: fraction of grid magnitudes in the stable zone
  long stable_cells = 0;
  for (long idx = 0; idx < total; ++idx) {
    at(idx, eps);
    if (sb.empty() || !sb.excludes(eps.abs())) ++stable_cells;
  }
  return static_cast<double>(stable_cells) / static_cast<double>(total);
}

std::optional<double> audit_boundary(const RankingFunctionSpec& spec, const Dataset& d,
                                     const std::string& tuple_id, int k,
                                     const ReasonableChanges& rc, const Boundary& sb, long samples,
                                     std::mt19937_64& rng, int rejection_max_tries) {
  if (samples < 1) fail(errc::config, "audit_boundary: sample count must be positive");
  RankEvaluator ev(spec, d, tuple_id);
  long unstable = 0;
  for (long s = 0; s < samples; ++s) {
    auto eps = rejection_sample_stable_zone(rc, sb, rng, rejection_max_tries);
    if (!eps) return std::nullopt;
    if (!ev.k_stable_exact(*eps, k)) ++unstable;
  }
  return static_cast<double>(unstable) / static_cast<double>(samples);
}

double global_stability_2d(const Dataset& d, long samples, std::mt19937_64& rng) {
  if (d.attr_count() != 2) {
    fail(errc::dimension, "global_stability_2d: dataset must have exactly two attributes");
  }
  if (samples < 1) fail(errc::config, "global_stability_2d: sample count must be positive");

  auto order_under = [&](double a, double b) {
    std::vector<std::pair<double, const std::string*>> keys;
    keys.reserve(static_cast<std::size_t>(d.size()));
    for (const auto& t : d.tuples()) {
      keys.emplace_back(a * t.values[0] + b * t.values[1], &t.id);
    }
    std::sort(keys.begin(), keys.end(), [](const auto& x, const auto& y) {
      return rank_key_before(x.first, *x.second, y.first, *y.second);
    });
    std::vector<const std::string*> order;
    order.reserve(keys.size());
    for (const auto& kv : keys) order.push_back(kv.second);
    return order;
  };

  auto reference = order_under(1.0, 1.0);
  long same = 0;
  constexpr double half_pi = 1.5707963267948966;
  for (long s = 0; s < samples; ++s) {
    double theta = uniform01(rng) * half_pi;
    auto order = order_under(std::cos(theta), std::sin(theta));
    if (order == reference) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(samples);
}

bool audit_tuple_independence(const RankingFunctionSpec& spec, const Dataset& d, int samples,
                              const ReasonableChanges& rc, std::mt19937_64& rng) {
  check_same_size(rc.dim(), d.attr_count(), "audit_tuple_independence");
  if (d.size() < 3) return true;
  for (int s = 0; s < samples; ++s) {
    int row = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(d.size())));
    const DataTuple& t = d.at(row);
    Vector eps = sample_uniform_rc(rc, rng);
    Ranking after = rank_dataset(spec, d.with_replaced(apply_refinement(t, eps)));
    Ranking before = rank_dataset(spec, d);
    // the other tuples must keep their relative order
    std::vector<int> base_rank;
    for (const auto& id : before.order) {
      if (id != t.id) base_rank.push_back(after.position_of(id));
    }
    if (!std::is_sorted(base_rank.begin(), base_rank.end())) return false;
  }
  return true;
}

}  // namespace rankstab

#include "rankstab/engine.hpp"

#include <algorithm>
#include <cmath>

#include "rankstab/rng.hpp"

namespace rankstab {

namespace {

constexpr int kReduceGridSteps = 1024;

struct ConstructStats {
  long proposals = 0;
  long accepted = 0;
  bool exhausted = false;
};

// Draw one point from RC cap the stable zone of sb, or give up.
std::optional<Vector> draw_in_zone(const ReasonableChanges& rc, const Boundary& sb,
                                   std::mt19937_64& rng, int max_tries, ConstructStats& stats) {
  for (int t = 0; t < max_tries; ++t) {
    Vector eps(rc.dim());
    for (Eigen::Index i = 0; i < rc.dim(); ++i) eps[i] = uniform_sym(rng, rc.eps_max[i]);
    ++stats.proposals;
    if (sb.empty() || !sb.excludes(eps.abs())) {
      ++stats.accepted;
      return eps;
    }
  }
  stats.exhausted = true;
  return std::nullopt;
}

// One boundary growth step over a prebuilt evaluator. Counterexamples are
// merged before sampling so draws come from the zone they carve out; the
// batch is classified against a fixed zone and folded in afterwards.
void construct_step(const RankEvaluator& ev, int k, const ReasonableChanges& rc, Boundary& sb,
                    const std::vector<Vector>& counterexamples, long n_samples,
                    std::mt19937_64& rng, bool fast_rerank, int max_tries, ConstructStats& stats,
                    std::vector<Vector>* kept_magnitudes) {
  for (const auto& c : counterexamples) sb.insert(c);

  std::vector<Vector> unstable;
  for (long s = 0; s < n_samples; ++s) {
    auto eps = draw_in_zone(rc, sb, rng, max_tries, stats);
    if (!eps) return;
    Vector mag = eps->abs();
    if (!ev.k_stable(*eps, k, fast_rerank)) unstable.push_back(mag);
    if (kept_magnitudes) kept_magnitudes->push_back(std::move(mag));
  }
  for (const auto& m : unstable) sb.insert(m);
}

VerificationResult verify_step(const RankEvaluator& ev, int k, const ReasonableChanges& rc,
                               const Boundary& sb, double eta, double delta, std::mt19937_64& rng,
                               bool fast_rerank, int max_tries) {
  VerificationResult out;
  long n = hoeffding_sample_count(eta, delta);
  ConstructStats stats;
  long unstable = 0;
  for (long s = 0; s < n; ++s) {
    auto eps = draw_in_zone(rc, sb, rng, max_tries, stats);
    if (!eps) {
      out.feasible = false;
      out.samples = s;
      return out;
    }
    ++out.samples;
    if (!ev.k_stable(*eps, k, fast_rerank)) {
      ++unstable;
      out.counterexamples.push_back(eps->abs());
    }
  }
  out.feasible = true;
  out.p_hat = static_cast<double>(unstable) / static_cast<double>(n);
  out.alpha = out.p_hat + eta;
  return out;
}

RcReduction reduce_rc_impl(const RankEvaluator& ev, int k, const ReasonableChanges& rc,
                           long budget, std::mt19937_64& rng, bool fast_rerank, bool monotone) {
  RcReduction out{rc, {}};
  Eigen::Index dims = rc.dim();
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < dims; ++i) {
    if (rc.eps_max[i] > 0.0) active.push_back(i);
  }
  if (active.empty()) return out;

  auto unstable_at = [&](Eigen::Index dim, double magnitude) {
    Vector eps = Vector::Zero(dims);
    eps[dim] = magnitude;
    if (!ev.k_stable(eps, k, fast_rerank)) return true;
    eps[dim] = -magnitude;
    return !ev.k_stable(eps, k, fast_rerank);
  };

  for (Eigen::Index dim : active) {
    double width = rc.eps_max[dim];
    double cut = width;
    bool found = false;

    if (monotone) {
      // Single-attribute instability is monotone in the magnitude, so the
      // first unstable grid point brackets the true threshold from above.
      double step = width / kReduceGridSteps;
      if (unstable_at(dim, width)) {
        int lo = 0, hi = kReduceGridSteps;  // grid[lo] stable, grid[hi] unstable
        while (hi - lo > 1) {
          int mid = (lo + hi) / 2;
          if (unstable_at(dim, step * mid)) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        cut = step * hi;
        found = true;
      }
    } else {
      long probes = std::max<long>(1, budget / static_cast<long>(active.size()));
      for (long p = 0; p < probes; ++p) {
        double m = uniform01(rng) * width;
        if (m < cut && m > 0.0 && unstable_at(dim, m)) {
          cut = m;
          found = true;
        }
      }
    }

    if (found) {
      out.rc.eps_max[dim] = cut;
      Vector witness = Vector::Zero(dims);
      witness[dim] = cut;
      out.witnesses.push_back(std::move(witness));
    }
  }
  return out;
}

}  // namespace

void EngineConfig::validate(int attr_count) const {
  if (k < 0) fail(errc::config, "engine: k must be non-negative");
  if (rc.dim() != attr_count) {
    fail(errc::dimension, "engine: rc has " + std::to_string(rc.dim()) + " widths for " +
                              std::to_string(attr_count) + " attributes");
  }
  auto in_unit = [](double x) { return x > 0.0 && x < 1.0; };
  if (!in_unit(eta)) fail(errc::config, "engine: eta must lie in (0, 1)");
  if (!in_unit(delta)) fail(errc::config, "engine: delta must lie in (0, 1)");
  if (!(alpha_target > 0.0 && alpha_target <= 1.0)) {
    fail(errc::config, "engine: alpha_target must lie in (0, 1]");
  }
  if (!(tau_v >= 0.0 && tau_v < 1.0)) fail(errc::config, "engine: tau_v must lie in [0, 1)");
  if (per_iteration_samples < 1) fail(errc::config, "engine: per-iteration samples must be positive");
  if (max_iterations < 1) fail(errc::config, "engine: max_iterations must be positive");
  if (volume_samples < 1) fail(errc::config, "engine: volume_samples must be positive");
  if (rejection_max_tries < 1) fail(errc::config, "engine: rejection_max_tries must be positive");
  if (budget_mode == BudgetMode::apportioned && construction_samples_per_iteration() < 1) {
    fail(errc::config, "engine: apportioned budget leaves no construction samples");
  }
}

long EngineConfig::construction_samples_per_iteration() const {
  if (budget_mode == BudgetMode::per_iteration) return per_iteration_samples;
  long v = hoeffding_sample_count(eta, delta);
  return (total_samples + v) / max_iterations - v;
}

long hoeffding_sample_count(double eta, double delta) {
  if (!(eta > 0.0 && eta < 1.0)) fail(errc::domain, "hoeffding_sample_count: eta outside (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) {
    fail(errc::domain, "hoeffding_sample_count: delta outside (0, 1)");
  }
  return static_cast<long>(std::ceil(std::log(1.0 / delta) / (2.0 * eta * eta)));
}

Vector sample_uniform_rc(const ReasonableChanges& rc, std::mt19937_64& rng) {
  Vector eps(rc.dim());
  for (Eigen::Index i = 0; i < rc.dim(); ++i) eps[i] = uniform_sym(rng, rc.eps_max[i]);
  return eps;
}

std::optional<Vector> rejection_sample_stable_zone(const ReasonableChanges& rc, const Boundary& sb,
                                                   std::mt19937_64& rng, int max_tries) {
  ConstructStats stats;
  return draw_in_zone(rc, sb, rng, max_tries, stats);
}

double estimate_stability(const ReasonableChanges& rc, const Boundary& sb, long samples,
                          std::mt19937_64& rng) {
  if (samples < 1) fail(errc::config, "estimate_stability: sample count must be positive");
  long inside = 0;
  for (long s = 0; s < samples; ++s) {
    Vector eps = sample_uniform_rc(rc, rng);
    if (sb.empty() || !sb.excludes(eps.abs())) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(samples);
}

Boundary construct_boundary(const RankingFunctionSpec& spec, const Dataset& d,
                            const std::string& tuple_id, int k, const ReasonableChanges& rc,
                            const Boundary& prior, const std::vector<Vector>& counterexamples,
                            long n_samples, std::mt19937_64& rng, bool fast_rerank,
                            int rejection_max_tries) {
  if (k < 0) fail(errc::config, "construct_boundary: k must be non-negative");
  check_same_size(rc.dim(), d.attr_count(), "construct_boundary");
  RankEvaluator ev(spec, d, tuple_id);
  Boundary sb = prior;
  ConstructStats stats;
  construct_step(ev, k, rc, sb, counterexamples, n_samples, rng, fast_rerank, rejection_max_tries,
                 stats, nullptr);
  return sb;
}

VerificationResult verify_boundary(const RankingFunctionSpec& spec, const Dataset& d,
                                   const std::string& tuple_id, int k,
                                   const ReasonableChanges& rc, const Boundary& sb, double eta,
                                   double delta, std::mt19937_64& rng, bool fast_rerank,
                                   int rejection_max_tries) {
  RankEvaluator ev(spec, d, tuple_id);
  return verify_step(ev, k, rc, sb, eta, delta, rng, fast_rerank, rejection_max_tries);
}

RcReduction reduce_rc(const RankingFunctionSpec& spec, const Dataset& d,
                      const std::string& tuple_id, int k, const ReasonableChanges& rc, long budget,
                      std::mt19937_64& rng, bool fast_rerank) {
  RankEvaluator ev(spec, d, tuple_id);
  return reduce_rc_impl(ev, k, rc, budget, rng, fast_rerank, spec.monotone);
}

StabilityReport local_stability(const RankingFunctionSpec& spec, const Dataset& d,
                                const std::string& tuple_id, const EngineConfig& config) {
  config.validate(d.attr_count());
  RankEvaluator ev(spec, d, tuple_id);

  StabilityReport rep;
  rep.tuple = tuple_id;
  rep.k = config.k;
  rep.eta = config.eta;
  rep.delta = config.delta;
  rep.config = config;

  // Single-attribute probes shrink the sampling box without touching the
  // stable zone; their witnesses seed the boundary so the verified region
  // and the reported boundary always describe the same zone.
  RcReduction red{config.rc, {}};
  if (config.rc_reduction) {
    auto rng = substream(config.seed, streams::reduce);
    long budget = std::min<long>(2000, config.construction_samples_per_iteration());
    red = reduce_rc_impl(ev, config.k, config.rc, budget, rng, config.fast_rerank, spec.monotone);
  }
  rep.rc_effective = red.rc.eps_max;
  rep.scale_factor = box_volume(red.rc) / box_volume(config.rc);

  Boundary sb;
  std::vector<Vector> pending = red.witnesses;

  long per_iter = config.construction_samples_per_iteration();
  double volume_track = 1.0;
  bool volume_seeded = false;

  for (int it = 0; it < config.max_iterations; ++it) {
    ++rep.iterations_used;
    auto rng = substream(config.seed, streams::construct, static_cast<std::uint64_t>(it));
    ConstructStats stats;
    std::vector<Vector> kept;
    kept.reserve(static_cast<std::size_t>(per_iter));
    construct_step(ev, config.k, red.rc, sb, pending, per_iter, rng, config.fast_rerank,
                   config.rejection_max_tries, stats, &kept);
    pending.clear();
    rep.construction_samples += stats.accepted;

    if (stats.exhausted) {
      // acceptance below 1/max_tries: the zone volume is effectively zero
      rep.verification_skipped = true;
      break;
    }

    long survivors = 0;
    for (const auto& m : kept) {
      if (!sb.excludes(m)) ++survivors;
    }
    double surviving = static_cast<double>(survivors) / static_cast<double>(kept.size());
    if (!volume_seeded) {
      // with a seeded boundary the first acceptance rate measures the
      // starting zone fraction; 1.0 when nothing was excluded yet
      volume_track = static_cast<double>(stats.accepted) / static_cast<double>(stats.proposals);
      volume_seeded = true;
    }
    volume_track *= surviving;

    if (volume_track < config.tau_v) {
      rep.verification_skipped = true;
      break;
    }

    auto vrng = substream(config.seed, streams::verify, static_cast<std::uint64_t>(it));
    VerificationResult vr = verify_step(ev, config.k, red.rc, sb, config.eta, config.delta, vrng,
                                        config.fast_rerank, config.rejection_max_tries);
    if (!vr.feasible) {
      rep.verification_skipped = true;
      break;
    }
    rep.verification_samples += vr.samples;
    rep.alpha = vr.alpha;
    if (vr.alpha <= config.alpha_target) {
      for (const auto& c : vr.counterexamples) sb.insert(c);
      rep.converged = true;
      break;
    }
    pending = std::move(vr.counterexamples);
  }

  // counterexamples from a final, non-converged verification still shrink
  // the zone; absorbing them keeps every reported counterexample excluded
  for (const auto& c : pending) sb.insert(c);

  auto vol_rng = substream(config.seed, streams::volume);
  double zone_fraction = estimate_stability(red.rc, sb, config.volume_samples, vol_rng);
  rep.estimate = zone_fraction * rep.scale_factor;
  rep.boundary = std::move(sb);
  return rep;
}

}  // namespace rankstab

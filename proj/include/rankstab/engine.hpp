#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rankstab/geometry.hpp"
#include "rankstab/ranking.hpp"

namespace rankstab {

// Construction sampling budget. PerIteration spends `per_iteration_samples`
// each round; Apportioned divides a total budget so that construction plus
// one verification per round fit into `total_samples` draws overall.
enum class BudgetMode { per_iteration, apportioned };

struct EngineConfig {
  int k = 0;
  ReasonableChanges rc;

  int per_iteration_samples = 20000;
  int max_iterations = 20;
  double eta = 0.01;          // additive slack on the verified unstable rate
  double delta = 0.05;        // probability the guarantee fails
  double alpha_target = 0.05; // accept the boundary once alpha <= this
  double tau_v = 0.05;        // stop refining when the zone volume drops below this
  long volume_samples = 100000;
  int rejection_max_tries = 1000;
  std::uint64_t seed = 0;
  bool rc_reduction = true;
  bool fast_rerank = true;
  BudgetMode budget_mode = BudgetMode::per_iteration;
  long total_samples = 750455;  // apportioned mode only

  void validate(int attr_count) const;

  // Construction draws per iteration under the configured mode.
  long construction_samples_per_iteration() const;
};

struct StabilityReport {
  std::string tuple;
  int k = 0;
  double estimate = 0.0;      // stable-zone volume fraction of the full RC box
  double alpha = 1.0;         // verified bound on P[unstable | stable zone]
  double eta = 0.0;
  double delta = 0.0;
  bool converged = false;
  bool verification_skipped = false;
  int iterations_used = 0;
  long construction_samples = 0;
  long verification_samples = 0;
  double scale_factor = 1.0;  // vol(reduced RC) / vol(RC)
  Vector rc_effective;
  Boundary boundary;
  EngineConfig config;
};

// ceil(ln(1/delta) / (2 eta^2)); domain error unless both lie in (0, 1).
long hoeffding_sample_count(double eta, double delta);

// One uniform draw from the signed RC box.
Vector sample_uniform_rc(const ReasonableChanges& rc, std::mt19937_64& rng);

// Uniform draw from RC intersected with the stable zone, by rejection.
// Empty when max_tries proposals were all excluded.
std::optional<Vector> rejection_sample_stable_zone(const ReasonableChanges& rc, const Boundary& sb,
                                                   std::mt19937_64& rng, int max_tries);

// Monte Carlo fraction of the RC box lying in the stable zone of sb.
double estimate_stability(const ReasonableChanges& rc, const Boundary& sb, long samples,
                          std::mt19937_64& rng);

// One boundary growth step: merge counterexamples into the prior, draw
// n_samples from the remaining stable zone (uniformly from RC when nothing
// is excluded yet), and fold every unstable magnitude into the skyline.
Boundary construct_boundary(const RankingFunctionSpec& spec, const Dataset& d,
                            const std::string& tuple_id, int k, const ReasonableChanges& rc,
                            const Boundary& prior, const std::vector<Vector>& counterexamples,
                            long n_samples, std::mt19937_64& rng, bool fast_rerank = true,
                            int rejection_max_tries = 1000);

struct VerificationResult {
  bool feasible = false;  // false when rejection sampling was exhausted
  double alpha = 1.0;     // p_hat + eta
  double p_hat = 1.0;
  long samples = 0;
  std::vector<Vector> counterexamples;  // magnitudes of unstable draws
};

// Samples hoeffding_sample_count(eta, delta) points from RC cap the stable
// zone and bounds the unstable rate by p_hat + eta (confidence 1 - delta).
VerificationResult verify_boundary(const RankingFunctionSpec& spec, const Dataset& d,
                                   const std::string& tuple_id, int k,
                                   const ReasonableChanges& rc, const Boundary& sb, double eta,
                                   double delta, std::mt19937_64& rng, bool fast_rerank = true,
                                   int rejection_max_tries = 1000);

struct RcReduction {
  ReasonableChanges rc;            // per-attribute widths clipped at the
                                   // smallest unstable single-attribute magnitude
  std::vector<Vector> witnesses;   // one unstable single-attribute magnitude per
                                   // clipped attribute; valid boundary seeds
};

// Shrinks RC using single-attribute probes: any refinement whose i-th
// magnitude reaches an unstable single-attribute magnitude is itself outside
// the stable zone, so the zone is unchanged. Monotone specs binary search a
// 1024-step grid per attribute and sign; others spend `budget` random probes.
RcReduction reduce_rc(const RankingFunctionSpec& spec, const Dataset& d,
                      const std::string& tuple_id, int k, const ReasonableChanges& rc, long budget,
                      std::mt19937_64& rng, bool fast_rerank = true);

// Full pipeline: optional RC reduction, iterative construct/verify with the
// tau_v volume early stop, final volume estimate scaled back to the full RC.
StabilityReport local_stability(const RankingFunctionSpec& spec, const Dataset& d,
                                const std::string& tuple_id, const EngineConfig& config);

}  // namespace rankstab

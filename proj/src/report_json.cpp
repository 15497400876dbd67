#include "rankstab/report_json.hpp"

#include <cmath>

namespace rankstab {

double round_sig(double x, int digits) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  double mag = std::floor(std::log10(std::fabs(x)));
  double factor = std::pow(10.0, digits - 1 - mag);
  return std::round(x * factor) / factor;
}

nlohmann::json json_real(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_sig(x);
}

nlohmann::json json_vector(const Vector& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(json_real(v[i]));
  return arr;
}

nlohmann::json json_boundary(const Boundary& b) {
  auto arr = nlohmann::json::array();
  for (const auto& p : b.points()) arr.push_back(json_vector(p));
  return arr;
}

nlohmann::json to_json(const EngineConfig& c) {
  nlohmann::json j;
  j["alpha_target"] = json_real(c.alpha_target);
  j["budget_mode"] = c.budget_mode == BudgetMode::per_iteration ? "per_iteration" : "apportioned";
  j["delta"] = json_real(c.delta);
  j["eta"] = json_real(c.eta);
  j["fast_rerank"] = c.fast_rerank;
  j["k"] = c.k;
  j["max_iterations"] = c.max_iterations;
  j["per_iteration_samples"] = c.per_iteration_samples;
  j["rc"] = json_vector(c.rc.eps_max);
  j["rc_reduction"] = c.rc_reduction;
  j["rejection_max_tries"] = c.rejection_max_tries;
  j["seed"] = c.seed;
  j["tau_v"] = json_real(c.tau_v);
  if (c.budget_mode == BudgetMode::apportioned) j["total_samples"] = c.total_samples;
  j["volume_samples"] = c.volume_samples;
  j["workers"] = 1;
  return j;
}

nlohmann::json to_json(const StabilityReport& r) {
  nlohmann::json j;
  j["alpha"] = json_real(r.alpha);
  j["boundary"] = json_boundary(r.boundary);
  j["config"] = to_json(r.config);
  j["construction_samples"] = r.construction_samples;
  j["converged"] = r.converged;
  j["delta"] = json_real(r.delta);
  j["estimate"] = json_real(r.estimate);
  j["eta"] = json_real(r.eta);
  j["iterations_used"] = r.iterations_used;
  j["k"] = r.k;
  j["rc_effective"] = json_vector(r.rc_effective);
  j["scale_factor"] = json_real(r.scale_factor);
  j["seed"] = r.config.seed;
  j["tuple"] = r.tuple;
  j["verification_samples"] = r.verification_samples;
  j["verification_skipped"] = r.verification_skipped;
  return j;
}

nlohmann::json to_json(const DenseRegionReport& r) {
  nlohmann::json j;
  j["k"] = r.k;
  j["k_star"] = r.curve.k_star;
  auto curve = nlohmann::json::array();
  for (double v : r.curve.estimates) curve.push_back(json_real(v));
  j["curve"] = curve;
  auto diffs = nlohmann::json::array();
  for (double v : r.differences) diffs.push_back(json_real(v));
  j["differences"] = diffs;
  auto small = nlohmann::json::array();
  for (double v : r.clusters.small) small.push_back(json_real(v));
  auto large = nlohmann::json::array();
  for (double v : r.clusters.large) large.push_back(json_real(v));
  j["clusters"] = nlohmann::json{{"small", small}, {"large", large}};
  j["seed"] = r.seed;
  return j;
}

nlohmann::json truth_to_json(const std::map<std::string, TupleTruth>& truth) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [id, t] : truth) {
    j[id] = nlohmann::json{{"region", t.region}, {"k", t.k}};
  }
  return j;
}

std::string dump_report(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace rankstab

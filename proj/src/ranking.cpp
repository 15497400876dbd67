#include "rankstab/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rankstab/csv.hpp"

namespace rankstab {

std::string to_string(RankingKind k) {
  switch (k) {
    case RankingKind::linear: return "linear";
    case RankingKind::power_geomean: return "power_geomean";
    case RankingKind::external: return "external";
  }
  return "?";
}

RankingFunctionSpec RankingFunctionSpec::linear(Vector weights) {
  RankingFunctionSpec s;
  s.kind = RankingKind::linear;
  s.weights = std::move(weights);
  s.score_based = true;
  s.tuple_independent = true;
  s.monotone = (s.weights >= 0.0).all();
  return s;
}

RankingFunctionSpec RankingFunctionSpec::power_geomean(Vector exponents, double offset) {
  RankingFunctionSpec s;
  s.kind = RankingKind::power_geomean;
  s.exponents = std::move(exponents);
  s.offset = offset;
  s.score_based = true;
  s.tuple_independent = true;
  s.monotone = true;  // exponents are validated non-negative
  return s;
}

RankingFunctionSpec RankingFunctionSpec::external(std::string command, bool score_based,
                                                  bool tuple_independent, bool monotone) {
  RankingFunctionSpec s;
  s.kind = RankingKind::external;
  s.command = std::move(command);
  s.score_based = score_based;
  s.tuple_independent = tuple_independent;
  s.monotone = monotone;
  return s;
}

RankingFunctionSpec RankingFunctionSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    fail(errc::schema, "ranking spec: object with a string 'kind' required");
  }
  const std::string kind = j.at("kind").get<std::string>();

  auto read_vector = [&](const char* key) {
    const auto& arr = j.at(key);
    if (!arr.is_array() || arr.empty()) {
      fail(errc::schema, std::string("ranking spec: '") + key + "' must be a non-empty array");
    }
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number()) {
        fail(errc::schema, std::string("ranking spec: '") + key + "' must hold numbers");
      }
      v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    return v;
  };

  auto flag = [&](const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) {
      fail(errc::schema, std::string("ranking spec: '") + key + "' must be a boolean");
    }
    return j.at(key).get<bool>();
  };

  RankingFunctionSpec s;
  if (kind == "linear") {
    if (!j.contains("weights")) fail(errc::schema, "ranking spec: linear requires 'weights'");
    s = linear(read_vector("weights"));
  } else if (kind == "power_geomean") {
    if (!j.contains("exponents")) {
      fail(errc::schema, "ranking spec: power_geomean requires 'exponents'");
    }
    double offset = 1.0;
    if (j.contains("offset")) {
      if (!j.at("offset").is_number()) fail(errc::schema, "ranking spec: 'offset' must be a number");
      offset = j.at("offset").get<double>();
    }
    s = power_geomean(read_vector("exponents"), offset);
  } else if (kind == "external") {
    if (!j.contains("command") || !j.at("command").is_string()) {
      fail(errc::schema, "ranking spec: external requires a string 'command'");
    }
    s = external(j.at("command").get<std::string>(), flag("score_based", false),
                 flag("tuple_independent", false), flag("monotone", false));
  } else {
    fail(errc::schema, "ranking spec: unknown kind '" + kind + "'");
  }

  // Derived flags are authoritative for score-based kinds; contradicting
  // declarations are configuration mistakes worth rejecting early.
  if (s.kind != RankingKind::external) {
    for (const char* key : {"score_based", "tuple_independent"}) {
      if (j.contains(key) && j.at(key).is_boolean() && !j.at(key).get<bool>()) {
        fail(errc::schema, std::string("ranking spec: ") + to_string(s.kind) + " implies " + key);
      }
    }
    if (j.contains("monotone") && j.at("monotone").is_boolean() &&
        j.at("monotone").get<bool>() != s.monotone) {
      fail(errc::schema, "ranking spec: 'monotone' contradicts the weights/exponents");
    }
  }
  return s;
}

nlohmann::json RankingFunctionSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  if (kind == RankingKind::linear) {
    j["weights"] = std::vector<double>(weights.begin(), weights.end());
  } else if (kind == RankingKind::power_geomean) {
    j["exponents"] = std::vector<double>(exponents.begin(), exponents.end());
    j["offset"] = offset;
  } else {
    j["command"] = command;
  }
  j["score_based"] = score_based;
  j["tuple_independent"] = tuple_independent;
  j["monotone"] = monotone;
  return j;
}

void RankingFunctionSpec::validate(int attr_count) const {
  switch (kind) {
    case RankingKind::linear:
      if (weights.size() != attr_count) {
        fail(errc::dimension, "ranking spec: weights size " + std::to_string(weights.size()) +
                                  " does not match " + std::to_string(attr_count) + " attributes");
      }
      for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (!std::isfinite(weights[i])) fail(errc::domain, "ranking spec: non-finite weight");
      }
      break;
    case RankingKind::power_geomean: {
      if (exponents.size() != attr_count) {
        fail(errc::dimension, "ranking spec: exponents size " + std::to_string(exponents.size()) +
                                  " does not match " + std::to_string(attr_count) + " attributes");
      }
      double sum = 0.0;
      for (Eigen::Index i = 0; i < exponents.size(); ++i) {
        if (!std::isfinite(exponents[i]) || exponents[i] < 0.0) {
          fail(errc::domain, "ranking spec: exponents must be finite and non-negative");
        }
        sum += exponents[i];
      }
      if (sum <= 0.0) fail(errc::domain, "ranking spec: exponent sum must be positive");
      if (!std::isfinite(offset)) fail(errc::domain, "ranking spec: non-finite offset");
      break;
    }
    case RankingKind::external:
      if (command.empty()) fail(errc::schema, "ranking spec: external command is empty");
      break;
  }
}

int Ranking::position_of(const std::string& id) const {
  auto it = position.find(id);
  if (it == position.end()) fail(errc::lookup, "ranking: unknown tuple id '" + id + "'");
  return it->second;
}

Ranking Ranking::from_order(std::vector<std::string> order) {
  Ranking r;
  r.order = std::move(order);
  r.position.reserve(r.order.size());
  for (std::size_t i = 0; i < r.order.size(); ++i) {
    if (!r.position.emplace(r.order[i], static_cast<int>(i)).second) {
      fail(errc::ranking, "ranking: repeated id '" + r.order[i] + "'");
    }
  }
  return r;
}

double score_tuple(const RankingFunctionSpec& spec, const DataTuple& t) {
  switch (spec.kind) {
    case RankingKind::linear: {
      check_same_size(spec.weights.size(), t.values.size(), "score_tuple");
      return (spec.weights * t.values).sum();
    }
    case RankingKind::power_geomean: {
      check_same_size(spec.exponents.size(), t.values.size(), "score_tuple");
      // computed through logs: exponent sums overflow doubles quickly
      double root = spec.exponents.sum();
      double acc = 0.0;
      for (Eigen::Index i = 0; i < t.values.size(); ++i) {
        double base = t.values[i] + spec.offset;
        if (base <= 0.0) {
          fail(errc::domain, "score_tuple: non-positive base for tuple '" + t.id + "'");
        }
        acc += spec.exponents[i] * std::log(base);
      }
      return std::exp(acc / root);
    }
    case RankingKind::external:
      fail(errc::unsupported, "score_tuple: external ranking functions have no scores");
  }
  return 0.0;
}

bool rank_key_before(double score_a, const std::string& id_a, double score_b,
                     const std::string& id_b) {
  if (score_a != score_b) return score_a > score_b;
  return id_a < id_b;
}

Ranking rank_dataset(const RankingFunctionSpec& spec, const Dataset& d) {
  spec.validate(d.attr_count());
  if (spec.kind == RankingKind::external) {
    return rank_via_process(spec.command, d);
  }
  std::vector<std::pair<double, const std::string*>> keys;
  keys.reserve(static_cast<std::size_t>(d.size()));
  for (const auto& t : d.tuples()) keys.emplace_back(score_tuple(spec, t), &t.id);
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    return rank_key_before(a.first, *a.second, b.first, *b.second);
  });
  std::vector<std::string> order;
  order.reserve(keys.size());
  for (const auto& k : keys) order.push_back(*k.second);
  return Ranking::from_order(std::move(order));
}

int position_change(const RankingFunctionSpec& spec, const Dataset& d, const DataTuple& t,
                    const DataTuple& refined) {
  if (t.id != refined.id) fail(errc::integrity, "position_change: refined tuple changed identity");
  if (d.index_of(t.id) < 0) fail(errc::lookup, "position_change: tuple '" + t.id + "' not in dataset");
  Ranking before = rank_dataset(spec, d);
  Ranking after = rank_dataset(spec, d.with_replaced(refined));
  return std::abs(before.position_of(t.id) - after.position_of(t.id));
}

RankEvaluator::RankEvaluator(const RankingFunctionSpec& spec, const Dataset& d,
                             const std::string& tuple_id)
    : spec_(spec), d_(d), tuple_(d.require(tuple_id)), size_(d.size()) {
  spec_.validate(d.attr_count());
  if (spec_.kind == RankingKind::external) {
    base_ranking_ = rank_dataset(spec_, d_);
    base_position_ = base_ranking_.position_of(tuple_id);
    return;
  }
  ranked_.reserve(static_cast<std::size_t>(size_));
  for (const auto& t : d.tuples()) ranked_.push_back({score_tuple(spec_, t), &t.id});
  std::sort(ranked_.begin(), ranked_.end(), [](const Key& a, const Key& b) {
    return rank_key_before(a.score, *a.id, b.score, *b.id);
  });
  others_.reserve(ranked_.size() - 1);
  for (std::size_t i = 0; i < ranked_.size(); ++i) {
    if (*ranked_[i].id == tuple_id) {
      base_position_ = static_cast<int>(i);
    } else {
      others_.push_back(ranked_[i]);
    }
  }
}

int RankEvaluator::refined_position_scored(double score) const {
  // insertion index among the others = number of them ranking before t'
  auto it = std::lower_bound(others_.begin(), others_.end(), score, [&](const Key& a, double s) {
    return rank_key_before(a.score, *a.id, s, tuple_.id);
  });
  return static_cast<int>(it - others_.begin());
}

int RankEvaluator::position_change(const Vector& eps) const {
  DataTuple refined = apply_refinement(tuple_, eps);
  if (spec_.kind == RankingKind::external) {
    Ranking after = rank_dataset(spec_, d_.with_replaced(refined));
    return std::abs(after.position_of(tuple_.id) - base_position_);
  }
  return std::abs(refined_position_scored(score_tuple(spec_, refined)) - base_position_);
}

bool RankEvaluator::k_stable_exact(const Vector& eps, int k) const {
  return position_change(eps) <= k;
}

bool RankEvaluator::k_stable_fast(const Vector& eps, int k) const {
  if (!spec_.tuple_independent) return k_stable_exact(eps, k);
  int up = base_position_ - (k + 1);
  int down = base_position_ + (k + 1);
  bool check_up = up >= 0;
  bool check_down = down < size_;
  if (!check_up && !check_down) return true;

  DataTuple refined = apply_refinement(tuple_, eps);
  if (spec_.score_based) {
    double s = score_tuple(spec_, refined);
    if (check_up) {
      const Key& u = ranked_[static_cast<std::size_t>(up)];
      if (rank_key_before(s, tuple_.id, u.score, *u.id)) return false;  // climbed past t_up
    }
    if (check_down) {
      const Key& w = ranked_[static_cast<std::size_t>(down)];
      if (rank_key_before(w.score, *w.id, s, tuple_.id)) return false;  // fell past t_down
    }
    return true;
  }

  // External but declared tuple independent: rank just the three tuples.
  std::vector<DataTuple> mini;
  if (check_up) mini.push_back(d_.require(base_ranking_.order[static_cast<std::size_t>(up)]));
  mini.push_back(refined);
  if (check_down) mini.push_back(d_.require(base_ranking_.order[static_cast<std::size_t>(down)]));
  Dataset md(d_.schema(), std::move(mini));
  Ranking r = rank_dataset(spec_, md);
  int pos = r.position_of(tuple_.id);
  int expect = check_up ? 1 : 0;
  return pos == expect;
}

bool is_k_stable(const RankingFunctionSpec& spec, const Dataset& d, const std::string& tuple_id,
                 const Vector& eps, int k, bool fast_rerank) {
  if (k < 0) fail(errc::config, "is_k_stable: k must be non-negative");
  RankEvaluator ev(spec, d, tuple_id);
  return ev.k_stable(eps, k, fast_rerank);
}

}  // namespace rankstab

#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "rankstab/core.hpp"

namespace rankstab {

enum class RankingKind { linear, power_geomean, external };

std::string to_string(RankingKind k);

// Declarative description of how tuples are ranked.
//
//   linear         score = weights . values
//   power_geomean  score = (prod_i (v_i + offset)^e_i)^(1/sum_i e_i)
//   external       scores unavailable; an external process emits the order
//
// linear and power_geomean are score based and tuple independent by
// construction, and monotone exactly when all weights/exponents are
// non-negative. external declares its own flags; they are trusted here and
// auditable through the oracle module.
struct RankingFunctionSpec {
  RankingKind kind = RankingKind::linear;
  Vector weights;    // linear only
  Vector exponents;  // power_geomean only, non-negative, positive sum
  double offset = 1.0;
  std::string command;  // external only

  bool score_based = false;
  bool tuple_independent = false;
  bool monotone = false;
  bool descending = true;  // rank by descending score; informational

  static RankingFunctionSpec linear(Vector weights);
  static RankingFunctionSpec power_geomean(Vector exponents, double offset = 1.0);
  static RankingFunctionSpec external(std::string command, bool score_based = false,
                                      bool tuple_independent = false, bool monotone = false);

  static RankingFunctionSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  void validate(int attr_count) const;
};

// 0-based positions internally; position 0 is the top of the ranking.
struct Ranking {
  std::vector<std::string> order;                     // ids, best first
  std::unordered_map<std::string, int> position;      // id -> 0-based position

  int position_of(const std::string& id) const;       // lookup error when absent
  static Ranking from_order(std::vector<std::string> order);
};

// Score of one tuple. Unsupported for external specs; domain error when a
// power_geomean base v_i + offset is not strictly positive.
double score_tuple(const RankingFunctionSpec& spec, const DataTuple& t);

// Ties in score are broken by ascending id, making the order total.
bool rank_key_before(double score_a, const std::string& id_a, double score_b,
                     const std::string& id_b);

Ranking rank_dataset(const RankingFunctionSpec& spec, const Dataset& d);

// |position of t in f(D) - position of t' in f(D with t replaced by t')|.
int position_change(const RankingFunctionSpec& spec, const Dataset& d, const DataTuple& t,
                    const DataTuple& refined);

// Precomputed context for classifying many refinements of one tuple.
//
// For score-based specs the base scores and the sort order of the other
// tuples are computed once; an exact refined position then costs one score
// evaluation plus a binary search, which is equal by definition to a full
// re-rank. For external specs every question goes through the process.
class RankEvaluator {
 public:
  RankEvaluator(const RankingFunctionSpec& spec, const Dataset& d, const std::string& tuple_id);

  const DataTuple& tuple() const { return tuple_; }
  int base_position() const { return base_position_; }
  int dataset_size() const { return size_; }

  // Exact position change of the refined tuple.
  int position_change(const Vector& eps) const;

  // Exact stability test via the full re-ranking semantics.
  bool k_stable_exact(const Vector& eps, int k) const;

  // Tuple-independent shortcut: the refined tuple must not rank above the
  // tuple k+1 positions up nor below the one k+1 positions down. Falls back
  // to the exact test when the spec is not tuple independent.
  bool k_stable_fast(const Vector& eps, int k) const;

  bool k_stable(const Vector& eps, int k, bool fast) const {
    return fast ? k_stable_fast(eps, k) : k_stable_exact(eps, k);
  }

 private:
  struct Key {
    double score;
    const std::string* id;
  };

  int refined_position_scored(double score) const;

  const RankingFunctionSpec& spec_;
  const Dataset& d_;
  DataTuple tuple_;
  int size_ = 0;
  int base_position_ = 0;
  Ranking base_ranking_;     // kept for external specs
  std::vector<Key> ranked_;  // score-based: all tuples, best first
  std::vector<Key> others_;  // score-based: every tuple but t, best first
};

// is_k_stable over a one-off evaluator; prefer RankEvaluator in loops.
bool is_k_stable(const RankingFunctionSpec& spec, const Dataset& d, const std::string& tuple_id,
                 const Vector& eps, int k, bool fast_rerank);

// Runs `command` through the shell, feeding the dataset CSV on stdin and
// reading one id per output line. Non-zero exit or a non-permutation of the
// dataset ids is a ranking error.
Ranking rank_via_process(const std::string& command, const Dataset& d);

struct ProcessResult {
  std::string output;
  int exit_code = -1;
};

ProcessResult run_process(const std::string& command, const std::string& input);

}  // namespace rankstab

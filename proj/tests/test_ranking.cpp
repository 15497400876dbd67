#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "rankstab/ranking.hpp"
#include "rankstab/rng.hpp"

using namespace rankstab;

namespace {

// Ranks by descending attribute sum, mirroring the library's tie-break on
// ascending id. Exercises the whole stdin/stdout protocol.
const char* kSumRanker =
    "python3 -c \""
    "import sys,csv;"
    "rows=list(csv.DictReader(sys.stdin));"
    "rows.sort(key=lambda r:(-sum(float(v) for k,v in r.items() if k!='id'),r['id']));"
    "print('\\n'.join(r['id'] for r in rows))\"";

Dataset small_linear() {
  AttributeSchema schema{{"a", "b"}};
  std::vector<DataTuple> rows;
  rows.push_back({"p", (Vector(2) << 5.0, 5.0).finished()});
  rows.push_back({"q", (Vector(2) << 4.0, 4.0).finished()});
  rows.push_back({"r", (Vector(2) << 3.0, 3.0).finished()});
  rows.push_back({"s", (Vector(2) << 2.0, 2.0).finished()});
  return Dataset{schema, rows};
}

}  // namespace

TEST_CASE("university fixture reproduces the published scores and order") {
  Dataset d = testutil::universities();
  auto spec = RankingFunctionSpec::power_geomean((Vector(2) << 5.0, 12.0).finished(), 1.0);

  const std::vector<std::pair<std::string, double>> expected = {
      {"Lakefront University", 39.2}, {"Dempster University", 37.9},
      {"Western Polytechnic", 36.7},  {"Prairie University", 25.4},
      {"Ogden University", 24.4},     {"Kedzie Institute", 23.8},
      {"University of Blue Island", 22.7}, {"Plainfield College", 11.9},
      {"Irving University", 11.0},    {"Kimball College", 9.6}};

  Ranking r = rank_dataset(spec, d);
  REQUIRE(r.order.size() == 10);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(r.order[i] == expected[i].first);
    double s = score_tuple(spec, d.require(expected[i].first));
    CHECK(std::round(s * 10.0) / 10.0 == doctest::Approx(expected[i].second));
  }
}

TEST_CASE("refinement example: <-10,5> turns (44,36) into (34,41)") {
  Dataset d = testutil::universities();
  DataTuple t1 = d.require("Lakefront University");
  DataTuple refined = apply_refinement(t1, (Vector(2) << -10.0, 5.0).finished());
  CHECK(refined.values[0] == 34.0);
  CHECK(refined.values[1] == 41.0);
}

TEST_CASE("position change example: <-10,-5> scores 32.9 and moves two places") {
  Dataset d = testutil::universities();
  auto spec = RankingFunctionSpec::power_geomean((Vector(2) << 5.0, 12.0).finished(), 1.0);
  DataTuple t1 = d.require("Lakefront University");
  DataTuple refined = apply_refinement(t1, (Vector(2) << -10.0, -5.0).finished());
  CHECK(std::abs(score_tuple(spec, refined) - 32.9) <= 0.05);
  CHECK(position_change(spec, d, t1, refined) == 2);
}

TEST_CASE("csrankings fixture reproduces the published scores") {
  Dataset d = testutil::csrankings();
  auto spec =
      RankingFunctionSpec::power_geomean((Vector(4) << 5.0, 12.0, 3.0, 7.0).finished(), 1.0);
  const std::vector<std::pair<std::string, double>> expected = {
      {"CMU", 19.53}, {"UIUC", 15.39}, {"UCSD", 13.00},   {"MIT", 12.33}, {"Georgia Tech", 11.58},
      {"Stanford", 11.56}, {"UMich", 11.26}, {"UW", 11.13}, {"UCB", 10.69}, {"Cornell", 10.66}};
  Ranking r = rank_dataset(spec, d);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(r.order[i] == expected[i].first);
    double s = score_tuple(spec, d.require(expected[i].first));
    CHECK(std::abs(s - expected[i].second) <= 0.005);  // published values carry two decimals
  }
}

TEST_CASE("score ties break by ascending id") {
  AttributeSchema schema{{"a"}};
  std::vector<DataTuple> rows{{"zed", (Vector(1) << 1.0).finished()},
                              {"abe", (Vector(1) << 1.0).finished()},
                              {"mid", (Vector(1) << 1.0).finished()}};
  Dataset d{schema, rows};
  Ranking r = rank_dataset(RankingFunctionSpec::linear((Vector(1) << 1.0).finished()), d);
  CHECK(r.order == std::vector<std::string>{"abe", "mid", "zed"});
  CHECK(rank_key_before(1.0, "abe", 1.0, "zed"));
  CHECK_FALSE(rank_key_before(1.0, "zed", 1.0, "abe"));
  CHECK(rank_key_before(2.0, "zed", 1.0, "abe"));
}

TEST_CASE("spec factories derive capability flags") {
  auto lin = RankingFunctionSpec::linear((Vector(2) << 1.0, 2.0).finished());
  CHECK(lin.score_based);
  CHECK(lin.tuple_independent);
  CHECK(lin.monotone);

  auto mixed = RankingFunctionSpec::linear((Vector(2) << 1.0, -2.0).finished());
  CHECK_FALSE(mixed.monotone);
  CHECK(mixed.tuple_independent);

  auto pg = RankingFunctionSpec::power_geomean((Vector(2) << 5.0, 12.0).finished());
  CHECK(pg.monotone);
  CHECK(pg.score_based);

  auto ext = RankingFunctionSpec::external("sort", false, false, false);
  CHECK_FALSE(ext.score_based);
}

TEST_CASE("spec json round trip and validation") {
  auto spec = RankingFunctionSpec::power_geomean((Vector(2) << 5.0, 12.0).finished(), 1.0);
  auto j = spec.to_json();
  auto back = RankingFunctionSpec::from_json(j);
  CHECK(back.kind == RankingKind::power_geomean);
  CHECK((back.exponents == spec.exponents).all());
  CHECK(back.offset == spec.offset);

  CHECK_THROWS_AS((void)RankingFunctionSpec::from_json({{"kind", "nope"}}), error);
  CHECK_THROWS_AS((void)RankingFunctionSpec::from_json({{"weights", {1, 2}}}), error);
  // declared flags contradicting the score-based kinds are rejected
  CHECK_THROWS_AS((void)RankingFunctionSpec::from_json(
                      {{"kind", "linear"}, {"weights", {1, 2}}, {"score_based", false}}),
                  error);
  CHECK_THROWS_AS((void)RankingFunctionSpec::from_json(
                      {{"kind", "linear"}, {"weights", {1, 2}}, {"monotone", false}}),
                  error);

  CHECK_THROWS_AS(spec.validate(3), error);  // arity mismatch
  CHECK_THROWS_AS(
      (void)RankingFunctionSpec::power_geomean((Vector(2) << -1.0, 2.0).finished()).validate(2),
      error);
  CHECK_THROWS_AS(
      (void)RankingFunctionSpec::power_geomean((Vector(2) << 0.0, 0.0).finished()).validate(2),
      error);
}

TEST_CASE("power_geomean rejects non-positive bases") {
  auto spec = RankingFunctionSpec::power_geomean((Vector(1) << 2.0).finished(), 1.0);
  DataTuple bad{"t", (Vector(1) << -1.0).finished()};
  CHECK_THROWS_AS((void)score_tuple(spec, bad), error);
}

TEST_CASE("position change requires the original tuple") {
  Dataset d = small_linear();
  auto spec = RankingFunctionSpec::linear((Vector(2) << 1.0, 1.0).finished());
  DataTuple ghost{"ghost", Vector::Zero(2)};
  CHECK_THROWS_AS((void)position_change(spec, d, ghost, ghost), error);
  DataTuple renamed{"other", Vector::Zero(2)};
  CHECK_THROWS_AS((void)position_change(spec, d, d.require("p"), renamed), error);
}

TEST_CASE("fast and exact stability agree on random refinements") {
  Dataset d = testutil::csrankings();
  auto spec =
      RankingFunctionSpec::power_geomean((Vector(4) << 5.0, 12.0, 3.0, 7.0).finished(), 1.0);
  auto rng = substream(3, streams::audit);
  for (const auto& t : d.tuples()) {
    RankEvaluator ev(spec, d, t.id);
    for (int trial = 0; trial < 200; ++trial) {
      Vector eps(4);
      for (int i = 0; i < 4; ++i) eps[i] = uniform_sym(rng, 6.0);
      int k = static_cast<int>(uniform_index(rng, 4));
      bool fast = ev.k_stable_fast(eps, k);
      bool exact = ev.k_stable_exact(eps, k);
      CHECK(fast == exact);
      CHECK(exact == (ev.position_change(eps) <= k));
    }
  }
}

TEST_CASE("evaluator position change matches the standalone definition") {
  Dataset d = small_linear();
  auto spec = RankingFunctionSpec::linear((Vector(2) << 1.0, 1.0).finished());
  RankEvaluator ev(spec, d, "r");
  auto rng = substream(5, streams::audit);
  for (int trial = 0; trial < 300; ++trial) {
    Vector eps(2);
    eps[0] = uniform_sym(rng, 4.0);
    eps[1] = uniform_sym(rng, 4.0);
    DataTuple refined = apply_refinement(d.require("r"), eps);
    CHECK(ev.position_change(eps) == position_change(spec, d, d.require("r"), refined));
  }
}

TEST_CASE("one-off is_k_stable validates k") {
  Dataset d = small_linear();
  auto spec = RankingFunctionSpec::linear((Vector(2) << 1.0, 1.0).finished());
  CHECK_THROWS_AS((void)is_k_stable(spec, d, "p", Vector::Zero(2), -1, true), error);
  CHECK(is_k_stable(spec, d, "p", Vector::Zero(2), 0, true));
  CHECK_FALSE(is_k_stable(spec, d, "p", (Vector(2) << -2.0, -2.0).finished(), 0, true));
}

TEST_CASE("external process ranks through the pipe protocol") {
  Dataset d = small_linear();
  Ranking r = rank_via_process(kSumRanker, d);
  CHECK(r.order == std::vector<std::string>{"p", "q", "r", "s"});

  auto spec = RankingFunctionSpec::external(kSumRanker, false, true, true);
  Ranking r2 = rank_dataset(spec, d);
  CHECK(r2.order == r.order);

  // a refinement large enough to demote p below r
  DataTuple t = d.require("p");
  DataTuple refined = apply_refinement(t, (Vector(2) << -3.0, -1.5).finished());
  CHECK(position_change(spec, d, t, refined) == 2);
}

TEST_CASE("external process failures map to ranking errors") {
  Dataset d = small_linear();
  SUBCASE("nonzero exit") {
    CHECK_THROWS_WITH_AS((void)rank_via_process("false", d), doctest::Contains("exit"), error);
  }
  SUBCASE("missing ids") {
    CHECK_THROWS_AS((void)rank_via_process("head -2", d), error);
  }
  SUBCASE("garbage ids") {
    CHECK_THROWS_AS((void)rank_via_process("echo nonsense", d), error);
  }
  SUBCASE("duplicated ids") {
    CHECK_THROWS_AS((void)rank_via_process("printf 'p\\np\\nq\\nr\\n'", d), error);
  }
}

TEST_CASE("run_process captures output and exit codes") {
  auto ok = run_process("cat", "hello");
  CHECK(ok.exit_code == 0);
  CHECK(ok.output == "hello");
  CHECK(run_process("exit 7", "").exit_code == 7);
}

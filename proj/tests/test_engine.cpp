#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rankstab/engine.hpp"
#include "rankstab/report_json.hpp"
#include "rankstab/rng.hpp"

using namespace rankstab;

namespace {

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

// Two items separated by `gap` in each attribute, ranked by sum. The exact
// 0-stable zone of the lower-ranked item "b" is a triangle: it overtakes "a"
// exactly when the adversarial sum increase m1 + m2 reaches 2 * gap.
Dataset two_tuple_gap(double gap) {
  AttributeSchema schema{{"x", "y"}};
  std::vector<DataTuple> rows{{"a", vec2(10.0 + gap, 10.0 + gap)}, {"b", vec2(10.0, 10.0)}};
  return Dataset{schema, rows};
}

EngineConfig base_config(const ReasonableChanges& rc, int k = 0) {
  EngineConfig c;
  c.k = k;
  c.rc = rc;
  c.seed = 17;
  return c;
}

}  // namespace

TEST_CASE("hoeffding sample counts") {
  CHECK(hoeffding_sample_count(0.01, 0.05) == 14979);
  CHECK(hoeffding_sample_count(0.05, 0.05) == 600);
  CHECK(hoeffding_sample_count(0.01, 0.10) == 11513);
  CHECK_THROWS_AS((void)hoeffding_sample_count(0.0, 0.05), error);
  CHECK_THROWS_AS((void)hoeffding_sample_count(0.01, 1.0), error);
}

TEST_CASE("uniform rc draws stay inside the box and cover both signs") {
  ReasonableChanges rc{vec2(2.0, 0.5)};
  auto rng = substream(1, streams::volume);
  int neg = 0;
  for (int i = 0; i < 2000; ++i) {
    Vector e = sample_uniform_rc(rc, rng);
    CHECK(rc.admits(e));
    if (e[0] < 0.0) ++neg;
  }
  CHECK(neg > 800);
  CHECK(neg < 1200);
}

TEST_CASE("volume estimate matches the closed form for one boundary point") {
  // sb = {(0.5, 0.5)} on RC = (1,1): excluded magnitudes form the quarter
  // square above (0.5, 0.5), so the stable fraction is 1 - 0.25 = 0.75.
  Boundary sb;
  sb.insert(vec2(0.5, 0.5));
  ReasonableChanges rc{vec2(1.0, 1.0)};

  auto rng = substream(123, streams::volume);
  double est = estimate_stability(rc, sb, 100000, rng);
  CHECK(est == doctest::Approx(0.75).epsilon(0.013));

  // the rejection sampler must accept at the same rate
  auto rng2 = substream(124, streams::volume);
  int accepted = 0;
  for (int i = 0; i < 20000; ++i) {
    if (rejection_sample_stable_zone(rc, sb, rng2, 1)) ++accepted;
  }
  CHECK(accepted / 20000.0 == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("rejection sampling reports exhaustion when the zone is empty") {
  Boundary sb;
  sb.insert(vec2(0.0, 0.0));  // everything is excluded
  ReasonableChanges rc{vec2(1.0, 1.0)};
  auto rng = substream(9, streams::volume);
  CHECK_FALSE(rejection_sample_stable_zone(rc, sb, rng, 50).has_value());
  CHECK(estimate_stability(rc, sb, 1000, rng) == 0.0);
}

TEST_CASE("rc reduction snaps to the first unstable grid step") {
  // b trails a by 0.5 in each attribute, so a lone coordinate must exceed 1
  // to swap them (at exactly 1 the scores tie and a keeps the lead by id).
  // 1.0 sits on the 1024-step grid over width 2, so the cap lands one grid
  // step above the crossover.
  AttributeSchema schema{{"x", "y"}};
  std::vector<DataTuple> rows{{"a", vec2(0.5, 0.5)}, {"b", vec2(0.0, 0.0)}};
  Dataset d{schema, rows};
  auto spec = RankingFunctionSpec::linear(vec2(1.0, 1.0));
  ReasonableChanges rc{vec2(2.0, 2.0)};
  auto rng = substream(2, streams::reduce);
  RcReduction red = reduce_rc(spec, d, "b", 0, rc, 2000, rng);

  double g = 2.0 / 1024.0;
  CHECK(red.rc.eps_max[0] == doctest::Approx(1.0 + g));
  CHECK(red.rc.eps_max[1] == doctest::Approx(1.0 + g));
  REQUIRE(red.witnesses.size() == 2);
  for (const auto& w : red.witnesses) {
    CHECK(!is_k_stable(spec, d, "b", w, 0, true));
  }
}

TEST_CASE("rc reduction leaves stable attributes alone") {
  Dataset d = two_tuple_gap(10.0);  // rc too small to ever swap
  auto spec = RankingFunctionSpec::linear(vec2(1.0, 1.0));
  ReasonableChanges rc{vec2(4.0, 4.0)};
  auto rng = substream(2, streams::reduce);
  RcReduction red = reduce_rc(spec, d, "b", 0, rc, 2000, rng);
  CHECK(red.rc.eps_max[0] == 4.0);
  CHECK(red.rc.eps_max[1] == 4.0);
  CHECK(red.witnesses.empty());
}

TEST_CASE("construct folds unstable samples into an antichain") {
  Dataset d = two_tuple_gap(1.0);
  auto spec = RankingFunctionSpec::linear(vec2(1.0, 1.0));
  ReasonableChanges rc{vec2(4.0, 4.0)};
  auto rng = substream(3, streams::construct);
  Boundary sb = construct_boundary(spec, d, "b", 0, rc, Boundary{}, {}, 4000, rng);
  CHECK(!sb.empty());
  const auto& pts = sb.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    // genuinely 0-unstable: the worst signed refinement under this magnitude
    // pushes the sum past the gap of 2
    CHECK(pts[i].sum() >= 2.0);
    CHECK(!is_k_stable(spec, d, "b", pts[i], 0, true));
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      CHECK_FALSE(contains_leq(pts[i], pts[j]));
      CHECK_FALSE(contains_leq(pts[j], pts[i]));
    }
  }
  // prior counterexamples survive the merge
  Vector ce = vec2(2.5, 0.01);
  Boundary sb2 = construct_boundary(spec, d, "b", 0, rc, sb, {ce}, 100, rng);
  CHECK(sb2.excludes(ce.abs()));
}

TEST_CASE("verification bounds the unstable rate of a correct boundary") {
  Dataset d = two_tuple_gap(1.0);
  auto spec = RankingFunctionSpec::linear(vec2(1.0, 1.0));
  ReasonableChanges rc{vec2(4.0, 4.0)};

  // the exact boundary: any magnitude with m1 + m2 >= 2 is unstable
  Boundary exact;
  for (int i = 0; i <= 200; ++i) {
    double x = 2.0 * i / 200.0;
    exact.insert(vec2(x, 2.0 - x));
  }
  auto rng = substream(4, streams::verify);
  VerificationResult vr = verify_boundary(spec, d, "b", 0, rc, exact, 0.05, 0.05, rng);
  CHECK(vr.feasible);
  CHECK(vr.samples == 600);
  // the polyline overapproximates the zone only between grid points
  CHECK(vr.p_hat <= 0.02);
  CHECK(vr.alpha == doctest::Approx(vr.p_hat + 0.05));
}

TEST_CASE("config validation rejects bad parameters") {
  ReasonableChanges rc{vec2(1.0, 1.0)};
  EngineConfig c = base_config(rc);
  c.validate(2);

  EngineConfig bad = c;
  bad.k = -1;
  CHECK_THROWS_AS(bad.validate(2), error);
  bad = c;
  bad.eta = 0.0;
  CHECK_THROWS_AS(bad.validate(2), error);
  bad = c;
  bad.delta = 1.0;
  CHECK_THROWS_AS(bad.validate(2), error);
  bad = c;
  bad.tau_v = 1.0;
  CHECK_THROWS_AS(bad.validate(2), error);
  bad = c;
  CHECK_THROWS_AS(bad.validate(3), error);  // rc arity
  bad = c;
  bad.per_iteration_samples = 0;
  CHECK_THROWS_AS(bad.validate(2), error);
}

TEST_CASE("apportioned budget splits the total across iterations") {
  ReasonableChanges rc{vec2(1.0, 1.0)};
  EngineConfig c = base_config(rc);
  c.budget_mode = BudgetMode::apportioned;
  c.eta = 0.01;
  c.delta = 0.05;  // verification costs 14979 per round
  c.max_iterations = 20;
  c.total_samples = 750455;
  long per_iter = c.construction_samples_per_iteration();
  CHECK(per_iter == (750455 + 14979) / 20 - 14979);
  CHECK(per_iter > 0);

  c.total_samples = 14979;  // not even one verification round
  CHECK_THROWS_AS(c.validate(2), error);
}

TEST_CASE("full pipeline on a wide-open instance returns certainty") {
  Dataset d = two_tuple_gap(10.0);
  auto spec = RankingFunctionSpec::linear(vec2(1.0, 1.0));
  EngineConfig c = base_config(ReasonableChanges{vec2(1.0, 1.0)});
  StabilityReport r = local_stability(spec, d, "b", c);
  CHECK(r.estimate == 1.0);
  CHECK(r.converged);
  CHECK(r.alpha == doctest::Approx(c.eta));
  CHECK(r.boundary.empty());
  CHECK(r.scale_factor == 1.0);
  CHECK(r.iterations_used == 1);
}

TEST_CASE("full pipeline recovers the triangle volume") {
  // gap 1, rc (2,2): unstable iff m1+m2 >= 2, stable fraction = 1/2 exactly
  Dataset d = two_tuple_gap(1.0);
  auto spec = RankingFunctionSpec::linear(vec2(1.0, 1.0));
  EngineConfig c = base_config(ReasonableChanges{vec2(2.0, 2.0)});

  SUBCASE("with rc reduction") {}
  SUBCASE("without rc reduction") { c.rc_reduction = false; }
  SUBCASE("without the fast path") { c.fast_rerank = false; }
  SUBCASE("apportioned budget") { c.budget_mode = BudgetMode::apportioned; }

  StabilityReport r = local_stability(spec, d, "b", c);
  CHECK(r.converged);
  CHECK(r.alpha <= c.alpha_target);
  CHECK(r.estimate == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("pipeline reports are deterministic for a fixed seed") {
  Dataset d = testutil::csrankings();
  auto spec =
      RankingFunctionSpec::power_geomean((Vector(4) << 5.0, 12.0, 3.0, 7.0).finished(), 1.0);
  EngineConfig c;
  c.k = 1;
  c.rc = ReasonableChanges{(Vector(4) << 4.0, 1.0, 1.0, 1.0).finished()};
  c.seed = 99;

  StabilityReport r1 = local_stability(spec, d, "Stanford", c);
  StabilityReport r2 = local_stability(spec, d, "Stanford", c);
  CHECK(dump_report(to_json(r1)) == dump_report(to_json(r2)));

  EngineConfig c2 = c;
  c2.seed = 100;
  StabilityReport r3 = local_stability(spec, d, "Stanford", c2);
  CHECK(r3.estimate != r1.estimate);  // the seed actually matters
}

TEST_CASE("tiny tau_v skips verification on a shrinking zone") {
  Dataset d = two_tuple_gap(0.001);  // nearly tied pair, zone collapses fast
  auto spec = RankingFunctionSpec::linear(vec2(1.0, 1.0));
  EngineConfig c = base_config(ReasonableChanges{vec2(2.0, 2.0)});
  c.rc_reduction = false;
  c.tau_v = 0.5;  // generous threshold so the stop triggers immediately
  StabilityReport r = local_stability(spec, d, "b", c);
  CHECK(r.verification_skipped);
  CHECK_FALSE(r.converged);
  CHECK(r.alpha == 1.0);
  CHECK(r.estimate < 0.01);
}

TEST_CASE("unknown tuple is a lookup error") {
  Dataset d = two_tuple_gap(1.0);
  auto spec = RankingFunctionSpec::linear(vec2(1.0, 1.0));
  EngineConfig c = base_config(ReasonableChanges{vec2(1.0, 1.0)});
  CHECK_THROWS_AS((void)local_stability(spec, d, "nope", c), error);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cnls/io.hpp"
#include "cnls/phase.hpp"
#include "support.hpp"

using namespace cnls;

namespace {

GridPtr grid_for(const ParameterSet& p, std::size_t n = 1000) {
  return RadialGrid::make(p.N, default_radius(p.lambda), n);
}

PhaseVerdict run(const ParameterSet& p) { return classify(p, grid_for(p), SolverOptions{}); }

GridSpec coarse() {
  GridSpec g;
  g.intervals = 1000;
  return g;
}

std::string csv(const SweepTable& t) {
  std::ostringstream os;
  write_sweep_csv(os, t, {"0000000000000000", "test"});
  return os.str();
}

}  // namespace

TEST_CASE("weak coupling of two equal equations is semitrivial") {
  const auto v = run(ParameterSet::uniform(1, {1, 1}, {1, 1}, 0.5));
  CHECK(v.verdict == Verdict::semitrivial);
  CHECK(testing::rel_err(v.numeric_full_level, 4.0 / 3.0) <= 1e-3);
  CHECK(std::abs(v.margin) <= 1e-4 * v.numeric_semitrivial_level);
  CHECK(v.semitrivial_subset.size() == 1);
  CHECK_FALSE(v.certificate_held);
  CHECK(v.predicates.at("theorem17_smallb") == true);
}

TEST_CASE("strong coupling of two equal equations is fully nontrivial") {
  const auto v = run(ParameterSet::uniform(1, {1, 1}, {1, 1}, 3.0));
  CHECK(v.verdict == Verdict::fully_nontrivial);
  CHECK(testing::rel_err(v.numeric_full_level, 2.0 / 3.0) <= 1e-3);
  CHECK(testing::rel_err(v.numeric_semitrivial_level, 4.0 / 3.0) <= 1e-3);
  CHECK(v.margin > 0.5);
  CHECK(v.full_support.size() == 2);
  CHECK(v.certificate_held);
  CHECK(v.predicates.at("theorem17_smallb") == false);
  CHECK_FALSE(v.predicates.at("theorem15_spread").has_value());
}

TEST_CASE("three equations") {
  const auto weak = run(ParameterSet::uniform(1, {1, 1, 1}, {1, 1, 1}, 0.3));
  CHECK(weak.verdict == Verdict::semitrivial);

  const auto strong = run(ParameterSet::uniform(1, {1, 1, 1}, {1, 1, 1}, 5.0));
  CHECK(strong.verdict == Verdict::fully_nontrivial);
  CHECK(strong.full_support.size() == 3);
  // 4/3 over the merged value b - (b - mu) / 3.
  CHECK(testing::rel_err(strong.numeric_full_level, 4.0 / 11.0) <= 2e-3);
  CHECK(strong.predicates.at("theorem15_spread") == true);
  CHECK(strong.predicates.at("theorem12") == true);
  CHECK(strong.predicates.at("theorem13") == true);
}

TEST_CASE("classification needs two equations") {
  const auto p = ParameterSet::uniform(1, {1}, {1}, 0.0);
  CHECK_THROWS_AS(classify(p, grid_for(p), SolverOptions{}), PreconditionError);
  const auto q = ParameterSet::uniform(1, {1, 1}, {1, 1}, 1.0);
  ClassifyOptions bad;
  bad.margin_tol = -1.0;
  CHECK_THROWS_AS(classify(q, grid_for(q), SolverOptions{}, bad), ValidationError);
}

TEST_CASE("non-convergence is inconclusive") {
  SolverOptions o;
  o.max_iterations = 1;
  const auto p = ParameterSet::uniform(1, {1, 1}, {1, 1}, 3.0);
  const auto v = classify(p, grid_for(p), o);
  CHECK(v.verdict == Verdict::inconclusive);
  CHECK_FALSE(v.converged);
  CHECK_FALSE(v.diagnostics.empty());
}

TEST_CASE("analytic predicates report inapplicable shapes") {
  auto p = ParameterSet::uniform(1, {1, 2}, {1, 1}, 1.0);
  auto pred = analytic_predicates(p);
  REQUIRE(pred.size() == kPredicateNames.size());
  CHECK_FALSE(pred.at("theorem12").has_value());
  CHECK_FALSE(pred.at("theorem13").has_value());
  CHECK_FALSE(pred.at("theorem15_spread").has_value());
  CHECK(pred.at("theorem17_smallb") == false);

  p = ParameterSet::uniform(1, {1, 1, 1}, {1, 1, 1}, 1.0);
  p.b[0][1] = p.b[1][0] = 1.2;
  pred = analytic_predicates(p);
  CHECK_FALSE(pred.at("theorem17_smallb").has_value());
  CHECK(pred.at("theorem15_spread").has_value());
}

TEST_CASE("verdicts are invariant under relabeling") {
  testing::Rng rng(61);
  for (int k = 0; k < 4; ++k) {
    auto p = testing::random_parameters(rng, 3, 1);
    for (auto& row : p.b)
      for (auto& x : row) x *= 2.0;
    ParameterSet q = p;
    const std::size_t perm[3] = {2, 0, 1};
    for (std::size_t i = 0; i < 3; ++i) {
      q.lambda[i] = p.lambda[perm[i]];
      q.mu[i] = p.mu[perm[i]];
      for (std::size_t j = 0; j < 3; ++j) q.b[i][j] = p.b[perm[i]][perm[j]];
    }
    const auto g = grid_for(p);
    const auto a = classify(p, g, SolverOptions{});
    const auto b = classify(q, g, SolverOptions{});
    CHECK(a.verdict == b.verdict);
    CHECK(testing::rel_err(b.numeric_full_level, a.numeric_full_level) <= 1e-6);
    CHECK(testing::rel_err(b.numeric_semitrivial_level, a.numeric_semitrivial_level) <= 1e-6);
  }
}

TEST_CASE("couplings below the small-b bound give semitrivial verdicts") {
  testing::Rng rng(62);
  for (int k = 0; k < 6; ++k) {
    const std::size_t d = 2 + static_cast<std::size_t>(k % 2);
    std::vector<double> lambda(d), mu(d);
    for (auto& l : lambda) l = rng.uniform(0.5, 2.0);
    for (auto& m : mu) m = rng.uniform(0.5, 2.0);
    const double b = small_b_bound(mu) * rng.uniform(0.1, 0.9);
    const auto p = ParameterSet::uniform(1, lambda, mu, b);
    const auto v = run(p);
    CHECK(v.predicates.at("theorem17_smallb") == true);
    CHECK(v.verdict == Verdict::semitrivial);
  }
}

TEST_CASE("set_parameter paths") {
  auto p = ParameterSet::uniform(1, {1, 1, 1}, {1, 1, 1}, 1.0);
  set_parameter(p, "lambda[2]", 3.0);
  CHECK(p.lambda == std::vector<double>{1, 3, 1});
  set_parameter(p, "mu", 0.5);
  CHECK(p.mu == std::vector<double>{0.5, 0.5, 0.5});
  set_parameter(p, "b[1][3]", 4.0);
  CHECK(p.b[0][2] == 4.0);
  CHECK(p.b[2][0] == 4.0);
  CHECK(p.b[0][1] == 1.0);
  set_parameter(p, "b", 2.0);
  CHECK(p.constant_coupling() == 2.0);
  CHECK(p.b[1][1] == 0.0);
  set_parameter(p, "lambda", 7.0);
  CHECK(p.lambda == std::vector<double>{7, 7, 7});

  CHECK_THROWS_AS(set_parameter(p, "lambda[0]", 1.0), ValidationError);
  CHECK_THROWS_AS(set_parameter(p, "mu[4]", 1.0), ValidationError);
  CHECK_THROWS_AS(set_parameter(p, "b[2][2]", 1.0), ValidationError);
  CHECK_THROWS_AS(set_parameter(p, "gamma", 1.0), ValidationError);
  CHECK_THROWS_AS(set_parameter(p, "b[1]", 1.0), ValidationError);
}

TEST_CASE("a sweep in b flips once across b = 1") {
  const auto base = ParameterSet::uniform(1, {1, 1}, {1, 1}, 1.0);
  std::vector<double> bs;
  for (int k = 2; k <= 30; k += 2) bs.push_back(k / 10.0);
  const auto t = sweep(base, {{"b", bs}}, coarse(), SolverOptions{});
  REQUIRE(t.rows.size() == bs.size());
  int flips = 0;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& row = t.rows[k];
    CHECK(row.point == std::vector<double>{bs[k]});
    CHECK(row.verdict.verdict != Verdict::inconclusive);
    const auto expected = bs[k] < 1.0 ? Verdict::semitrivial : Verdict::fully_nontrivial;
    if (std::abs(bs[k] - 1.0) > 0.05) CHECK(row.verdict.verdict == expected);
    if (k > 0 && row.verdict.verdict != t.rows[k - 1].verdict.verdict) ++flips;
  }
  CHECK(flips == 1);
}

TEST_CASE("a sweep without axes classifies the base point") {
  const auto base = ParameterSet::uniform(1, {1, 1}, {1, 1}, 3.0);
  const auto t = sweep(base, {}, coarse(), SolverOptions{});
  REQUIRE(t.rows.size() == 1);
  CHECK(t.paths.empty());
  const auto v = classify(base, coarse().build(1, base.lambda), SolverOptions{});
  CHECK(t.rows[0].verdict.verdict == v.verdict);
  CHECK(t.rows[0].verdict.numeric_full_level == v.numeric_full_level);
}

TEST_CASE("two-axis sweeps are row-major") {
  const auto base = ParameterSet::uniform(1, {1, 1}, {1, 1}, 1.0);
  GridSpec g;
  g.intervals = 200;
  g.radius = 12.0;
  const auto t = sweep(base, {{"b", {0.5, 3.0}}, {"mu[2]", {0.5, 1.0, 2.0}}}, g, SolverOptions{});
  REQUIRE(t.rows.size() == 6);
  CHECK(t.paths == std::vector<std::string>{"b", "mu[2]"});
  CHECK(t.rows[0].point == std::vector<double>{0.5, 0.5});
  CHECK(t.rows[1].point == std::vector<double>{0.5, 1.0});
  CHECK(t.rows[3].point == std::vector<double>{3.0, 0.5});
  CHECK(t.rows[5].point == std::vector<double>{3.0, 2.0});
}

TEST_CASE("sweep input errors") {
  const auto base = ParameterSet::uniform(1, {1, 1}, {1, 1}, 1.0);
  CHECK_THROWS_AS(sweep(base, {{"kappa", {1.0}}}, coarse(), SolverOptions{}), ValidationError);
  CHECK_THROWS_AS(sweep(base, {{"b", {}}}, coarse(), SolverOptions{}), ValidationError);
  CHECK_THROWS_AS(sweep(base, {{"b", {1.0, -1.0}}}, coarse(), SolverOptions{}), ValidationError);
  SweepOptions small;
  small.cap = 3;
  CHECK_THROWS_AS(sweep(base, {{"b", {1, 2}}, {"mu", {1, 2}}}, coarse(), SolverOptions{}, small),
                  ValidationError);
}

TEST_CASE("sweeps are deterministic and independent of the worker count") {
  const auto base = ParameterSet::uniform(1, {1, 1, 2}, {1, 1, 1}, 1.0);
  GridSpec g;
  g.intervals = 300;
  const std::vector<SweepAxis> axes = {{"b", {0.3, 0.9, 1.5, 2.5}}, {"lambda[3]", {1.0, 1.5}}};
  SweepOptions one, four;
  four.workers = 4;
  const auto a = csv(sweep(base, axes, g, SolverOptions{}, one));
  const auto b = csv(sweep(base, axes, g, SolverOptions{}, one));
  const auto c = csv(sweep(base, axes, g, SolverOptions{}, four));
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("monotonicity in the parameters") {
  const auto p = ParameterSet::uniform(1, {1, 1}, {1, 1}, 2.0);
  auto q = ParameterSet::uniform(1, {1, 1.5}, {1, 0.8}, 1.5);
  const auto g = RadialGrid::make(1, 20.0, 1000);
  const auto r = monotonicity_check(p, q, g, SolverOptions{});
  CHECK(r.consistent);
  CHECK(r.c_p <= r.c_q);

  CHECK_THROWS_AS(monotonicity_check(q, p, g, SolverOptions{}), PreconditionError);
  auto bigger_b = p;
  bigger_b.b[0][1] = bigger_b.b[1][0] = 2.5;
  CHECK_THROWS_AS(monotonicity_check(p, bigger_b, g, SolverOptions{}), PreconditionError);
  auto bigger_mu = p;
  bigger_mu.mu[0] = 2.0;
  CHECK_THROWS_AS(monotonicity_check(p, bigger_mu, g, SolverOptions{}), PreconditionError);
  CHECK_THROWS_AS(monotonicity_check(p, ParameterSet::uniform(2, {1, 1}, {1, 1}, 2.0), g, SolverOptions{}),
                  PreconditionError);
}

TEST_CASE("scaling in lambda") {
  const auto p = ParameterSet::uniform(1, {1}, {1}, 0.0);
  const auto g = RadialGrid::make(1, 20.0, 4000);
  const auto s = scaling_check(p, 4.0, g, SolverOptions{});
  CHECK(testing::rel_err(s.lhs, 32.0 / 3.0) <= 1e-3);
  CHECK(s.rel_err <= 1e-10);
  CHECK(scaling_check(p, 1.0, g, SolverOptions{}).rel_err <= 1e-10);

  const auto q = ParameterSet::uniform(3, {1, 2}, {1, 1.5}, 0.8);
  CHECK(scaling_check(q, 2.5, RadialGrid::make(3, 12.0, 600), SolverOptions{}).rel_err <= 1e-6);
  CHECK_THROWS_AS(scaling_check(p, 0.0, g, SolverOptions{}), PreconditionError);
  CHECK_THROWS_AS(scaling_check(q, 2.0, g, SolverOptions{}), ValidationError);
}

TEST_CASE("scaling in a constant coupling") {
  const auto g = RadialGrid::make(1, 20.0, 1000);
  for (double b : {0.4, 1.0, 3.0}) {
    const auto s = b_scaling_check(ParameterSet::uniform(1, {1, 1.5}, {1, 2}, b), g, SolverOptions{});
    CHECK(s.rel_err <= 1e-8);
  }
  auto p = ParameterSet::uniform(1, {1, 1, 1}, {1, 1, 1}, 1.0);
  p.b[0][1] = p.b[1][0] = 2.0;
  CHECK_THROWS_AS(b_scaling_check(p, g, SolverOptions{}), PreconditionError);
}

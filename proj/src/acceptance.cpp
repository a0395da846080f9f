#include "cnls/acceptance.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>

#include "cnls/functional.hpp"
#include "cnls/grid.hpp"
#include "cnls/params.hpp"
#include "cnls/phase.hpp"
#include "cnls/reduction.hpp"
#include "cnls/solver.hpp"

namespace cnls {

namespace {

std::string g6(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 6);
  return std::string(buf, r.ptr);
}

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

 private:
  std::mt19937_64 rng_;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Context {
  AcceptanceOptions opts;

  GridPtr grid(int N, double R, std::size_t n) const {
    auto g = RadialGrid::make(N, R, n);
    return opts.weight_factor == 1.0 ? g : g->with_weight_perturbation(opts.weight_factor);
  }
};

struct Outcome {
  bool passed = false;
  std::string detail;
};

Outcome single_equation(const Context& ctx) {
  const auto p = ParameterSet::uniform(1, {1.0}, {1.0}, 0.0);
  const auto r = ground_state(p, ctx.grid(1, 20.0, 4000), SolverOptions{});
  const double e = rel(r.level, 4.0 / 3.0);
  return {r.converged && e <= 1e-3,
          "level=" + g6(r.level) + " rel_err=" + g6(e) + " tol=1e-3"};
}

Outcome symmetric_threshold(const Context& ctx) {
  const auto g = ctx.grid(1, 20.0, 4000);
  const auto weak = classify(ParameterSet::uniform(1, {1, 1}, {1, 1}, 0.5), g, SolverOptions{});
  const auto strong = classify(ParameterSet::uniform(1, {1, 1}, {1, 1}, 3.0), g, SolverOptions{});
  const double e = rel(strong.numeric_full_level, 2.0 / 3.0);
  const bool ok = weak.verdict == Verdict::semitrivial &&
                  strong.verdict == Verdict::fully_nontrivial && e <= 1e-3;
  return {ok, "b=0.5 " + to_string(weak.verdict) + ", b=3 " + to_string(strong.verdict) +
                  " level=" + g6(strong.numeric_full_level) + " rel_err=" + g6(e) +
                  " tol=1e-3"};
}

Outcome sphere_oracle(const Context&) {
  Uniform u(7001);
  const int resolution[] = {10000, 400, 100};
  double worst = 0.0;
  int failures = 0;
  for (std::size_t k = 2; k <= 4; ++k) {
    const int res = resolution[k - 2];
    const double tol = 2.0 / res;
    auto check = [&](const std::vector<double>& mu, double b, SphereRegime expected) {
      const auto s = sphere_max(mu, b);
      const double brute = brute_force_sphere_max(mu, b, res);
      double norm = 0.0;
      for (double x : s.x_repr) norm += x * x;
      const double diff = std::abs(s.f_max - brute);
      worst = std::max(worst, diff * res);
      if (s.regime != expected || diff > tol || std::abs(std::sqrt(norm) - 1.0) > 1e-12 ||
          std::abs(f_eval(s.x_repr, mu, b) - s.f_max) > 1e-10)
        ++failures;
    };
    for (int draw = 0; draw < 100; ++draw) {
      const double b = u(0.5, 3.0);
      std::vector<double> mu(k);
      for (auto& m : mu) m = b * u(0.02, 0.98);
      check(mu, b, SphereRegime::interior);

      std::vector<double> mv(k);
      for (auto& m : mv) m = b * u(0.02, 2.0);
      mv[u.index(k)] = b * u(1.05, 2.0);
      check(mv, b, SphereRegime::vertex);

      std::vector<double> mf(k);
      for (auto& m : mf) m = b * u(0.02, 0.98);
      mf[u.index(k)] = b;
      if (u(0.0, 1.0) < 0.5) mf[u.index(k)] = b;
      check(mf, b, SphereRegime::face);
    }
    const std::vector<double> zero(k, 0.0);
    const double expected = 1.0 - 1.0 / static_cast<double>(k);
    const auto s = sphere_max(zero, 1.0);
    if (std::abs(s.f_max - expected) > 1e-12 ||
        std::abs(brute_force_sphere_max(zero, 1.0, res) - expected) > tol)
      ++failures;
  }
  return {failures == 0, "failures=" + std::to_string(failures) +
                             " worst |closed-brute|*resolution=" + g6(worst) + " tol=2"};
}

Outcome reduction_consistency(const Context& ctx) {
  const auto p = ParameterSet::uniform(1, {1, 1, 2}, {1, 1, 1}, 3.0);
  const auto g = ctx.grid(1, default_radius(p.lambda), 4000);
  const auto full = ground_state(p, g, SolverOptions{});
  const auto red = reduce_system(p, {0, 1});
  const bool shape = red.reduced.lambda == std::vector<double>{1, 2} &&
                     red.reduced.mu == std::vector<double>{2, 1};
  const auto reduced = ground_state(red.reduced, g, SolverOptions{});
  const double e = rel(full.level, reduced.level);

  const auto lifted = lift_ground_state(reduced.fields, red.sphere, red.mapping);
  const double lift_err = rel(action(lifted, p).action, reduced.level);

  auto proportional = [](const Field& a, const Field& b) {
    double diff = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) diff = std::max(diff, std::abs(a[j] - b[j]));
    return diff / std::max(a.sup_norm(), b.sup_norm());
  };
  const double full_sup = proportional(full.fields[0], full.fields[1]);
  const double lift_sup = proportional(lifted[0], lifted[1]);

  const bool ok = shape && full.converged && reduced.converged && e <= 3e-3 &&
                  full_sup <= 1e-3 && lift_sup <= 1e-3 && lift_err <= 1e-8;
  return {ok, "full=" + g6(full.level) + " reduced=" + g6(reduced.level) + " rel_err=" + g6(e) +
                  " tol=3e-3; sup|u1-u2|/sup: full=" + g6(full_sup) + " lifted=" + g6(lift_sup) +
                  " tol=1e-3; lifted action rel_err=" + g6(lift_err)};
}

Outcome scaling(const Context& ctx) {
  const auto g = ctx.grid(1, 20.0, 4000);
  ParameterSet pb = ParameterSet::uniform(1, {1.0, 1.5}, {1.0, 2.0}, 3.0);
  const auto bs = b_scaling_check(pb, g, SolverOptions{});
  const auto single = ParameterSet::uniform(1, {1.0}, {1.0}, 0.0);
  const auto ls = scaling_check(single, 4.0, g, SolverOptions{});
  const double analytic = rel(ls.lhs, 32.0 / 3.0);
  const bool ok = bs.rel_err <= 1e-10 && ls.rel_err <= 1e-3 && analytic <= 1e-3;
  return {ok, "b-scaling rel_err=" + g6(bs.rel_err) + " tol=1e-10; lambda-scaling rel_err=" +
                  g6(ls.rel_err) + " (vs 32/3: " + g6(analytic) + ") tol=1e-3"};
}

Outcome monotonicity(const Context& ctx) {
  Uniform u(7006);
  int violations = 0;
  double worst = -1e300;
  for (int draw = 0; draw < 20; ++draw) {
    const std::vector<double> lp{u(0.5, 1.5), u(0.5, 1.5)};
    const std::vector<double> mp{u(0.5, 2.0), u(0.5, 2.0)};
    const double bp = u(0.2, 3.0);
    std::vector<double> lq(lp), mq(mp);
    for (auto& l : lq) l *= 1.0 + u(0.0, 0.5);
    for (auto& m : mq) m *= 1.0 - u(0.0, 0.5);
    const double bq = bp * (1.0 - u(0.0, 0.5));
    const auto p = ParameterSet::uniform(1, lp, mp, bp);
    const auto q = ParameterSet::uniform(1, lq, mq, bq);
    const auto r =
        monotonicity_check(p, q, ctx.grid(1, default_radius(lp), 4000), SolverOptions{}, 1e-6);
    worst = std::max(worst, r.c_p - r.c_q);
    if (!r.consistent) ++violations;
  }
  return {violations == 0, "violations=" + std::to_string(violations) +
                               " max(c_p-c_q)=" + g6(worst) + " tol=1e-6"};
}

Outcome small_b(const Context& ctx) {
  Uniform u(7007);
  int fully = 0, semi = 0, inconclusive = 0;
  for (int draw = 0; draw < 20; ++draw) {
    const std::size_t d = draw < 10 ? 2 : 3;
    std::vector<double> lambda(d), mu(d);
    for (auto& l : lambda) l = u(0.5, 2.0);
    for (auto& m : mu) m = u(0.5, 2.0);
    const double b = 0.9 * small_b_bound(mu);
    const auto p = ParameterSet::uniform(1, lambda, mu, b);
    const auto v = classify(p, ctx.grid(1, default_radius(lambda), 4000), SolverOptions{});
    switch (v.verdict) {
      case Verdict::fully_nontrivial: ++fully; break;
      case Verdict::semitrivial: ++semi; break;
      case Verdict::inconclusive: ++inconclusive; break;
    }
  }
  return {fully == 0, "fully_nontrivial=" + std::to_string(fully) + " semitrivial=" +
                          std::to_string(semi) + " inconclusive=" + std::to_string(inconclusive)};
}

Outcome certificate(const Context& ctx) {
  const auto g = ctx.grid(1, 20.0, 4000);
  LevelSolver solver(ParameterSet::uniform(1, {1, 1}, {1, 1}, 1.0), g, SolverOptions{});
  IndexSet first;
  first.insert(0);
  const auto semi = solver.restricted_ground_state(first);
  const Field& w = semi.fields[0];
  const double crossing = h1_lambda_sq(w, 1.0) / mixed_l2(w, w);
  int mismatches = 0;
  for (double b : {0.5, 0.9, 0.99, 0.998, 1.002, 1.01, 1.1, 3.0}) {
    const auto c = perturbation_certificate(ParameterSet::uniform(1, {1, 1}, {1, 1}, b), semi, w);
    if (c.holds != (b > 1.0)) ++mismatches;
  }
  const bool ok = semi.converged && mismatches == 0 && std::abs(crossing - 1.0) <= 1e-3;
  return {ok, "crossing b=" + g6(crossing) + " (mu=1, band 1e-3) mismatches=" +
                  std::to_string(mismatches)};
}

MultiField random_smooth(Uniform& u, const GridPtr& g, std::size_t d) {
  std::vector<Field> comps;
  for (std::size_t i = 0; i < d; ++i) {
    double a[3], c[3];
    for (int m = 0; m < 3; ++m) {
      a[m] = u(-1.0, 1.0);
      c[m] = u(0.2, 2.0);
    }
    comps.push_back(Field::sample(g, [=](double r) {
      double s = 0.0;
      for (int m = 0; m < 3; ++m) s += a[m] * std::exp(-c[m] * r * r);
      return s;
    }));
  }
  return MultiField(std::move(comps));
}

MultiField axpy(const MultiField& u, double t, const MultiField& v) {
  std::vector<Field> comps;
  for (std::size_t i = 0; i < u.components(); ++i) {
    std::vector<double> x(u[i].values().begin(), u[i].values().end());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += t * v[i][j];
    comps.emplace_back(u.grid(), std::move(x));
  }
  return MultiField(std::move(comps));
}

Outcome gradient(const Context& ctx) {
  Uniform u(7009);
  ParameterSet p;
  p.d = 3;
  p.lambda = {1.0, 1.5, 2.0};
  p.mu = {1.0, 2.0, 0.5};
  p.b = {{0.0, 0.7, 1.3}, {0.7, 0.0, 2.1}, {1.3, 2.1, 0.0}};
  double worst = 0.0;
  for (int pair = 0; pair < 10; ++pair) {
    p.N = 1 + pair % 3;
    const auto g = ctx.grid(p.N, 10.0, 400);
    const auto x = random_smooth(u, g, 3);
    const auto v = random_smooth(u, g, 3);
    const double eps = 1e-5;
    const double dd = inner(action_gradient(x, p), v);
    const double fd =
        (action(axpy(x, eps, v), p).action - action(axpy(x, -eps, v), p).action) / (2 * eps);
    worst = std::max(worst, std::abs(dd - fd) / std::abs(fd));
  }
  return {worst <= 1e-6, "max rel_err=" + g6(worst) + " tol=1e-6"};
}

Outcome nehari(const Context& ctx) {
  Uniform u(7010);
  int failures = 0;
  double worst = 0.0;
  for (int draw = 0; draw < 50; ++draw) {
    ParameterSet p;
    p.d = 1 + static_cast<int>(u.index(3));
    p.N = 1 + static_cast<int>(u.index(3));
    const auto d = static_cast<std::size_t>(p.d);
    p.lambda.resize(d);
    p.mu.resize(d);
    for (auto& l : p.lambda) l = u(0.5, 2.0);
    for (auto& m : p.mu) m = u(0.5, 2.0);
    p.b.assign(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) p.b[i][j] = p.b[j][i] = u(0.1, 3.0);
    const auto x = random_smooth(u, ctx.grid(p.N, 10.0, 400), d);
    const auto tu = x.scaled(nehari_scale(x, p));
    const auto a = action(tu, p);
    const double r = std::abs(a.nehari_residual) / a.quadratic;
    worst = std::max(worst, r);
    if (r > 1e-10 || !(action(tu.scaled(0.5), p).action < a.action) ||
        !(action(tu.scaled(2.0), p).action < a.action))
      ++failures;
  }
  return {failures == 0, "failures=" + std::to_string(failures) +
                             " max |tau|/quadratic=" + g6(worst) + " tol=1e-10"};
}

struct Criterion {
  int id;
  const char* name;
  double budget;
  Outcome (*run)(const Context&);
};

const Criterion kCriteria[] = {
    {1, "single-equation level", 10, single_equation},
    {2, "symmetric two-component threshold", 60, symmetric_threshold},
    {3, "sphere maximum vs brute force", 30, sphere_oracle},
    {4, "reduction consistency", 120, reduction_consistency},
    {5, "scaling identities", 60, scaling},
    {6, "level monotonicity", 120, monotonicity},
    {7, "small coupling never fully nontrivial", 300, small_b},
    {8, "perturbation certificate switch", 10, certificate},
    {9, "action gradient vs finite differences", 10, gradient},
    {10, "Nehari projection", 10, nehari},
};

}  // namespace

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& opts, const std::function<void(const CriterionResult&)>& on_result) {
  const Context ctx{opts};
  std::vector<CriterionResult> out;
  for (const auto& c : kCriteria) {
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    r.budget_seconds = c.budget;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto o = c.run(ctx);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > r.budget_seconds) {
      r.passed = false;
      r.detail += "; over the " + g6(r.budget_seconds) + " s budget";
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string report_line(const CriterionResult& r) {
  return std::string(r.passed ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name +
         ": " + r.detail;
}

}  // namespace cnls

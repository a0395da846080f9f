#include "cnls/phase.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <regex>
#include <thread>

namespace cnls {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::fully_nontrivial: return "fully_nontrivial";
    case Verdict::semitrivial: return "semitrivial";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::map<std::string, std::optional<bool>> analytic_predicates(const ParameterSet& p) {
  std::map<std::string, std::optional<bool>> out;
  for (const auto& name : kPredicateNames) out[name] = std::nullopt;

  if (p.d >= 3) {
    std::vector<double> sorted(p.lambda);
    std::sort(sorted.begin(), sorted.end());
    out["theorem12"] = theorem12_condition(sorted, p.N).admissible;
    out["theorem13"] = theorem13_condition(p.lambda).admissible;
    const bool equal_lambda =
        std::all_of(p.lambda.begin(), p.lambda.end(),
                    [&](double l) { return nearly_equal(l, p.lambda.front()); });
    if (equal_lambda) out["theorem15_spread"] = beta_spread_condition(p).holds;
  }
  if (p.d >= 2 && p.has_constant_coupling())
    out["theorem17_smallb"] = p.constant_coupling() < small_b_bound(p.mu);
  return out;
}

PhaseVerdict classify(const ParameterSet& p, const GridPtr& grid, const SolverOptions& opts,
                      const ClassifyOptions& copts) {
  validate(p);
  if (p.d < 2) throw PreconditionError("classification needs d >= 2");
  if (!(copts.margin_tol >= 0.0)) throw ValidationError("margin_tol must be nonnegative");

  LevelSolver solver(p, grid, opts);
  const SemitrivialLevel semi = solver.semitrivial();
  const GroundStateResult& full = solver.ground_state();

  PhaseVerdict v;
  v.numeric_semitrivial_level = semi.level;
  v.numeric_full_level = full.level;
  v.margin = semi.level - full.level;
  v.full_support = full.support;
  v.semitrivial_subset = semi.best_subset;
  v.predicates = analytic_predicates(p);

  const auto d = static_cast<std::size_t>(p.d);
  const double tol = copts.margin_tol * semi.level;

  v.converged = full.converged;
  for (const auto& m : semi.minimizers) v.converged = v.converged && m.converged;

  // Certificates at every semitrivial minimizer attaining c^sem, with each
  // surviving component as the test direction.
  for (std::size_t k = 0; k < semi.minimizers.size(); ++k) {
    const auto& m = semi.minimizers[k];
    if (m.level > semi.level + tol) continue;
    const std::size_t missing = d - 1 - k;
    for (auto i : m.support.indices()) {
      if (perturbation_certificate(p, m, missing, m.fields[i]).holds) v.certificate_held = true;
    }
  }

  if (!v.converged) {
    v.verdict = Verdict::inconclusive;
    v.diagnostics = "solver did not converge";
    return v;
  }
  if (v.margin > tol && full.support.size() == d) {
    v.verdict = Verdict::fully_nontrivial;
  } else if (v.margin < -tol || (std::abs(v.margin) <= tol && !v.certificate_held)) {
    v.verdict = Verdict::semitrivial;
  } else {
    v.verdict = Verdict::inconclusive;
    if (v.margin > tol)
      v.diagnostics = "full level below the semitrivial level but the minimizer has an empty component";
    else
      v.diagnostics = "levels agree within margin_tol but a perturbation certificate holds";
  }
  return v;
}

void set_parameter(ParameterSet& p, const std::string& path, double value) {
  static const std::regex vec_re(R"(^(lambda|mu)(?:\[(\d+)\])?$)");
  static const std::regex b_re(R"(^b(?:\[(\d+)\]\[(\d+)\])?$)");
  std::smatch m;
  const auto d = static_cast<std::size_t>(p.d);
  auto index = [&](const std::ssub_match& s) {
    const auto i = std::stoul(s.str());
    if (i < 1 || i > d) throw ValidationError("index out of range in parameter path '" + path + "'");
    return static_cast<std::size_t>(i - 1);
  };

  if (std::regex_match(path, m, vec_re)) {
    auto& target = m[1] == "lambda" ? p.lambda : p.mu;
    if (m[2].matched)
      target.at(index(m[2])) = value;
    else
      std::fill(target.begin(), target.end(), value);
    return;
  }
  if (std::regex_match(path, m, b_re)) {
    if (m[1].matched) {
      const auto i = index(m[1]);
      const auto j = index(m[2]);
      if (i == j) throw ValidationError("parameter path '" + path + "' names a diagonal entry");
      p.b[i][j] = value;
      p.b[j][i] = value;
    } else {
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          if (i != j) p.b[i][j] = value;
    }
    return;
  }
  throw ValidationError("unknown parameter path '" + path + "'");
}

SweepTable sweep(const ParameterSet& base, const std::vector<SweepAxis>& axes,
                 const GridSpec& grid, const SolverOptions& opts, const SweepOptions& sopts) {
  validate(base);
  grid.validate();
  opts.validate();

  SweepTable table;
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.values.empty()) throw ValidationError("sweep axis '" + a.path + "' has no values");
    {
      ParameterSet probe = base;
      set_parameter(probe, a.path, a.values.front());
    }
    if (total > sopts.cap / a.values.size())
      throw ValidationError("sweep exceeds the point cap of " + std::to_string(sopts.cap));
    total *= a.values.size();
    table.paths.push_back(a.path);
  }
  if (total > sopts.cap)
    throw ValidationError("sweep exceeds the point cap of " + std::to_string(sopts.cap));

  std::vector<ParameterSet> params(total, base);
  table.rows.resize(total);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rem = k;
    std::vector<double> point(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      point[a] = axes[a].values[rem % axes[a].values.size()];
      rem /= axes[a].values.size();
    }
    for (std::size_t a = 0; a < axes.size(); ++a) set_parameter(params[k], axes[a].path, point[a]);
    try {
      validate(params[k]);
    } catch (const ValidationError& e) {
      throw ValidationError("sweep point " + std::to_string(k) + ": " + e.what());
    }
    table.rows[k].point = std::move(point);
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      auto& row = table.rows[k];
      try {
        const auto g = grid.build(params[k].N, params[k].lambda);
        row.verdict = classify(params[k], g, opts, sopts.classify);
      } catch (const std::exception& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.verdict = PhaseVerdict{};
        row.verdict.numeric_full_level = row.verdict.numeric_semitrivial_level = nan;
        row.verdict.margin = nan;
        row.verdict.predicates = analytic_predicates(params[k]);
        row.verdict.converged = false;
        row.verdict.diagnostics = e.what();
      }
    }
  };
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::size_t>(sopts.workers, 1, total));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return table;
}

namespace {

bool entrywise_le(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

}  // namespace

MonotonicityResult monotonicity_check(const ParameterSet& p, const ParameterSet& q,
                                      const GridPtr& grid, const SolverOptions& opts,
                                      double tol) {
  validate(p);
  validate(q);
  if (p.d != q.d || p.N != q.N) throw PreconditionError("monotonicity needs equal d and N");
  if (!entrywise_le(p.lambda, q.lambda))
    throw PreconditionError("monotonicity needs lambda_p <= lambda_q");
  if (!entrywise_le(q.mu, p.mu)) throw PreconditionError("monotonicity needs mu_q <= mu_p");
  for (std::size_t i = 0; i < static_cast<std::size_t>(p.d); ++i)
    for (std::size_t j = 0; j < static_cast<std::size_t>(p.d); ++j)
      if (i != j && q.b[i][j] > p.b[i][j])
        throw PreconditionError("monotonicity needs B_q <= B_p");

  MonotonicityResult r;
  r.c_p = ground_state(p, grid, opts).level;
  r.c_q = p == q ? r.c_p : ground_state(q, grid, opts).level;
  r.consistent = r.c_p <= r.c_q + tol;
  return r;
}

ScalingResult scaling_check(const ParameterSet& p, double sigma, const GridPtr& grid,
                            const SolverOptions& opts) {
  validate(p);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw PreconditionError("sigma must be positive");
  if (grid->dimension() != p.N) throw ValidationError("grid dimension does not match N");
  ParameterSet scaled = p;
  for (auto& l : scaled.lambda) l *= sigma;
  const auto scaled_grid =
      RadialGrid::make(p.N, grid->radius() / std::sqrt(sigma), grid->intervals());

  ScalingResult r;
  r.lhs = ground_state(scaled, scaled_grid, opts).level;
  r.rhs = std::pow(sigma, (4.0 - p.N) / 2.0) * ground_state(p, grid, opts).level;
  r.rel_err = std::abs(r.lhs - r.rhs) / std::abs(r.rhs);
  return r;
}

ScalingResult b_scaling_check(const ParameterSet& p, const GridPtr& grid,
                              const SolverOptions& opts) {
  validate(p);
  if (p.d < 2 || !p.has_constant_coupling())
    throw PreconditionError("b-scaling needs d >= 2 and a constant coupling");
  const double b = p.constant_coupling();
  std::vector<double> mu(p.mu);
  for (auto& m : mu) m /= b;
  const auto unit = ParameterSet::uniform(p.N, p.lambda, std::move(mu), 1.0);

  ScalingResult r;
  r.lhs = ground_state(p, grid, opts).level;
  r.rhs = ground_state(unit, grid, opts).level / b;
  r.rel_err = std::abs(r.lhs - r.rhs) / std::abs(r.rhs);
  return r;
}

}  // namespace cnls

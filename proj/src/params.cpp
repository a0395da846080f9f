#include "cnls/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cnls {

bool nearly_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

ParameterSet ParameterSet::uniform(int N, std::vector<double> lambda, std::vector<double> mu,
                                   double b) {
  ParameterSet p;
  p.d = static_cast<int>(lambda.size());
  p.N = N;
  p.lambda = std::move(lambda);
  p.mu = std::move(mu);
  const auto d = static_cast<std::size_t>(p.d);
  p.b.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (i != j) p.b[i][j] = b;
  return p;
}

bool ParameterSet::has_constant_coupling(double tol) const {
  if (d < 2) return true;
  const double ref = b[0][1];
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (i != j && !nearly_equal(b[i][j], ref, tol)) return false;
  return true;
}

double ParameterSet::constant_coupling(double tol) const {
  if (d < 2) throw PreconditionError("constant coupling needs at least two components");
  if (!has_constant_coupling(tol))
    throw PreconditionError("coupling matrix is not constant off the diagonal");
  return b[0][1];
}

const ParameterSet& validate(const ParameterSet& p) {
  if (p.d < 1) throw ValidationError("d must be >= 1, got " + std::to_string(p.d));
  if (p.N < 1 || p.N > 3)
    throw ValidationError("N must be in {1,2,3}, got " + std::to_string(p.N));
  const auto d = static_cast<std::size_t>(p.d);
  if (p.lambda.size() != d || p.mu.size() != d)
    throw ValidationError("lambda and mu must have length d");
  if (p.b.size() != d)
    throw ValidationError("coupling matrix must be d x d");
  for (const auto& row : p.b)
    if (row.size() != d) throw ValidationError("coupling matrix must be d x d");

  for (std::size_t i = 0; i < d; ++i) {
    if (!(std::isfinite(p.lambda[i]) && p.lambda[i] > 0.0))
      throw ValidationError("positivity violated: lambda[" + std::to_string(i + 1) +
                            "] must be > 0");
    if (!(std::isfinite(p.mu[i]) && p.mu[i] > 0.0))
      throw ValidationError("positivity violated: mu[" + std::to_string(i + 1) +
                            "] must be > 0");
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      if (p.b[i][j] != p.b[j][i])
        throw ValidationError("symmetry violated: b[" + std::to_string(i + 1) + "][" +
                              std::to_string(j + 1) + "] != b[" + std::to_string(j + 1) +
                              "][" + std::to_string(i + 1) + "]");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (i != j && !(std::isfinite(p.b[i][j]) && p.b[i][j] > 0.0))
        throw ValidationError("positivity violated: b[" + std::to_string(i + 1) + "][" +
                              std::to_string(j + 1) + "] must be > 0");
  return p;
}

AdmissibilityReport is_alpha_admissible(const std::vector<double>& a, double alpha) {
  if (a.size() < 2) throw PreconditionError("admissibility needs a vector of length >= 2");
  if (!(alpha > 1.0)) throw PreconditionError("admissibility threshold must exceed 1");
  for (double x : a)
    if (!(x > 0.0)) throw PreconditionError("admissibility needs positive entries");
  const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
  AdmissibilityReport r;
  r.alpha = alpha;
  r.ratio = *hi / *lo;
  r.admissible = *hi < alpha * *lo;
  return r;
}

namespace {

double rho(int k) { return static_cast<double>(k - 2) / static_cast<double>(k - 1); }

}  // namespace

double alpha_threshold(double omega, int d, int N) {
  if (d < 3) throw PreconditionError("alpha_threshold needs d >= 3");
  if (N < 1 || N > 3) throw PreconditionError("alpha_threshold needs N in {1,2,3}");
  if (!(omega >= 1.0)) throw PreconditionError("alpha_threshold needs omega >= 1");

  const double rd = rho(d);
  const double rd1 = rho(d - 1);
  // Square root of the L^4 comparison constant between the two surviving
  // profiles of the reduced two-component problem.
  const double l4_ratio = std::sqrt(2.0 * omega * omega *
                                    ((rd1 + omega) * (rd1 + omega) + omega * omega) /
                                    ((rd1 + 2.0 * omega) * (rd1 + 2.0 * omega)));
  const double base = 1.0 - (rd - rd1) / (l4_ratio + rd);
  return std::pow(base, -2.0 / (4.0 - N));
}

double small_b_bound(const std::vector<double>& mu) {
  if (mu.size() < 2) throw PreconditionError("small_b_bound needs d >= 2");
  const auto [lo, hi] = std::minmax_element(mu.begin(), mu.end());
  const double d = static_cast<double>(mu.size());
  return std::pow(2.0, 1.0 - d / 2.0) * std::sqrt(*lo * *hi);
}

SpreadCondition beta_spread_condition(const ParameterSet& p, double equality_tol) {
  if (p.d < 3) throw PreconditionError("spread condition needs d >= 3");
  for (double l : p.lambda)
    if (!nearly_equal(l, p.lambda.front(), equality_tol))
      throw PreconditionError(
          "spread condition requires equal lambdas (lambda_1 = ... = lambda_d)");

  const auto d = static_cast<std::size_t>(p.d);
  SpreadCondition s;
  s.alpha_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d; ++i) {
    double row_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d; ++j)
      if (j != i) row_min = std::min(row_min, p.b[i][j]);
    s.alpha_gap = std::min(s.alpha_gap, row_min - p.mu[i]);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k)
        if (j != i && k != i && j != k)
          s.spread = std::max(s.spread, std::abs(p.b[i][j] - p.b[i][k]));
  }
  s.holds = s.alpha_gap > 0.0 && s.spread < s.alpha_gap / static_cast<double>(p.d - 2);
  return s;
}

AdmissibilityReport theorem13_condition(const std::vector<double>& lambda) {
  const int d = static_cast<int>(lambda.size());
  if (d < 3) throw PreconditionError("theorem13_condition needs d >= 3");
  return is_alpha_admissible(lambda, 1.0 + 1.0 / (d - 2));
}

AdmissibilityReport theorem12_condition(const std::vector<double>& lambda, int N) {
  const int d = static_cast<int>(lambda.size());
  if (d < 3) throw PreconditionError("theorem12_condition needs d >= 3");
  if (!std::is_sorted(lambda.begin(), lambda.end()))
    throw PreconditionError("theorem12_condition needs lambda sorted ascending");
  const double omega = lambda[1] / lambda[0];
  const std::vector<double> tail(lambda.begin() + 1, lambda.end());
  return is_alpha_admissible(tail, alpha_threshold(omega, d, N));
}

}  // namespace cnls

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cnls {

/// Raised when a ParameterSet (or any other input record) violates one of
/// its invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation is called outside the hypotheses it is defined
/// for (for example an equal-lambda condition on unequal lambdas).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Relative tolerance used for "intended exact equality" of parameters.
inline constexpr double kDefaultEqualityTolerance = 1e-12;

/// True when |a - b| <= tol * max(|a|, |b|).
bool nearly_equal(double a, double b, double tol = kDefaultEqualityTolerance);

/// Full problem datum of the d-component cubic system in R^N.
///
/// The coupling matrix is stored in full; its diagonal is never read.
struct ParameterSet {
  int d = 1;
  int N = 1;
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<std::vector<double>> b;

  /// Off-diagonal coupling b_ij (i != j).
  double coupling(std::size_t i, std::size_t j) const { return b[i][j]; }

  /// Builds a ParameterSet with every off-diagonal coupling equal to `b`.
  static ParameterSet uniform(int N, std::vector<double> lambda, std::vector<double> mu,
                              double b);

  /// True when every off-diagonal entry equals the first one within `tol`.
  bool has_constant_coupling(double tol = kDefaultEqualityTolerance) const;

  /// The common coupling value; requires has_constant_coupling().
  double constant_coupling(double tol = kDefaultEqualityTolerance) const;

  bool operator==(const ParameterSet&) const = default;
};

/// Returns `p` unchanged when every invariant holds, otherwise throws
/// ValidationError naming the first violated one.
const ParameterSet& validate(const ParameterSet& p);

struct AdmissibilityReport {
  double alpha = 0.0;
  double ratio = 0.0;
  bool admissible = false;
};

/// max a_i < alpha * min a_i (strict).
AdmissibilityReport is_alpha_admissible(const std::vector<double>& a, double alpha);

/// Threshold alpha(omega, d, N) for the tail (lambda_2, ..., lambda_d) when
/// lambda is sorted ascending and omega = lambda_2 / lambda_1 >= 1.
double alpha_threshold(double omega, int d, int N);

/// 2^(1 - d/2) * sqrt(min mu * max mu). Below this uniform coupling no ground
/// state is fully nontrivial.
double small_b_bound(const std::vector<double>& mu);

struct SpreadCondition {
  double alpha_gap = 0.0;
  double spread = 0.0;
  bool holds = false;
};

/// Coupling-spread condition for equal lambdas and d >= 3:
/// alpha_gap = min_i (min_{j != i} b_ij - mu_i),
/// spread    = max_i max_{j,k != i} |b_ij - b_ik|,
/// holds     = alpha_gap > 0 and spread < alpha_gap / (d - 2).
SpreadCondition beta_spread_condition(const ParameterSet& p,
                                      double equality_tol = kDefaultEqualityTolerance);

/// Admissibility of the whole lambda vector at alpha = 1 + 1/(d - 2).
AdmissibilityReport theorem13_condition(const std::vector<double>& lambda);

/// Admissibility of (lambda_2, ..., lambda_d) at alpha_threshold(lambda_2 / lambda_1, d, N).
/// `lambda` must be nondecreasing.
AdmissibilityReport theorem12_condition(const std::vector<double>& lambda, int N);

}  // namespace cnls

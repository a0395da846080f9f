#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cnls/grid.hpp"
#include "cnls/params.hpp"
#include "cnls/solver.hpp"

namespace cnls {

enum class Verdict { fully_nontrivial, semitrivial, inconclusive };

std::string to_string(Verdict v);

/// Names of the analytic predicates attached to every verdict, in output order.
inline const std::vector<std::string> kPredicateNames = {"theorem12", "theorem13",
                                                         "theorem15_spread", "theorem17_smallb"};

struct PhaseVerdict {
  double numeric_full_level = 0.0;
  double numeric_semitrivial_level = 0.0;
  /// semitrivial - full.
  double margin = 0.0;
  Verdict verdict = Verdict::inconclusive;
  bool certificate_held = false;
  /// nullopt when the predicate's shape hypotheses do not apply to p.
  std::map<std::string, std::optional<bool>> predicates;

  IndexSet full_support;
  IndexSet semitrivial_subset;
  bool converged = true;
  std::string diagnostics;
};

struct ClassifyOptions {
  /// Relative to the semitrivial level.
  double margin_tol = 1e-4;
};

/// Hypothesis flags for p; informational only.
std::map<std::string, std::optional<bool>> analytic_predicates(const ParameterSet& p);

PhaseVerdict classify(const ParameterSet& p, const GridPtr& grid, const SolverOptions& opts,
                      const ClassifyOptions& copts = {});

/// Sets the parameter named by `path` ("b", "b[i][j]", "lambda", "lambda[i]",
/// "mu", "mu[i]"; indices 1-based). "b" sets every off-diagonal coupling and
/// "b[i][j]" sets both b_ij and b_ji.
void set_parameter(ParameterSet& p, const std::string& path, double value);

struct SweepAxis {
  std::string path;
  std::vector<double> values;
};

struct SweepOptions {
  std::size_t cap = 10000;
  unsigned workers = 1;
  ClassifyOptions classify;
};

struct SweepRow {
  std::vector<double> point;
  PhaseVerdict verdict;
};

struct SweepTable {
  std::vector<std::string> paths;
  /// Row-major: the last axis varies fastest.
  std::vector<SweepRow> rows;
};

/// Classifies every point of the product of `axes`. Each point gets its own
/// grid from `grid`, so "auto" radii follow swept lambdas.
SweepTable sweep(const ParameterSet& base, const std::vector<SweepAxis>& axes,
                 const GridSpec& grid, const SolverOptions& opts, const SweepOptions& sopts = {});

struct MonotonicityResult {
  double c_p = 0.0;
  double c_q = 0.0;
  bool consistent = false;
};

/// Requires lambda_p <= lambda_q, mu_q <= mu_p and B_q <= B_p entrywise; then
/// c_p <= c_q + tol should hold.
MonotonicityResult monotonicity_check(const ParameterSet& p, const ParameterSet& q,
                                      const GridPtr& grid, const SolverOptions& opts,
                                      double tol = 1e-6);

struct ScalingResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
};

/// lhs = c(sigma lambda, mu, B) on radius R / sqrt(sigma),
/// rhs = sigma^((4 - N) / 2) c(lambda, mu, B) on radius R, both with n intervals.
ScalingResult scaling_check(const ParameterSet& p, double sigma, const GridPtr& grid,
                            const SolverOptions& opts);

/// lhs = c(lambda, mu, b), rhs = c(lambda, mu / b, 1) / b for constant coupling b.
ScalingResult b_scaling_check(const ParameterSet& p, const GridPtr& grid,
                              const SolverOptions& opts);

}  // namespace cnls

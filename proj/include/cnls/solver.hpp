#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cnls/functional.hpp"
#include "cnls/grid.hpp"
#include "cnls/params.hpp"

namespace cnls {

/// Subset of component indices {0, ..., d-1}, d <= 32.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<std::size_t> idx);
  static IndexSet all(std::size_t d);
  static IndexSet from_mask(std::uint32_t mask) { return IndexSet(mask, 0); }

  bool contains(std::size_t i) const { return (mask_ >> i) & 1u; }
  void insert(std::size_t i) { mask_ |= (1u << i); }
  void erase(std::size_t i) { mask_ &= ~(1u << i); }
  std::size_t size() const;
  bool empty() const { return mask_ == 0; }
  std::uint32_t mask() const { return mask_; }
  std::vector<std::size_t> indices() const;

  bool operator==(const IndexSet&) const = default;
  /// Lexicographic order of the sorted index lists.
  bool lex_less(const IndexSet& other) const;

  /// "{1,3}" with 1-based indices.
  std::string to_string() const;

 private:
  IndexSet(std::uint32_t mask, int) : mask_(mask) {}
  std::uint32_t mask_ = 0;
};

struct SolverOptions {
  int max_iterations = 5000;
  double initial_step = 1.0;
  double backtracking = 0.5;
  double armijo = 1e-4;
  /// Stop when the H^1-dual norm of the on-manifold gradient, relative to
  /// sqrt(quadratic part), falls below this.
  double tolerance = 1e-9;
  /// A component whose |u_i|_4^4 is below this fraction of the largest one is
  /// declared identically zero.
  double triviality_threshold = 1e-6;
  /// Number of randomized starts per restricted solve.
  int multistarts = 2;
  std::uint64_t seed = 20240917;
  /// Relative amplitude of the profile added in the empty slot of a
  /// semitrivial start.
  double perturbation = 0.1;

  void validate() const;
};

struct GroundStateResult {
  MultiField fields;
  double level = 0.0;
  IndexSet support;
  int iterations = 0;
  double grad_norm = 0.0;
  int starts_used = 0;
  bool converged = false;
  ActionBreakdown breakdown;
  /// Distinct minimizers found at the same level (within 1e-8 relative).
  std::vector<MultiField> alternates;
};

/// Single local descent restricted to `support`. Without `init` the start is
/// the all-components-equal soliton profile on the support.
GroundStateResult minimize_restricted(const ParameterSet& p, const GridPtr& grid,
                                      const IndexSet& support, const SolverOptions& opts,
                                      const std::optional<MultiField>& init = std::nullopt);

struct SemitrivialLevel {
  double level = 0.0;
  IndexSet best_subset;
  /// Restricted ground states for every subset of size d-1, in the order of
  /// the missing index d-1, d-2, ..., 0 (i.e. increasing lexicographic order).
  std::vector<GroundStateResult> minimizers;
};

/// Memoized restricted ground states for one (parameters, grid, options).
///
/// The ground state restricted to I is the best of: the all-equal start, each
/// restricted ground state on I \ {i} both as is and with a small soliton added
/// in slot i, and `multistarts` seeded random positive starts.
class LevelSolver {
 public:
  LevelSolver(ParameterSet p, GridPtr grid, SolverOptions opts);

  const GroundStateResult& restricted_ground_state(const IndexSet& support);
  const GroundStateResult& ground_state();
  SemitrivialLevel semitrivial();

  const ParameterSet& parameters() const { return p_; }
  const GridPtr& grid() const { return grid_; }
  const SolverOptions& options() const { return opts_; }

 private:
  ParameterSet p_;
  GridPtr grid_;
  SolverOptions opts_;
  std::map<std::uint32_t, GroundStateResult> cache_;
};

SemitrivialLevel semitrivial_level(const ParameterSet& p, const GridPtr& grid,
                                   const SolverOptions& opts);

GroundStateResult ground_state(const ParameterSet& p, const GridPtr& grid,
                               const SolverOptions& opts);

struct Certificate {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ||w||^2_{lambda_i0} < sum_{i != i0} b_{i,i0} |u_i w|_2^2 for the single
/// empty slot i0 of `semi`.
Certificate perturbation_certificate(const ParameterSet& p, const GroundStateResult& semi,
                                     const Field& w);

/// Same inequality for an explicit empty slot `missing` of `semi`; other
/// components may also be empty.
Certificate perturbation_certificate(const ParameterSet& p, const GroundStateResult& semi,
                                     std::size_t missing, const Field& w);

/// sqrt(2 lambda / mu) sech(sqrt(lambda) r): the positive solution of the
/// single equation for N = 1, used as a profile in every dimension.
Field soliton_profile(const GridPtr& grid, double lambda, double mu);

}  // namespace cnls

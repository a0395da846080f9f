#pragma once

#include "cnls/grid.hpp"
#include "cnls/params.hpp"

namespace cnls {

/// Pieces of the action and of the Nehari residual for one MultiField.
struct ActionBreakdown {
  double quadratic = 0.0;      ///< sum_i ||u_i||^2_{lambda_i}
  double quartic_self = 0.0;   ///< sum_i mu_i |u_i|_4^4
  double quartic_cross = 0.0;  ///< 2 sum_{i<j} b_ij |u_i u_j|_2^2
  double action = 0.0;
  double nehari_residual = 0.0;

  double quartic_total() const { return quartic_self + quartic_cross; }
};

ActionBreakdown action(const MultiField& u, const ParameterSet& p);

/// The positive t with t*u on the Nehari manifold:
/// t^2 = quadratic / (quartic_self + quartic_cross).
double nehari_scale(const MultiField& u, const ParameterSet& p);

/// Action of the Nehari projection of u, quadratic^2 / (4 * quartic total).
/// Invariant under u -> c u.
double action_on_nehari(const MultiField& u, const ParameterSet& p);

/// Euler-Lagrange map, component i:
///   -Delta u_i + lambda_i u_i - mu_i u_i^3 - u_i sum_{j != i} b_ij u_j^2.
/// Represented in the weighted L^2 pairing of the grid, so
/// d/ds action(u + s v) = sum_i inner(gradient_i, v_i).
MultiField action_gradient(const MultiField& u, const ParameterSet& p);

/// Pairing sum_i inner(u_i, v_i).
double inner(const MultiField& u, const MultiField& v);

namespace detail {

void require_compatible(const MultiField& u, const ParameterSet& p);

}  // namespace detail

}  // namespace cnls

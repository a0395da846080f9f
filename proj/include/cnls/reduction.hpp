#pragma once

#include <string>
#include <vector>

#include "cnls/grid.hpp"
#include "cnls/params.hpp"
#include "cnls/solver.hpp"

namespace cnls {

/// f(X) = sum_{i != j} b x_i^2 x_j^2 + sum_i mu_i x_i^4 (ordered pairs).
double f_eval(const std::vector<double>& x, const std::vector<double>& mu, double b);

enum class SphereRegime { vertex, interior, face };

std::string to_string(SphereRegime r);

/// Structured description of the full maximizer set on the unit sphere.
///  - vertex:   {+-e_i : i in indices}
///  - interior: {x : x_i = +-magnitudes[i]} (all 2^k sign choices)
///  - face:     unit sphere of the coordinates in `indices`, zero elsewhere
struct MaximizerSet {
  SphereRegime regime = SphereRegime::vertex;
  std::vector<std::size_t> indices;
  std::vector<double> magnitudes;

  std::string describe() const;
};

struct SphereMaxResult {
  double f_max = 0.0;
  SphereRegime regime = SphereRegime::vertex;
  /// Canonical member of the maximizer set: nonnegative entries, smallest
  /// index on vertex ties, uniform vector on a face.
  std::vector<double> x_repr;
  MaximizerSet x_description;
};

/// Closed-form maximum of f on the unit sphere of R^k.
SphereMaxResult sphere_max(const std::vector<double>& mu, double b,
                           double equality_tol = kDefaultEqualityTolerance);

/// Maximum of f over x_i = sqrt(z_i), z on the simplex grid with spacing
/// 1 / resolution. Independent check of sphere_max; k <= 4.
double brute_force_sphere_max(const std::vector<double>& mu, double b, int resolution);

struct ReducedSystem {
  ParameterSet reduced;
  /// mapping[r] lists the original indices behind reduced component r; the
  /// merged component lists the whole group in ascending order.
  std::vector<std::vector<std::size_t>> mapping;
  std::size_t merged_index = 0;
  SphereMaxResult sphere;
};

/// Merges a group of components with equal lambda into one equation with
/// mu = f_max(mu_group, b). Requires a constant coupling matrix.
ReducedSystem reduce_system(const ParameterSet& p, const std::vector<std::size_t>& group,
                            double equality_tol = kDefaultEqualityTolerance);

/// Replaces the merged component u by (x_repr)_m * u for each group member.
MultiField lift_ground_state(const MultiField& reduced_fields, const SphereMaxResult& sphere,
                             const std::vector<std::vector<std::size_t>>& mapping);

}  // namespace cnls

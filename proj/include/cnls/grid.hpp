#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace cnls {

class RadialGrid;
using GridPtr = std::shared_ptr<const RadialGrid>;

/// Uniform radial grid r_j = j h, j = 0..n, h = R / n, for radial functions on
/// R^N (N in {1,2,3}; N = 1 is the even half-line).
///
/// Node j owns the control volume [r_{j-1/2}, r_{j+1/2}] clipped to [0, R];
/// its weight is the exact measure s_N * int r^(N-1) dr of that shell, so the
/// weights sum to the volume of the ball of radius R. Face j+1/2 carries the
/// flux coefficient s_N * r_{j+1/2}^(N-1). The discrete Dirichlet energy
///   sum_j face_j * (u_{j+1} - u_j)^2 / h
/// and the operator (K u)_j / w_j built from the same faces are therefore
/// exact adjoints in the weighted inner product.
class RadialGrid {
 public:
  static GridPtr make(int N, double R, std::size_t n);

  int dimension() const { return N_; }
  double radius() const { return R_; }
  /// Number of intervals; there are n + 1 nodes.
  std::size_t intervals() const { return n_; }
  std::size_t size() const { return n_ + 1; }
  double spacing() const { return h_; }

  double node(std::size_t j) const { return static_cast<double>(j) * h_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> faces() const { return faces_; }

  /// s_N * R^N / N.
  double ball_volume() const;

  /// Copy of this grid with every quadrature weight multiplied by `factor`.
  /// Only used to inject faults into the self-test harness.
  GridPtr with_weight_perturbation(double factor) const;

  bool same_as(const RadialGrid& other) const;

  RadialGrid(int N, double R, std::size_t n);

 private:
  int N_;
  double R_;
  std::size_t n_;
  double h_;
  double weight_scale_ = 1.0;
  std::vector<double> weights_;
  std::vector<double> faces_;
};

/// Surface measure of the unit sphere in R^N (2, 2*pi, 4*pi).
double sphere_measure(int N);

/// Default truncation radius 20 / sqrt(min lambda).
double default_radius(const std::vector<double>& lambda);

/// Grid request from a run configuration: an explicit radius or "auto".
struct GridSpec {
  std::optional<double> radius;
  std::size_t intervals = 4000;

  /// Throws ValidationError when n < 100 or R <= 0.
  void validate() const;
  GridPtr build(int N, const std::vector<double>& lambda) const;
};

/// One radial profile on a grid. The last node carries the Dirichlet value 0.
class Field {
 public:
  Field(GridPtr grid, std::vector<double> values);
  /// Zero field.
  explicit Field(GridPtr grid);

  /// Samples `f` at the nodes and forces the boundary node to 0.
  static Field sample(GridPtr grid, const std::function<double(double)>& f);

  const GridPtr& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  std::size_t size() const { return values_.size(); }

  bool is_zero() const;
  double sup_norm() const;

  Field scaled(double c) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// d radial profiles on one shared grid.
class MultiField {
 public:
  MultiField(GridPtr grid, std::size_t d);
  explicit MultiField(std::vector<Field> components);

  const GridPtr& grid() const { return grid_; }
  std::size_t components() const { return comps_.size(); }
  const Field& operator[](std::size_t i) const { return comps_[i]; }
  void set(std::size_t i, Field f);

  MultiField scaled(double c) const;

 private:
  GridPtr grid_;
  std::vector<Field> comps_;
};

/// ||u||_lambda^2 = int |u'|^2 + lambda int u^2.
double h1_lambda_sq(const Field& u, double lambda);
/// int |u'|^2 alone.
double dirichlet_energy(const Field& u);
/// int u^2.
double l2_sq(const Field& u);
/// |u|_4^4.
double l4_quartic(const Field& u);
/// |u v|_2^2.
double mixed_l2(const Field& u, const Field& v);
/// int u v (weighted pairing on the grid).
double inner(const Field& u, const Field& v);

/// -u'' - (N-1)/r u' + lambda u, with the symmetry condition at r = 0 and
/// Dirichlet at r = R (the boundary node of the result is 0).
Field apply_neg_laplacian_plus(const Field& u, double lambda);

namespace detail {

/// Raw kernels on value arrays; the field overloads above forward here.
double dirichlet_energy(const RadialGrid& g, std::span<const double> u);
double weighted_sum(std::span<const double> w, std::span<const double> u, int power);
void apply_stiffness(const RadialGrid& g, std::span<const double> u, std::span<double> out);

/// Factorization of K + lambda W, used to solve (K + lambda W) z = rhs with
/// z_n = 0.
class ShiftedLaplacianSolver {
 public:
  ShiftedLaplacianSolver(const RadialGrid& g, double lambda);
  /// Solves (-Delta + lambda) z = f in the weighted sense; f, z length n+1.
  void solve(std::span<const double> f, std::span<double> z) const;

 private:
  std::vector<double> weights_;
  std::vector<double> diag_;   // pivots
  std::vector<double> upper_;  // off-diagonal of K (symmetric)
  std::vector<double> lmul_;   // elimination multipliers
};

}  // namespace detail

}  // namespace cnls

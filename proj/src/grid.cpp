#include "cnls/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cnls/params.hpp"

namespace cnls {

double sphere_measure(int N) {
  switch (N) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: throw ValidationError("N must be in {1,2,3}, got " + std::to_string(N));
  }
}

double default_radius(const std::vector<double>& lambda) {
  if (lambda.empty()) throw ValidationError("default_radius needs at least one lambda");
  return 20.0 / std::sqrt(*std::min_element(lambda.begin(), lambda.end()));
}

void GridSpec::validate() const {
  if (intervals < 100) throw ValidationError("grid n must be at least 100");
  if (radius && !(*radius > 0.0 && std::isfinite(*radius)))
    throw ValidationError("grid radius must be positive");
}

GridPtr GridSpec::build(int N, const std::vector<double>& lambda) const {
  validate();
  return RadialGrid::make(N, radius ? *radius : default_radius(lambda), intervals);
}

RadialGrid::RadialGrid(int N, double R, std::size_t n) : N_(N), R_(R), n_(n) {
  const double sN = sphere_measure(N);
  if (!(R > 0.0) || !std::isfinite(R)) throw ValidationError("grid radius must be positive");
  if (n < 2) throw ValidationError("grid needs at least 2 intervals");
  h_ = R / static_cast<double>(n);

  // Measure of the ball of radius r, up to the constant s_N.
  const auto vol = [N](double r) { return std::pow(r, N) / N; };
  weights_.resize(n + 1);
  faces_.resize(n);
  for (std::size_t j = 0; j <= n; ++j) {
    const double lo = j == 0 ? 0.0 : (static_cast<double>(j) - 0.5) * h_;
    const double hi = j == n ? R : (static_cast<double>(j) + 0.5) * h_;
    weights_[j] = sN * (vol(hi) - vol(lo));
  }
  for (std::size_t j = 0; j < n; ++j)
    faces_[j] = sN * std::pow((static_cast<double>(j) + 0.5) * h_, N - 1);
}

GridPtr RadialGrid::make(int N, double R, std::size_t n) {
  return std::make_shared<const RadialGrid>(N, R, n);
}

double RadialGrid::ball_volume() const { return sphere_measure(N_) * std::pow(R_, N_) / N_; }

GridPtr RadialGrid::with_weight_perturbation(double factor) const {
  auto g = std::make_shared<RadialGrid>(*this);
  g->weight_scale_ *= factor;
  for (double& w : g->weights_) w *= factor;
  return g;
}

bool RadialGrid::same_as(const RadialGrid& other) const {
  return this == &other || (N_ == other.N_ && R_ == other.R_ && n_ == other.n_ &&
                            weight_scale_ == other.weight_scale_);
}

// ---------------------------------------------------------------------------

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("field needs a grid");
  if (values_.size() != grid_->size())
    throw ValidationError("field length " + std::to_string(values_.size()) +
                          " does not match grid size " + std::to_string(grid_->size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw ValidationError("field has non-finite values");
  if (values_.back() != 0.0) throw ValidationError("field must vanish at r = R");
}

Field::Field(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("field needs a grid");
  values_.assign(grid_->size(), 0.0);
}

Field Field::sample(GridPtr grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid->size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid->node(j));
  v.back() = 0.0;
  return Field(std::move(grid), std::move(v));
}

bool Field::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double Field::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Field Field::scaled(double c) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return Field(grid_, std::move(v));
}

MultiField::MultiField(GridPtr grid, std::size_t d) : grid_(std::move(grid)) {
  comps_.reserve(d);
  for (std::size_t i = 0; i < d; ++i) comps_.emplace_back(grid_);
}

MultiField::MultiField(std::vector<Field> components) : comps_(std::move(components)) {
  if (comps_.empty()) throw ValidationError("multifield needs at least one component");
  grid_ = comps_.front().grid();
  for (const auto& c : comps_)
    if (!c.grid()->same_as(*grid_))
      throw ValidationError("multifield components must share one grid");
}

void MultiField::set(std::size_t i, Field f) {
  if (!f.grid()->same_as(*grid_)) throw ValidationError("component grid mismatch");
  comps_.at(i) = std::move(f);
}

MultiField MultiField::scaled(double c) const {
  std::vector<Field> out;
  out.reserve(comps_.size());
  for (const auto& f : comps_) out.push_back(f.scaled(c));
  return MultiField(std::move(out));
}

// ---------------------------------------------------------------------------

namespace detail {

double dirichlet_energy(const RadialGrid& g, std::span<const double> u) {
  const auto faces = g.faces();
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < u.size(); ++j) {
    const double du = u[j + 1] - u[j];
    s += faces[j] * du * du;
  }
  return s / g.spacing();
}

double weighted_sum(std::span<const double> w, std::span<const double> u, int power) {
  double s = 0.0;
  switch (power) {
    case 2:
      for (std::size_t j = 0; j < u.size(); ++j) s += w[j] * u[j] * u[j];
      break;
    case 4:
      for (std::size_t j = 0; j < u.size(); ++j) {
        const double u2 = u[j] * u[j];
        s += w[j] * u2 * u2;
      }
      break;
    default:
      for (std::size_t j = 0; j < u.size(); ++j) s += w[j] * std::pow(u[j], power);
  }
  return s;
}

void apply_stiffness(const RadialGrid& g, std::span<const double> u, std::span<double> out) {
  const auto faces = g.faces();
  const std::size_t n = g.intervals();
  const double inv_h = 1.0 / g.spacing();
  for (std::size_t j = 0; j < n; ++j) {
    double v = faces[j] * (u[j] - u[j + 1]);
    if (j > 0) v += faces[j - 1] * (u[j] - u[j - 1]);
    out[j] = v * inv_h;
  }
  out[n] = 0.0;
}

ShiftedLaplacianSolver::ShiftedLaplacianSolver(const RadialGrid& g, double lambda)
    : weights_(g.weights().begin(), g.weights().end()) {
  const std::size_t n = g.intervals();
  const auto faces = g.faces();
  const double inv_h = 1.0 / g.spacing();
  // Unknowns z_0 .. z_{n-1}; z_n = 0 is eliminated.
  diag_.resize(n);
  upper_.resize(n);
  lmul_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double a = faces[j] * inv_h + lambda * weights_[j];
    if (j > 0) a += faces[j - 1] * inv_h;
    diag_[j] = a;
    upper_[j] = -faces[j] * inv_h;
  }
  for (std::size_t j = 1; j < n; ++j) {
    lmul_[j] = upper_[j - 1] / diag_[j - 1];
    diag_[j] -= lmul_[j] * upper_[j - 1];
  }
}

void ShiftedLaplacianSolver::solve(std::span<const double> f, std::span<double> z) const {
  const std::size_t n = diag_.size();
  for (std::size_t j = 0; j < n; ++j) z[j] = weights_[j] * f[j];
  for (std::size_t j = 1; j < n; ++j) z[j] -= lmul_[j] * z[j - 1];
  z[n - 1] /= diag_[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) z[j] = (z[j] - upper_[j] * z[j + 1]) / diag_[j];
  z[n] = 0.0;
}

}  // namespace detail

namespace {

void require_same_grid(const Field& u, const Field& v) {
  if (!u.grid()->same_as(*v.grid())) throw ValidationError("fields live on different grids");
}

}  // namespace

double dirichlet_energy(const Field& u) { return detail::dirichlet_energy(*u.grid(), u.values()); }

double l2_sq(const Field& u) { return detail::weighted_sum(u.grid()->weights(), u.values(), 2); }

double h1_lambda_sq(const Field& u, double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("h1_lambda_sq needs lambda > 0");
  return dirichlet_energy(u) + lambda * l2_sq(u);
}

double l4_quartic(const Field& u) {
  return detail::weighted_sum(u.grid()->weights(), u.values(), 4);
}

double mixed_l2(const Field& u, const Field& v) {
  require_same_grid(u, v);
  const auto w = u.grid()->weights();
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += w[j] * u[j] * u[j] * v[j] * v[j];
  return s;
}

double inner(const Field& u, const Field& v) {
  require_same_grid(u, v);
  const auto w = u.grid()->weights();
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += w[j] * u[j] * v[j];
  return s;
}

Field apply_neg_laplacian_plus(const Field& u, double lambda) {
  const auto& g = *u.grid();
  std::vector<double> out(g.size());
  detail::apply_stiffness(g, u.values(), out);
  const auto w = g.weights();
  for (std::size_t j = 0; j + 1 < out.size(); ++j) out[j] = out[j] / w[j] + lambda * u[j];
  out.back() = 0.0;
  return Field(u.grid(), std::move(out));
}

}  // namespace cnls

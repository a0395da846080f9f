#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cnls/grid.hpp"
#include "cnls/params.hpp"

namespace testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(g_() >> 11) * 0x1.0p-53;
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(g_() % n); }

 private:
  std::mt19937_64 g_;
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// Sum of three random Gaussians, sign-changing in general.
inline cnls::Field random_smooth_field(Rng& rng, const cnls::GridPtr& g) {
  double a[3], c[3];
  for (int m = 0; m < 3; ++m) {
    a[m] = rng.uniform(-1.0, 1.0);
    c[m] = rng.uniform(0.2, 2.0);
  }
  return cnls::Field::sample(g, [=](double r) {
    double s = 0.0;
    for (int m = 0; m < 3; ++m) s += a[m] * std::exp(-c[m] * r * r);
    return s;
  });
}

inline cnls::MultiField random_smooth(Rng& rng, const cnls::GridPtr& g, std::size_t d) {
  std::vector<cnls::Field> comps;
  for (std::size_t i = 0; i < d; ++i) comps.push_back(random_smooth_field(rng, g));
  return cnls::MultiField(std::move(comps));
}

inline cnls::MultiField add_scaled(const cnls::MultiField& u, double t, const cnls::MultiField& v) {
  std::vector<cnls::Field> comps;
  for (std::size_t i = 0; i < u.components(); ++i) {
    std::vector<double> x(u[i].values().begin(), u[i].values().end());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += t * v[i][j];
    comps.emplace_back(u.grid(), std::move(x));
  }
  return cnls::MultiField(std::move(comps));
}

/// Random cooperative parameters with a symmetric, non-constant coupling.
inline cnls::ParameterSet random_parameters(Rng& rng, int d, int N) {
  cnls::ParameterSet p;
  p.d = d;
  p.N = N;
  const auto n = static_cast<std::size_t>(d);
  p.lambda.resize(n);
  p.mu.resize(n);
  for (auto& l : p.lambda) l = rng.uniform(0.5, 2.0);
  for (auto& m : p.mu) m = rng.uniform(0.5, 2.0);
  p.b.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) p.b[i][j] = p.b[j][i] = rng.uniform(0.1, 3.0);
  return p;
}

}  // namespace testing

#include "cnls/functional.hpp"

#include <cmath>
#include <string>

namespace cnls {

namespace detail {

void require_compatible(const MultiField& u, const ParameterSet& p) {
  if (u.components() != static_cast<std::size_t>(p.d))
    throw ValidationError("field has " + std::to_string(u.components()) +
                          " components but parameters have d = " + std::to_string(p.d));
  if (u.grid()->dimension() != p.N)
    throw ValidationError("grid dimension does not match N");
}

}  // namespace detail

ActionBreakdown action(const MultiField& u, const ParameterSet& p) {
  detail::require_compatible(u, p);
  const auto d = u.components();
  ActionBreakdown a;
  for (std::size_t i = 0; i < d; ++i) {
    a.quadratic += h1_lambda_sq(u[i], p.lambda[i]);
    a.quartic_self += p.mu[i] * l4_quartic(u[i]);
    for (std::size_t j = i + 1; j < d; ++j)
      a.quartic_cross += 2.0 * p.coupling(i, j) * mixed_l2(u[i], u[j]);
  }
  a.action = 0.5 * a.quadratic - 0.25 * a.quartic_self - 0.25 * a.quartic_cross;
  a.nehari_residual = a.quadratic - a.quartic_self - a.quartic_cross;
  return a;
}

double nehari_scale(const MultiField& u, const ParameterSet& p) {
  const auto a = action(u, p);
  if (a.quadratic <= 0.0) throw PreconditionError("cannot project the zero field onto Nehari");
  if (!(a.quartic_total() > 0.0))
    throw PreconditionError("cannot project a field with zero quartic part onto Nehari");
  return std::sqrt(a.quadratic / a.quartic_total());
}

double action_on_nehari(const MultiField& u, const ParameterSet& p) {
  const auto a = action(u, p);
  if (a.quadratic <= 0.0) throw PreconditionError("cannot project the zero field onto Nehari");
  if (!(a.quartic_total() > 0.0))
    throw PreconditionError("cannot project a field with zero quartic part onto Nehari");
  return a.quadratic * a.quadratic / (4.0 * a.quartic_total());
}

MultiField action_gradient(const MultiField& u, const ParameterSet& p) {
  detail::require_compatible(u, p);
  const auto d = u.components();
  const auto& g = u.grid();
  std::vector<Field> out;
  out.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    const Field lin = apply_neg_laplacian_plus(u[i], p.lambda[i]);
    std::vector<double> v(lin.values().begin(), lin.values().end());
    for (std::size_t r = 0; r + 1 < v.size(); ++r) {
      double coupling = p.mu[i] * u[i][r] * u[i][r];
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) coupling += p.coupling(i, j) * u[j][r] * u[j][r];
      v[r] -= coupling * u[i][r];
    }
    out.emplace_back(g, std::move(v));
  }
  return MultiField(std::move(out));
}

double inner(const MultiField& u, const MultiField& v) {
  if (u.components() != v.components()) throw ValidationError("component count mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < u.components(); ++i) s += inner(u[i], v[i]);
  return s;
}

}  // namespace cnls

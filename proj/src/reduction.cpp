#include "cnls/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cnls {

double f_eval(const std::vector<double>& x, const std::vector<double>& mu, double b) {
  if (x.size() < 2) throw PreconditionError("f needs k >= 2");
  if (mu.size() != x.size()) throw PreconditionError("mu and x must have equal length");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi2 = x[i] * x[i];
    s += mu[i] * xi2 * xi2;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (j != i) s += b * xi2 * x[j] * x[j];
  }
  return s;
}

std::string to_string(SphereRegime r) {
  switch (r) {
    case SphereRegime::vertex: return "vertex";
    case SphereRegime::interior: return "interior";
    case SphereRegime::face: return "face";
  }
  return "unknown";
}

std::string MaximizerSet::describe() const {
  std::ostringstream os;
  os.precision(17);
  auto list = [&os](const std::vector<std::size_t>& v) {
    os << '{';
    for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k] + 1;
    os << '}';
  };
  switch (regime) {
    case SphereRegime::vertex:
      os << "{+-e_i : i in ";
      list(indices);
      os << '}';
      break;
    case SphereRegime::interior:
      os << "{x : x_i = +-(";
      for (std::size_t k = 0; k < magnitudes.size(); ++k) os << (k ? ", " : "") << magnitudes[k];
      os << ")_i}, " << (std::size_t{1} << magnitudes.size()) << " sign choices";
      break;
    case SphereRegime::face:
      os << "{x : |x| = 1, x_i = 0 for i not in ";
      list(indices);
      os << '}';
      break;
  }
  return os.str();
}

SphereMaxResult sphere_max(const std::vector<double>& mu, double b, double equality_tol) {
  const std::size_t k = mu.size();
  if (k < 2) throw PreconditionError("sphere_max needs k >= 2");
  if (!(b > 0.0)) throw PreconditionError("sphere_max needs b > 0");
  for (double m : mu)
    if (!(m >= 0.0)) throw PreconditionError("sphere_max needs mu_i >= 0");

  const double mu_max = *std::max_element(mu.begin(), mu.end());
  SphereMaxResult r;
  r.x_repr.assign(k, 0.0);

  if (nearly_equal(mu_max, b, equality_tol)) {
    r.regime = SphereRegime::face;
    r.f_max = b;
    for (std::size_t i = 0; i < k; ++i)
      if (nearly_equal(mu[i], b, equality_tol)) r.x_description.indices.push_back(i);
    const double c = 1.0 / std::sqrt(static_cast<double>(r.x_description.indices.size()));
    for (auto i : r.x_description.indices) r.x_repr[i] = c;
  } else if (mu_max > b) {
    r.regime = SphereRegime::vertex;
    r.f_max = mu_max;
    for (std::size_t i = 0; i < k; ++i)
      if (nearly_equal(mu[i], mu_max, equality_tol)) r.x_description.indices.push_back(i);
    r.x_repr[r.x_description.indices.front()] = 1.0;
  } else {
    r.regime = SphereRegime::interior;
    // sum_i (b - f_max) / (b - mu_i) = 1.
    double s = 0.0;
    for (double m : mu) s += 1.0 / (b - m);
    r.f_max = b - 1.0 / s;
    for (std::size_t i = 0; i < k; ++i) {
      r.x_repr[i] = std::sqrt((b - r.f_max) / (b - mu[i]));
      r.x_description.indices.push_back(i);
    }
    r.x_description.magnitudes = r.x_repr;
  }
  r.x_description.regime = r.regime;
  return r;
}

namespace {

void enumerate_simplex(std::vector<int>& counts, std::size_t pos, int remaining, int resolution,
                       const std::vector<double>& mu, double b, std::vector<double>& x,
                       double& best) {
  const std::size_t k = counts.size();
  if (pos + 1 == k) {
    counts[pos] = remaining;
    for (std::size_t i = 0; i < k; ++i)
      x[i] = std::sqrt(static_cast<double>(counts[i]) / resolution);
    best = std::max(best, f_eval(x, mu, b));
    return;
  }
  for (int c = 0; c <= remaining; ++c) {
    counts[pos] = c;
    enumerate_simplex(counts, pos + 1, remaining - c, resolution, mu, b, x, best);
  }
}

}  // namespace

double brute_force_sphere_max(const std::vector<double>& mu, double b, int resolution) {
  if (mu.size() < 2) throw PreconditionError("brute force needs k >= 2");
  if (mu.size() > 4) throw PreconditionError("brute force is limited to k <= 4");
  if (resolution < 50) throw PreconditionError("brute force needs resolution >= 50");
  std::vector<int> counts(mu.size(), 0);
  std::vector<double> x(mu.size(), 0.0);
  double best = -std::numeric_limits<double>::infinity();
  enumerate_simplex(counts, 0, resolution, resolution, mu, b, x, best);
  return best;
}

ReducedSystem reduce_system(const ParameterSet& p, const std::vector<std::size_t>& group,
                            double equality_tol) {
  validate(p);
  if (!p.has_constant_coupling(equality_tol))
    throw PreconditionError(
        "reduction requires a constant coupling b_ij = b for all i != j");
  std::vector<std::size_t> g(group);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  if (g.size() < 2) throw PreconditionError("reduction group needs at least two components");
  if (g.back() >= static_cast<std::size_t>(p.d))
    throw PreconditionError("reduction group index out of range");
  const double lam = p.lambda[g.front()];
  for (auto i : g)
    if (!nearly_equal(p.lambda[i], lam, equality_tol))
      throw PreconditionError("reduction group must have equal lambda");

  const double b = p.constant_coupling(equality_tol);
  std::vector<double> mu_group;
  for (auto i : g) mu_group.push_back(p.mu[i]);

  ReducedSystem out;
  out.sphere = sphere_max(mu_group, b, equality_tol);

  std::vector<double> lambda, mu;
  for (std::size_t i = 0; i < static_cast<std::size_t>(p.d); ++i) {
    if (i == g.front()) {
      out.merged_index = out.mapping.size();
      out.mapping.push_back(g);
      lambda.push_back(lam);
      mu.push_back(out.sphere.f_max);
    } else if (!std::binary_search(g.begin(), g.end(), i)) {
      out.mapping.push_back({i});
      lambda.push_back(p.lambda[i]);
      mu.push_back(p.mu[i]);
    }
  }
  out.reduced = ParameterSet::uniform(p.N, std::move(lambda), std::move(mu), b);
  return out;
}

MultiField lift_ground_state(const MultiField& reduced_fields, const SphereMaxResult& sphere,
                             const std::vector<std::vector<std::size_t>>& mapping) {
  if (reduced_fields.components() != mapping.size())
    throw PreconditionError("mapping does not match the reduced field");
  std::size_t d = 0;
  for (const auto& m : mapping) {
    if (m.empty()) throw PreconditionError("mapping has an empty entry");
    if (m.size() > 1 && m.size() != sphere.x_repr.size())
      throw PreconditionError("merged group size does not match the sphere maximizer");
    d += m.size();
  }
  MultiField out(reduced_fields.grid(), d);
  for (std::size_t r = 0; r < mapping.size(); ++r) {
    const auto& m = mapping[r];
    if (m.size() == 1) {
      if (m[0] >= d) throw PreconditionError("mapping index out of range");
      out.set(m[0], reduced_fields[r]);
      continue;
    }
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (m[k] >= d) throw PreconditionError("mapping index out of range");
      out.set(m[k], reduced_fields[r].scaled(sphere.x_repr[k]));
    }
  }
  return out;
}

}  // namespace cnls

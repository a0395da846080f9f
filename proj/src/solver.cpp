#include "cnls/solver.hpp"

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>
#include <random>
#include <sstream>

namespace cnls {

// ---------------------------------------------------------------------------
// IndexSet

IndexSet::IndexSet(std::initializer_list<std::size_t> idx) {
  for (auto i : idx) insert(i);
}

IndexSet IndexSet::all(std::size_t d) {
  if (d > 32) throw ValidationError("at most 32 components are supported");
  return from_mask(d == 32 ? 0xFFFFFFFFu : ((1u << d) - 1u));
}

std::size_t IndexSet::size() const { return static_cast<std::size_t>(std::popcount(mask_)); }

std::vector<std::size_t> IndexSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < 32; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

bool IndexSet::lex_less(const IndexSet& other) const {
  const auto a = indices();
  const auto b = other.indices();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::string IndexSet::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (auto i : indices()) {
    if (!first) os << ',';
    os << i + 1;
    first = false;
  }
  os << '}';
  return os.str();
}

// ---------------------------------------------------------------------------

void SolverOptions::validate() const {
  if (max_iterations <= 0) throw ValidationError("solver.max_iterations must be positive");
  if (!(initial_step > 0.0)) throw ValidationError("solver.initial_step must be positive");
  if (!(backtracking > 0.0 && backtracking < 1.0))
    throw ValidationError("solver.backtracking must lie in (0, 1)");
  if (!(armijo > 0.0 && armijo < 1.0)) throw ValidationError("solver.armijo must lie in (0, 1)");
  if (!(tolerance > 0.0)) throw ValidationError("solver.tolerance must be positive");
  if (!(triviality_threshold > 0.0 && triviality_threshold < 1e-2))
    throw ValidationError("solver.triviality_threshold must lie in (0, 1e-2)");
  if (multistarts < 0) throw ValidationError("solver.multistarts must be nonnegative");
  if (!(perturbation > 0.0)) throw ValidationError("solver.perturbation must be positive");
}

Field soliton_profile(const GridPtr& grid, double lambda, double mu) {
  const double amp = std::sqrt(2.0 * lambda / mu);
  const double k = std::sqrt(lambda);
  return Field::sample(grid, [=](double r) { return amp / std::cosh(k * r); });
}

namespace {

using Profiles = std::vector<std::vector<double>>;

struct Measure {
  double quadratic = 0.0;
  double quartic = 0.0;
  std::vector<double> l4;  // |u_i|_4^4 per component

  double level() const { return quadratic * quadratic / (4.0 * quartic); }
};

/// Projected descent on u -> quadratic^2 / (4 quartic) for one support.
class Descent {
 public:
  Descent(const ParameterSet& p, const GridPtr& grid, const SolverOptions& opts,
          const IndexSet& support)
      : p_(p), grid_(grid), opts_(opts), d_(static_cast<std::size_t>(p.d)),
        n_(grid->size()), active_(support) {
    solvers_.reserve(d_);
    for (std::size_t i = 0; i < d_; ++i) solvers_.emplace_back(*grid, p.lambda[i]);
  }

  GroundStateResult run(Profiles u) {
    for (std::size_t i = 0; i < d_; ++i)
      if (!active_.contains(i)) std::fill(u[i].begin(), u[i].end(), 0.0);
    for (auto& ui : u)
      for (double& x : ui) x = std::max(x, 0.0);
    prune(u, opts_.triviality_threshold * opts_.triviality_threshold);
    if (active_.empty()) throw PreconditionError("initial profile is zero on the support");

    Profiles dir(d_, std::vector<double>(n_, 0.0));
    Profiles trial(d_, std::vector<double>(n_, 0.0));
    std::vector<double> rhs(n_);

    int iter = 0;
    double grad = std::numeric_limits<double>::infinity();
    bool converged = false;
    while (true) {
      Measure m = measure(u);
      const double t = std::sqrt(m.quadratic / m.quartic);
      for (auto& ui : u)
        for (double& x : ui) x *= t;
      m = measure(u);

      // Preconditioned direction: u_i - A_i^{-1} F_i(u).
      double gnorm2 = 0.0;
      for (std::size_t i = 0; i < d_; ++i) {
        if (!active_.contains(i)) {
          std::fill(dir[i].begin(), dir[i].end(), 0.0);
          continue;
        }
        for (std::size_t r = 0; r < n_; ++r) {
          double s = p_.mu[i] * u[i][r] * u[i][r];
          for (std::size_t j = 0; j < d_; ++j)
            if (j != i && active_.contains(j)) s += p_.coupling(i, j) * u[j][r] * u[j][r];
          rhs[r] = s * u[i][r];
        }
        solvers_[i].solve(rhs, dir[i]);
        for (std::size_t r = 0; r < n_; ++r) dir[i][r] = u[i][r] - dir[i][r];
        gnorm2 += detail::dirichlet_energy(*grid_, dir[i]) +
                  p_.lambda[i] * detail::weighted_sum(grid_->weights(), dir[i], 2);
      }
      grad = std::sqrt(std::max(gnorm2, 0.0) / m.quadratic);

      if (grad < opts_.tolerance) {
        if (prune(u, opts_.triviality_threshold)) continue;
        converged = true;
        break;
      }
      if (iter >= opts_.max_iterations) break;
      ++iter;

      const double level = m.level();
      const double slack = 8.0 * DBL_EPSILON * level;
      double step = opts_.initial_step;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        for (std::size_t i = 0; i < d_; ++i)
          for (std::size_t r = 0; r < n_; ++r)
            trial[i][r] = std::max(u[i][r] - step * dir[i][r], 0.0);
        const Measure mt = measure(trial);
        if (mt.quartic > 0.0 && mt.quadratic > 0.0 &&
            mt.level() <= level - opts_.armijo * step * gnorm2 + slack) {
          accepted = true;
          break;
        }
        step *= opts_.backtracking;
      }
      if (!accepted) break;
      std::swap(u, trial);
      prune(u, opts_.triviality_threshold * opts_.triviality_threshold);
    }

    return finish(std::move(u), iter, grad, converged);
  }

 private:
  Measure measure(const Profiles& u) const {
    const auto w = grid_->weights();
    Measure m;
    m.l4.assign(d_, 0.0);
    for (std::size_t i = 0; i < d_; ++i) {
      if (!active_.contains(i)) continue;
      m.quadratic += detail::dirichlet_energy(*grid_, u[i]) +
                     p_.lambda[i] * detail::weighted_sum(w, u[i], 2);
      m.l4[i] = detail::weighted_sum(w, u[i], 4);
      m.quartic += p_.mu[i] * m.l4[i];
      for (std::size_t j = i + 1; j < d_; ++j) {
        if (!active_.contains(j)) continue;
        double s = 0.0;
        for (std::size_t r = 0; r < n_; ++r) s += w[r] * u[i][r] * u[i][r] * u[j][r] * u[j][r];
        m.quartic += 2.0 * p_.coupling(i, j) * s;
      }
    }
    return m;
  }

  /// Zeroes active components whose L^4 mass is below `threshold` times the
  /// largest one. Returns true if anything was removed.
  bool prune(Profiles& u, double threshold) {
    const auto w = grid_->weights();
    std::vector<double> l4(d_, 0.0);
    double top = 0.0;
    for (std::size_t i = 0; i < d_; ++i)
      if (active_.contains(i)) {
        l4[i] = detail::weighted_sum(w, u[i], 4);
        top = std::max(top, l4[i]);
      }
    bool removed = false;
    for (std::size_t i = 0; i < d_; ++i)
      if (active_.contains(i) && l4[i] <= threshold * top) {
        std::fill(u[i].begin(), u[i].end(), 0.0);
        active_.erase(i);
        removed = true;
      }
    return removed;
  }

  GroundStateResult finish(Profiles u, int iter, double grad, bool converged) const {
    std::vector<Field> comps;
    comps.reserve(d_);
    for (auto& ui : u) {
      ui.back() = 0.0;
      comps.emplace_back(grid_, std::move(ui));
    }
    MultiField fields(std::move(comps));
    const double t = nehari_scale(fields, p_);
    fields = fields.scaled(t);
    const auto br = action(fields, p_);
    GroundStateResult res{fields, br.action, active_, iter, grad, 1, converged, br, {}};
    return res;
  }

  const ParameterSet& p_;
  GridPtr grid_;
  const SolverOptions& opts_;
  std::size_t d_;
  std::size_t n_;
  IndexSet active_;
  std::vector<detail::ShiftedLaplacianSolver> solvers_;
};

Profiles to_profiles(const MultiField& u) {
  Profiles out;
  out.reserve(u.components());
  for (std::size_t i = 0; i < u.components(); ++i)
    out.emplace_back(u[i].values().begin(), u[i].values().end());
  return out;
}

Profiles symmetric_start(const ParameterSet& p, const GridPtr& grid, const IndexSet& support) {
  double lam = std::numeric_limits<double>::infinity();
  for (auto i : support.indices()) lam = std::min(lam, p.lambda[i]);
  const Field f = soliton_profile(grid, lam, 1.0);
  Profiles u(static_cast<std::size_t>(p.d), std::vector<double>(grid->size(), 0.0));
  for (auto i : support.indices()) u[i].assign(f.values().begin(), f.values().end());
  return u;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Profiles random_start(const ParameterSet& p, const GridPtr& grid, const IndexSet& support,
                      std::mt19937_64& rng) {
  Profiles u(static_cast<std::size_t>(p.d), std::vector<double>(grid->size(), 0.0));
  for (auto i : support.indices()) {
    const double amp = 0.3 + 1.2 * unit_uniform(rng);
    const double k = (0.5 + unit_uniform(rng)) * std::sqrt(p.lambda[i]);
    for (std::size_t r = 0; r + 1 < grid->size(); ++r)
      u[i][r] = amp / std::cosh(k * grid->node(r));
  }
  return u;
}

double relative_sup_distance(const MultiField& a, const MultiField& b) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.components(); ++i)
    for (std::size_t r = 0; r < a[i].size(); ++r) {
      diff = std::max(diff, std::abs(a[i][r] - b[i][r]));
      scale = std::max(scale, std::abs(a[i][r]));
    }
  return scale > 0.0 ? diff / scale : diff;
}

bool same_level(double a, double b) {
  return std::abs(a - b) <= 1e-8 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

/// Picks the lowest level; ties go to converged runs, then to the
/// lexicographically smallest support, then to the earliest candidate.
GroundStateResult select_best(std::vector<GroundStateResult> cands) {
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& c : cands) lowest = std::min(lowest, c.level);
  std::size_t best = cands.size();
  for (std::size_t k = 0; k < cands.size(); ++k) {
    if (!same_level(cands[k].level, lowest)) continue;
    if (best == cands.size()) {
      best = k;
      continue;
    }
    const auto& a = cands[k];
    const auto& b = cands[best];
    if (a.converged != b.converged) {
      if (a.converged) best = k;
    } else if (a.support.lex_less(b.support)) {
      best = k;
    }
  }
  GroundStateResult out = cands[best];
  int starts = 0;
  for (const auto& c : cands) starts += c.starts_used;
  out.starts_used = starts;
  out.alternates.clear();
  for (std::size_t k = 0; k < cands.size(); ++k) {
    if (k == best || !same_level(cands[k].level, out.level)) continue;
    if (relative_sup_distance(cands[k].fields, out.fields) <= 1e-3) continue;
    bool seen = false;
    for (const auto& alt : out.alternates)
      if (relative_sup_distance(cands[k].fields, alt) <= 1e-3) seen = true;
    if (!seen) out.alternates.push_back(cands[k].fields);
  }
  return out;
}

}  // namespace

GroundStateResult minimize_restricted(const ParameterSet& p, const GridPtr& grid,
                                      const IndexSet& support, const SolverOptions& opts,
                                      const std::optional<MultiField>& init) {
  validate(p);
  opts.validate();
  if (support.empty()) throw PreconditionError("support must be nonempty");
  if (grid->dimension() != p.N) throw ValidationError("grid dimension does not match N");
  for (auto i : support.indices())
    if (i >= static_cast<std::size_t>(p.d)) throw PreconditionError("support index out of range");

  Profiles start;
  if (init) {
    detail::require_compatible(*init, p);
    if (!init->grid()->same_as(*grid)) throw ValidationError("initial field is on another grid");
    for (std::size_t i = 0; i < init->components(); ++i)
      if (!support.contains(i) && !(*init)[i].is_zero())
        throw PreconditionError("initial field is nonzero outside the support");
    start = to_profiles(*init);
  } else {
    start = symmetric_start(p, grid, support);
  }
  Descent descent(p, grid, opts, support);
  return descent.run(std::move(start));
}

// ---------------------------------------------------------------------------

LevelSolver::LevelSolver(ParameterSet p, GridPtr grid, SolverOptions opts)
    : p_(std::move(p)), grid_(std::move(grid)), opts_(opts) {
  validate(p_);
  opts_.validate();
  if (grid_->dimension() != p_.N) throw ValidationError("grid dimension does not match N");
}

const GroundStateResult& LevelSolver::restricted_ground_state(const IndexSet& support) {
  if (auto it = cache_.find(support.mask()); it != cache_.end()) return it->second;
  if (support.empty()) throw PreconditionError("support must be nonempty");

  std::vector<GroundStateResult> cands;
  cands.push_back(minimize_restricted(p_, grid_, support, opts_));

  if (support.size() >= 2) {
    for (auto missing : support.indices()) {
      IndexSet sub = support;
      sub.erase(missing);
      const GroundStateResult& semi = restricted_ground_state(sub);
      GroundStateResult as_is = semi;
      as_is.starts_used = 0;
      as_is.alternates.clear();
      cands.push_back(std::move(as_is));

      double peak = 0.0;
      for (std::size_t i = 0; i < semi.fields.components(); ++i)
        peak = std::max(peak, semi.fields[i].sup_norm());
      const Field bump = soliton_profile(grid_, p_.lambda[missing], 1.0);
      MultiField start = semi.fields;
      start.set(missing, bump.scaled(opts_.perturbation * peak / bump.sup_norm()));
      cands.push_back(minimize_restricted(p_, grid_, support, opts_, start));
    }
  }

  std::mt19937_64 rng(splitmix64(opts_.seed ^ (0xA5A5A5A5ull * (support.mask() + 1u))));
  for (int k = 0; k < opts_.multistarts; ++k) {
    Profiles u = random_start(p_, grid_, support, rng);
    std::vector<Field> comps;
    for (auto& ui : u) comps.emplace_back(grid_, std::move(ui));
    cands.push_back(minimize_restricted(p_, grid_, support, opts_, MultiField(std::move(comps))));
  }

  auto [it, _] = cache_.emplace(support.mask(), select_best(std::move(cands)));
  return it->second;
}

const GroundStateResult& LevelSolver::ground_state() {
  return restricted_ground_state(IndexSet::all(static_cast<std::size_t>(p_.d)));
}

SemitrivialLevel LevelSolver::semitrivial() {
  if (p_.d < 2) throw PreconditionError("semitrivial level needs d >= 2");
  SemitrivialLevel out;
  out.level = std::numeric_limits<double>::infinity();
  const auto d = static_cast<std::size_t>(p_.d);
  for (std::size_t k = d; k-- > 0;) {
    IndexSet sub = IndexSet::all(d);
    sub.erase(k);
    const auto& res = restricted_ground_state(sub);
    out.minimizers.push_back(res);
    // Subsets arrive in increasing lexicographic order, so a tie keeps the
    // earlier one.
    if (out.best_subset.empty() || (res.level < out.level && !same_level(res.level, out.level))) {
      out.level = res.level;
      out.best_subset = sub;
    }
  }
  return out;
}

SemitrivialLevel semitrivial_level(const ParameterSet& p, const GridPtr& grid,
                                   const SolverOptions& opts) {
  LevelSolver solver(p, grid, opts);
  return solver.semitrivial();
}

GroundStateResult ground_state(const ParameterSet& p, const GridPtr& grid,
                               const SolverOptions& opts) {
  LevelSolver solver(p, grid, opts);
  return solver.ground_state();
}

// ---------------------------------------------------------------------------

Certificate perturbation_certificate(const ParameterSet& p, const GroundStateResult& semi,
                                     const Field& w) {
  const auto d = static_cast<std::size_t>(p.d);
  std::optional<std::size_t> missing;
  for (std::size_t i = 0; i < d; ++i) {
    if (semi.support.contains(i)) continue;
    if (missing) throw PreconditionError("certificate needs exactly one missing component");
    missing = i;
  }
  if (!missing) throw PreconditionError("certificate needs exactly one missing component");
  return perturbation_certificate(p, semi, *missing, w);
}

Certificate perturbation_certificate(const ParameterSet& p, const GroundStateResult& semi,
                                     std::size_t missing, const Field& w) {
  detail::require_compatible(semi.fields, p);
  if (missing >= static_cast<std::size_t>(p.d))
    throw PreconditionError("missing index out of range");
  if (semi.support.contains(missing) || !semi.fields[missing].is_zero())
    throw PreconditionError("component " + std::to_string(missing + 1) + " is not empty");
  if (w.is_zero()) throw PreconditionError("certificate candidate must be nonzero");

  Certificate c;
  c.lhs = h1_lambda_sq(w, p.lambda[missing]);
  for (std::size_t i = 0; i < static_cast<std::size_t>(p.d); ++i)
    if (i != missing && semi.support.contains(i))
      c.rhs += p.coupling(i, missing) * mixed_l2(semi.fields[i], w);
  c.holds = c.lhs < c.rhs;
  return c;
}

}  // namespace cnls

#include "cnls/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace cnls {

#ifndef CNLS_VERSION
#define CNLS_VERSION "0.0.0"
#endif

const char* version() { return CNLS_VERSION; }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
}

std::vector<double> number_array(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw ValidationError(what + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Json index_list(const std::vector<std::size_t>& idx) {
  Json a = Json::array();
  for (auto i : idx) a.push_back(i + 1);
  return a;
}

template <class F>
auto rethrow_json(F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed JSON value: ") + e.what());
  }
}

}  // namespace

Json to_json(const ParameterSet& p) {
  return Json{{"d", p.d}, {"N", p.N}, {"lambda", p.lambda}, {"mu", p.mu}, {"b", p.b}};
}

ParameterSet parameters_from_json(const Json& j) {
  reject_unknown(j, {"d", "N", "lambda", "mu", "b"}, "parameters");
  for (const char* key : {"d", "N", "lambda", "mu", "b"})
    if (!j.contains(key)) throw ValidationError(std::string("parameters.") + key + " is missing");
  return rethrow_json([&] {
    ParameterSet p;
    if (!j["d"].is_number_integer() || !j["N"].is_number_integer())
      throw ValidationError("parameters.d and parameters.N must be integers");
    p.d = j["d"].get<int>();
    p.N = j["N"].get<int>();
    p.lambda = number_array(j["lambda"], "parameters.lambda");
    p.mu = number_array(j["mu"], "parameters.mu");
    if (p.d < 1) throw ValidationError("d must be at least 1");
    const auto d = static_cast<std::size_t>(p.d);
    if (j["b"].is_number()) {
      p.b.assign(d, std::vector<double>(d, j["b"].get<double>()));
      for (std::size_t i = 0; i < d; ++i) p.b[i][i] = 0.0;
    } else {
      if (!j["b"].is_array()) throw ValidationError("parameters.b must be a matrix or a number");
      for (const auto& row : j["b"]) p.b.push_back(number_array(row, "parameters.b rows"));
    }
    validate(p);
    return p;
  });
}

Json to_json(const SolverOptions& o) {
  return Json{{"max_iterations", o.max_iterations},
              {"initial_step", o.initial_step},
              {"backtracking", o.backtracking},
              {"armijo", o.armijo},
              {"tolerance", o.tolerance},
              {"triviality_threshold", o.triviality_threshold},
              {"multistarts", o.multistarts},
              {"seed", o.seed},
              {"perturbation", o.perturbation}};
}

SolverOptions solver_options_from_json(const Json& j) {
  reject_unknown(j,
                 {"max_iterations", "initial_step", "backtracking", "armijo", "tolerance",
                  "triviality_threshold", "multistarts", "seed", "perturbation"},
                 "solver");
  return rethrow_json([&] {
    SolverOptions o;
    o.max_iterations = j.value("max_iterations", o.max_iterations);
    o.initial_step = j.value("initial_step", o.initial_step);
    o.backtracking = j.value("backtracking", o.backtracking);
    o.armijo = j.value("armijo", o.armijo);
    o.tolerance = j.value("tolerance", o.tolerance);
    o.triviality_threshold = j.value("triviality_threshold", o.triviality_threshold);
    o.multistarts = j.value("multistarts", o.multistarts);
    if (j.contains("seed")) {
      if (!j["seed"].is_number_integer() || j["seed"].get<std::int64_t>() < 0)
        throw ValidationError("solver.seed must be a nonnegative integer");
      o.seed = j["seed"].get<std::uint64_t>();
    }
    o.perturbation = j.value("perturbation", o.perturbation);
    o.validate();
    return o;
  });
}

Json to_json(const IndexSet& s) { return index_list(s.indices()); }

Json to_json(const ActionBreakdown& a) {
  return Json{{"quadratic", a.quadratic},       {"quartic_self", a.quartic_self},
              {"quartic_cross", a.quartic_cross}, {"action", a.action},
              {"nehari_residual", a.nehari_residual}};
}

Json to_json(const GroundStateResult& r) {
  return Json{{"level", r.level},
              {"support", to_json(r.support)},
              {"iterations", r.iterations},
              {"grad_norm", r.grad_norm},
              {"starts_used", r.starts_used},
              {"converged", r.converged},
              {"breakdown", to_json(r.breakdown)},
              {"alternates", r.alternates.size()}};
}

Json to_json(const PhaseVerdict& v) {
  Json preds = Json::object();
  for (const auto& [name, value] : v.predicates)
    preds[name] = value ? Json(*value) : Json(nullptr);
  return Json{{"numeric_full_level", v.numeric_full_level},
              {"numeric_semitrivial_level", v.numeric_semitrivial_level},
              {"margin", v.margin},
              {"verdict", to_string(v.verdict)},
              {"certificate_held", v.certificate_held},
              {"predicates", preds},
              {"full_support", to_json(v.full_support)},
              {"semitrivial_subset", to_json(v.semitrivial_subset)},
              {"converged", v.converged},
              {"diagnostics", v.diagnostics}};
}

Json to_json(const SphereMaxResult& s) {
  return Json{{"f_max", s.f_max},
              {"regime", to_string(s.regime)},
              {"X_repr", s.x_repr},
              {"X_description",
               Json{{"regime", to_string(s.x_description.regime)},
                    {"indices", index_list(s.x_description.indices)},
                    {"magnitudes", s.x_description.magnitudes},
                    {"text", s.x_description.describe()}}}};
}

void write_profiles_csv(std::ostream& os, const MultiField& u, const Provenance& prov) {
  os << "r";
  for (std::size_t i = 0; i < u.components(); ++i) os << ",u_" << i + 1;
  os << ",config_hash,version\n";
  const auto& g = *u.grid();
  for (std::size_t j = 0; j < g.size(); ++j) {
    os << format_double(g.node(j));
    for (std::size_t i = 0; i < u.components(); ++i) os << ',' << format_double(u[i][j]);
    os << ',' << prov.config_hash << ',' << prov.version << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const SweepTable& table, const Provenance& prov) {
  for (const auto& p : table.paths) os << p << ',';
  os << "full_level,semitrivial_level,margin,verdict,certificate_held";
  for (const auto& name : kPredicateNames) os << ',' << name;
  os << ",config_hash,version\n";
  for (const auto& row : table.rows) {
    for (double x : row.point) os << format_double(x) << ',';
    const auto& v = row.verdict;
    os << format_double(v.numeric_full_level) << ',' << format_double(v.numeric_semitrivial_level)
       << ',' << format_double(v.margin) << ',' << to_string(v.verdict) << ','
       << (v.certificate_held ? "true" : "false");
    for (const auto& name : kPredicateNames) {
      const auto it = v.predicates.find(name);
      os << ',';
      if (it == v.predicates.end() || !it->second)
        os << "na";
      else
        os << (*it->second ? "true" : "false");
    }
    os << ',' << prov.config_hash << ',' << prov.version << '\n';
  }
}

namespace {

std::vector<double> expand_range(const Json& a, const std::string& path) {
  const double start = a.at("start").get<double>();
  const double stop = a.at("stop").get<double>();
  const double step = a.at("step").get<double>();
  if (!(step > 0.0) || !(stop >= start) || !std::isfinite(stop - start))
    throw ValidationError("sweep axis '" + path + "' needs start <= stop and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count > 1000000) throw ValidationError("sweep axis '" + path + "' is too long");
  std::vector<double> v(count);
  for (std::size_t k = 0; k < count; ++k) v[k] = start + static_cast<double>(k) * step;
  return v;
}

}  // namespace

RunConfig config_from_json(const Json& j) {
  reject_unknown(j, {"parameters", "grid", "solver", "classify", "sweep", "output", "group"},
                 "config");
  if (!j.contains("parameters")) throw ValidationError("config.parameters is missing");
  return rethrow_json([&] {
    RunConfig c;
    c.parameters = parameters_from_json(j["parameters"]);
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      reject_unknown(g, {"R", "n"}, "grid");
      if (g.contains("R")) {
        if (g["R"].is_string()) {
          if (g["R"].get<std::string>() != "auto")
            throw ValidationError("grid.R must be a number or \"auto\"");
        } else {
          c.grid.radius = g["R"].get<double>();
        }
      }
      if (g.contains("n")) {
        if (!g["n"].is_number_integer() || g["n"].get<std::int64_t>() < 0)
          throw ValidationError("grid.n must be a nonnegative integer");
        c.grid.intervals = g["n"].get<std::size_t>();
      }
    }
    c.grid.validate();
    if (j.contains("solver")) c.solver = solver_options_from_json(j["solver"]);
    if (j.contains("classify")) {
      reject_unknown(j["classify"], {"margin_tol"}, "classify");
      c.classify.margin_tol = j["classify"].value("margin_tol", c.classify.margin_tol);
      if (!(c.classify.margin_tol >= 0.0))
        throw ValidationError("classify.margin_tol must be nonnegative");
    }
    if (j.contains("sweep")) {
      const auto& s = j["sweep"];
      reject_unknown(s, {"axes", "cap", "workers"}, "sweep");
      for (const auto& a : s.value("axes", Json::array())) {
        reject_unknown(a, {"path", "values", "start", "stop", "step"}, "sweep axis");
        SweepAxis axis;
        axis.path = a.at("path").get<std::string>();
        axis.values = a.contains("values") ? number_array(a["values"], "sweep axis values")
                                           : expand_range(a, axis.path);
        ParameterSet probe = c.parameters;
        set_parameter(probe, axis.path, axis.values.front());
        c.axes.push_back(std::move(axis));
      }
      c.sweep.cap = s.value("cap", c.sweep.cap);
      c.sweep.workers = s.value("workers", c.sweep.workers);
    }
    if (j.contains("output")) {
      reject_unknown(j["output"], {"dir"}, "output");
      c.output_dir = j["output"].value("dir", std::string("."));
    }
    if (j.contains("group")) {
      std::vector<std::size_t> g;
      for (const auto& x : j["group"]) {
        if (!x.is_number_integer()) throw ValidationError("group must list integer indices");
        const auto i = x.get<std::int64_t>();
        if (i < 1 || i > c.parameters.d) throw ValidationError("group index out of range");
        g.push_back(static_cast<std::size_t>(i - 1));
      }
      c.group = std::move(g);
    }
    return c;
  });
}

Json to_json(const RunConfig& c) {
  Json axes = Json::array();
  for (const auto& a : c.axes) axes.push_back(Json{{"path", a.path}, {"values", a.values}});
  Json j{{"parameters", to_json(c.parameters)},
         {"grid", Json{{"R", c.grid.radius ? Json(*c.grid.radius) : Json("auto")},
                       {"n", c.grid.intervals}}},
         {"solver", to_json(c.solver)},
         {"classify", Json{{"margin_tol", c.classify.margin_tol}}},
         {"sweep", Json{{"axes", axes}, {"cap", c.sweep.cap}, {"workers", c.sweep.workers}}},
         {"output", Json{{"dir", c.output_dir.string()}}}};
  if (c.group) j["group"] = index_list(*c.group);
  return j;
}

RunConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const RunConfig& c) {
  Json j = to_json(c);
  // Neither affects results.
  j.erase("output");
  j["sweep"].erase("workers");
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k, h >>= 4) out[static_cast<std::size_t>(k)] = hex[h & 0xf];
  return out;
}

}  // namespace cnls

#include "cnls/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>

#include "cnls/phase.hpp"
#include "cnls/reduction.hpp"

namespace cnls {

namespace {

namespace fs = std::filesystem;

Provenance provenance(const RunConfig& c) { return {config_hash(c), version()}; }

Json stamped(const RunConfig& c, Json body) {
  body["config_hash"] = config_hash(c);
  body["version"] = version();
  return body;
}

Json grid_json(const GridPtr& g) {
  return Json{{"N", g->dimension()}, {"R", g->radius()}, {"n", g->intervals()}};
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ValidationError("cannot write '" + path.string() + "'");
  body(os);
  if (!os) throw ValidationError("failed writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const Json& j) {
  write_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto grid = c.grid.build(c.parameters.N, c.parameters.lambda);
  const auto r = ground_state(c.parameters, grid, c.solver);
  write_json(c.output_dir / "result.json",
             stamped(c, Json{{"parameters", to_json(c.parameters)},
                             {"grid", grid_json(grid)},
                             {"result", to_json(r)}}));
  write_file(c.output_dir / "profiles.csv",
             [&](std::ostream& os) { write_profiles_csv(os, r.fields, provenance(c)); });
  out << "level " << format_double(r.level) << '\n';
  out << "support " << r.support.to_string() << '\n';
  if (!r.converged) {
    err << "warning: solver did not converge (grad_norm " << format_double(r.grad_norm)
        << " after " << r.iterations << " iterations)\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_classify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto grid = c.grid.build(c.parameters.N, c.parameters.lambda);
  const auto v = classify(c.parameters, grid, c.solver, c.classify);
  write_json(c.output_dir / "verdict.json",
             stamped(c, Json{{"parameters", to_json(c.parameters)},
                             {"grid", grid_json(grid)},
                             {"verdict", to_json(v)}}));
  out << "verdict " << to_string(v.verdict) << '\n';
  out << "full_level " << format_double(v.numeric_full_level) << '\n';
  out << "semitrivial_level " << format_double(v.numeric_semitrivial_level) << '\n';
  out << "margin " << format_double(v.margin) << '\n';
  if (!v.converged) {
    err << "warning: " << v.diagnostics << '\n';
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto table = sweep(c.parameters, c.axes, c.grid, c.solver, c.sweep);
  write_file(c.output_dir / "sweep.csv",
             [&](std::ostream& os) { write_sweep_csv(os, table, provenance(c)); });
  std::size_t counts[3] = {0, 0, 0};
  bool converged = true;
  for (const auto& row : table.rows) {
    ++counts[static_cast<int>(row.verdict.verdict)];
    converged = converged && row.verdict.converged;
  }
  out << "points " << table.rows.size() << '\n';
  out << "fully_nontrivial " << counts[0] << '\n';
  out << "semitrivial " << counts[1] << '\n';
  out << "inconclusive " << counts[2] << '\n';
  if (!converged) {
    err << "warning: some sweep points did not converge\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_reduce(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (!c.group) throw ValidationError("reduce needs a \"group\" field in the config");
  const auto red = reduce_system(c.parameters, *c.group);
  Json mapping = Json::array();
  for (const auto& m : red.mapping) {
    Json e = Json::array();
    for (auto i : m) e.push_back(i + 1);
    mapping.push_back(e);
  }
  out << stamped(c, Json{{"reduced", to_json(red.reduced)},
                         {"sphere", to_json(red.sphere)},
                         {"mapping", mapping},
                         {"merged_index", red.merged_index + 1}})
             .dump(2)
      << '\n';
  return kExitOk;
}

int cmd_thresholds(const RunConfig& c, std::ostream& out, std::ostream&) {
  const auto& p = c.parameters;
  auto row = [&out](const std::string& key, const std::string& value) {
    out << std::left << std::setw(22) << key << value << '\n';
  };
  row("config_hash", config_hash(c));
  row("version", version());
  row("d", std::to_string(p.d));
  row("N", std::to_string(p.N));

  if (p.d >= 3) {
    std::vector<double> sorted(p.lambda);
    std::sort(sorted.begin(), sorted.end());
    const double omega = sorted[1] / sorted[0];
    const auto t12 = theorem12_condition(sorted, p.N);
    row("alpha_threshold", format_double(t12.alpha) + " (omega " + format_double(omega) + ")");
    row("tail_admissible", yes_no(t12.admissible) + " (ratio " + format_double(t12.ratio) +
                               (t12.admissible ? " < " : " >= ") + format_double(t12.alpha) +
                               ")");
    const auto t13 = theorem13_condition(p.lambda);
    row("lambda_admissible", yes_no(t13.admissible) + " (ratio " + format_double(t13.ratio) +
                                 (t13.admissible ? " < " : " >= ") + format_double(t13.alpha) +
                                 ")");
    const bool equal_lambda =
        std::all_of(p.lambda.begin(), p.lambda.end(),
                    [&](double l) { return nearly_equal(l, p.lambda.front()); });
    if (equal_lambda) {
      const auto s = beta_spread_condition(p);
      row("spread_condition", yes_no(s.holds) + " (gap " + format_double(s.alpha_gap) +
                                  ", spread " + format_double(s.spread) + ")");
    } else {
      row("spread_condition", "n/a (lambda not all equal)");
    }
  } else {
    row("alpha_threshold", "n/a (d < 3)");
    row("tail_admissible", "n/a (d < 3)");
    row("lambda_admissible", "n/a (d < 3)");
    row("spread_condition", "n/a (d < 3)");
  }

  const double bound = small_b_bound(p.mu);
  row("small_b_bound", format_double(bound));
  if (p.d >= 2 && p.has_constant_coupling())
    row("below_small_b_bound", yes_no(p.constant_coupling() < bound) + " (b " +
                                   format_double(p.constant_coupling()) + ")");
  else
    row("below_small_b_bound", "n/a (coupling not constant)");
  return kExitOk;
}

int cmd_selftest(const AcceptanceOptions& opts, std::ostream& out, std::ostream& err) {
  const auto results = run_acceptance(opts, [&](const CriterionResult& r) {
    out << report_line(r) << '\n' << std::flush;
    err << "criterion " << r.id << ": " << format_double(r.seconds) << " s (budget "
        << format_double(r.budget_seconds) << " s)\n";
  });
  const bool all = std::all_of(results.begin(), results.end(),
                               [](const CriterionResult& r) { return r.passed; });
  out << (all ? "all criteria passed" : "some criteria failed") << '\n';
  return all ? kExitOk : kExitUsage;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ground states of weakly coupled cubic Schrodinger systems on a radial grid",
               "cnls"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> workers;
  double fault = 1.0;

  const std::pair<const char*, const char*> commands[] = {
      {"solve", "Compute the ground state and write result.json and profiles.csv"},
      {"classify", "Classify the ground state and write verdict.json"},
      {"sweep", "Classify every point of a parameter grid and write sweep.csv"},
      {"reduce", "Merge a group of equal-lambda components and print the reduced system"},
      {"thresholds", "Print the analytic thresholds for the parameters"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "Override solver.seed");
    sub->add_option("--out", out_dir, "Override output.dir");
    sub->add_option("--workers", workers, "Override sweep.workers");
  }
  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suite");
  selftest->add_option("--fault-weights", fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (selftest->parsed()) return cmd_selftest(AcceptanceOptions{fault}, out, err);

    RunConfig c = read_config_file(config_path);
    if (seed) c.solver.seed = *seed;
    if (out_dir) c.output_dir = *out_dir;
    if (workers) c.sweep.workers = *workers;

    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "solve") return cmd_solve(c, out, err);
    if (name == "classify") return cmd_classify(c, out, err);
    if (name == "sweep") return cmd_sweep(c, out, err);
    if (name == "reduce") return cmd_reduce(c, out, err);
    return cmd_thresholds(c, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace cnls

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cnls/grid.hpp"
#include "cnls/params.hpp"
#include "cnls/phase.hpp"
#include "cnls/reduction.hpp"
#include "cnls/solver.hpp"

namespace cnls {

using Json = nlohmann::json;

/// Library version string ("0.1.0").
const char* version();

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double x);

Json to_json(const ParameterSet& p);
/// Accepts {"d", "N", "lambda", "mu", "b"}; "b" is a full d x d matrix (its
/// diagonal is ignored) or a single number for a constant coupling.
ParameterSet parameters_from_json(const Json& j);

Json to_json(const SolverOptions& o);
/// Missing keys keep their defaults; unknown keys are rejected.
SolverOptions solver_options_from_json(const Json& j);

Json to_json(const IndexSet& s);
Json to_json(const ActionBreakdown& a);
Json to_json(const GroundStateResult& r);
Json to_json(const PhaseVerdict& v);
Json to_json(const SphereMaxResult& s);

struct Provenance {
  std::string config_hash;
  std::string version;
};

/// Columns r, u_1..u_d, config_hash, version.
void write_profiles_csv(std::ostream& os, const MultiField& u, const Provenance& prov);

/// Columns: swept paths, full_level, semitrivial_level, margin, verdict,
/// certificate_held, one column per analytic predicate (true/false/na),
/// config_hash, version.
void write_sweep_csv(std::ostream& os, const SweepTable& table, const Provenance& prov);

struct RunConfig {
  ParameterSet parameters;
  GridSpec grid;
  SolverOptions solver;
  ClassifyOptions classify;
  std::vector<SweepAxis> axes;
  SweepOptions sweep;
  std::filesystem::path output_dir = ".";
  /// 0-based; read from a 1-based "group" array.
  std::optional<std::vector<std::size_t>> group;
};

/// Schema:
///   {"parameters": {...},
///    "grid": {"R": number | "auto", "n": int >= 100},
///    "solver": {...SolverOptions...},
///    "classify": {"margin_tol": number},
///    "sweep": {"axes": [{"path": str, "values": [...]}
///                       | {"path": str, "start": x, "stop": y, "step": h}],
///              "cap": int, "workers": int},
///    "output": {"dir": str},
///    "group": [1-based indices]}
/// Only "parameters" is required.
RunConfig config_from_json(const Json& j);
Json to_json(const RunConfig& c);
RunConfig read_config_file(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical JSON form of the config, as 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace cnls

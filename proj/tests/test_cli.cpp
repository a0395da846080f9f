#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cnls/commands.hpp"

using namespace cnls;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cnls");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Workspace {
 public:
  explicit Workspace(const std::string& name) : dir_(fs::temp_directory_path() / ("cnls_cli_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }

  std::string config(const std::string& body) const {
    const auto path = dir_ / "config.json";
    std::ofstream(path) << body;
    return path.string();
  }
  fs::path path(const std::string& name) const { return dir_ / name; }
  std::string out_dir() const { return (dir_ / "out").string(); }

 private:
  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string value_of(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    if (line.rfind(key + " ", 0) == 0) {
      const auto start = line.find_first_not_of(' ', key.size());
      return line.substr(start);
    }
  }
  return "";
}

const char* kSingle = R"({"parameters": {"d": 1, "N": 1, "lambda": [1], "mu": [1], "b": 0},
                          "grid": {"R": 20, "n": 4000}})";

}  // namespace

TEST_CASE("solve a single equation") {
  Workspace ws("solve");
  const auto r = cli({"solve", ws.config(kSingle), "--out", ws.out_dir()});
  CHECK(r.code == kExitOk);
  CHECK(std::abs(std::stod(value_of(r.out, "level")) - 4.0 / 3.0) <= 1e-3 * 4.0 / 3.0);
  CHECK(value_of(r.out, "support") == "{1}");

  const auto result = Json::parse(slurp(ws.path("out/result.json")));
  CHECK(result["result"]["converged"] == true);
  CHECK(result["result"]["support"] == Json({1}));
  CHECK(result["config_hash"].get<std::string>().size() == 16);
  CHECK(result["version"] == "0.1.0");

  const auto csv = slurp(ws.path("out/profiles.csv"));
  CHECK(csv.rfind("r,u_1,config_hash,version\n", 0) == 0);
  CHECK(csv.find(result["config_hash"].get<std::string>()) != std::string::npos);
}

TEST_CASE("invalid parameters exit with a usage error") {
  Workspace ws("invalid");
  const auto r = cli({"solve", ws.config(R"({"parameters": {"d": 2, "N": 1, "lambda": [1, 1],
                                              "mu": [1, -1], "b": 1}})"),
                      "--out", ws.out_dir()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("positivity violated") != std::string::npos);
  CHECK_FALSE(fs::exists(ws.path("out/result.json")));
}

TEST_CASE("an iteration cap exits with the non-convergence code") {
  Workspace ws("cap");
  const auto r = cli({"solve",
                      ws.config(R"({"parameters": {"d": 1, "N": 1, "lambda": [1], "mu": [1], "b": 0},
                                    "grid": {"R": 20, "n": 400}, "solver": {"max_iterations": 1}})"),
                      "--out", ws.out_dir()});
  CHECK(r.code == kExitNotConverged);
  CHECK(r.err.find("did not converge") != std::string::npos);
  const auto result = Json::parse(slurp(ws.path("out/result.json")));
  CHECK(result["result"]["converged"] == false);
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"solve"}).code == kExitUsage);
  CHECK(cli({"solve", "/nonexistent/config.json"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
  Workspace ws("usage");
  CHECK(cli({"solve", ws.config(kSingle), "--seed", "minus"}).code == kExitUsage);
  CHECK(cli({"solve", ws.config(R"({"parameters": {"d": 1, "N": 1, "lambda": [1], "mu": [1], "b": 0},
                                    "typo": 1})")})
            .code == kExitUsage);
}

TEST_CASE("thresholds table") {
  Workspace ws("thresholds");
  const auto r = cli({"thresholds", ws.config(R"({"parameters": {"d": 3, "N": 3, "lambda": [1, 1, 2],
                                                   "mu": [1, 1, 1], "b": 0.5}})")});
  CHECK(r.code == kExitOk);
  CHECK(std::stod(value_of(r.out, "alpha_threshold")) == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(value_of(r.out, "tail_admissible").rfind("yes", 0) == 0);
  CHECK(std::stod(value_of(r.out, "small_b_bound")) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(value_of(r.out, "below_small_b_bound").rfind("yes", 0) == 0);
  CHECK(value_of(r.out, "lambda_admissible").rfind("no", 0) == 0);
  CHECK(value_of(r.out, "spread_condition").rfind("n/a", 0) == 0);
  CHECK(value_of(r.out, "version") == "0.1.0");
  CHECK(value_of(r.out, "config_hash").size() == 16);
}

TEST_CASE("reduce prints the merged system") {
  Workspace ws("reduce");
  const auto r = cli({"reduce", ws.config(R"({"parameters": {"d": 3, "N": 1, "lambda": [1, 1, 2],
                                               "mu": [1, 1, 1], "b": 3}, "group": [1, 2]})")});
  REQUIRE(r.code == kExitOk);
  const auto j = Json::parse(r.out);
  CHECK(j["reduced"]["lambda"] == Json({1.0, 2.0}));
  CHECK(j["reduced"]["mu"][0].get<double>() == doctest::Approx(2.0));
  CHECK(j["reduced"]["mu"][1].get<double>() == 1.0);
  CHECK(j["mapping"] == Json::parse("[[1, 2], [3]]"));
  CHECK(j["merged_index"] == 1);
  CHECK(j["sphere"]["regime"] == "interior");
  CHECK(j["version"] == "0.1.0");
}

TEST_CASE("reduce errors") {
  Workspace ws("reduce_errors");
  auto r = cli({"reduce", ws.config(R"({"parameters": {"d": 3, "N": 1, "lambda": [1, 1, 2], "mu": [1, 1, 1],
                                         "b": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]}, "group": [1, 2]})")});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("constant coupling") != std::string::npos);
  r = cli({"reduce", ws.config(R"({"parameters": {"d": 2, "N": 1, "lambda": [1, 1], "mu": [1, 1], "b": 1}})")});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("group") != std::string::npos);
}

TEST_CASE("classify writes a verdict") {
  Workspace ws("classify");
  const auto r = cli({"classify",
                      ws.config(R"({"parameters": {"d": 2, "N": 1, "lambda": [1, 1], "mu": [1, 1], "b": 3},
                                    "grid": {"n": 1000}})"),
                      "--out", ws.out_dir()});
  CHECK(r.code == kExitOk);
  CHECK(value_of(r.out, "verdict") == "fully_nontrivial");
  const auto v = Json::parse(slurp(ws.path("out/verdict.json")));
  CHECK(v["verdict"]["verdict"] == "fully_nontrivial");
  CHECK(v["verdict"]["full_support"] == Json({1, 2}));
  CHECK(v["verdict"]["predicates"]["theorem12"].is_null());
  CHECK(v["grid"]["n"] == 1000);
}

TEST_CASE("sweep writes one row per point and ignores the worker count") {
  Workspace ws("sweep");
  const auto config = ws.config(R"({"parameters": {"d": 2, "N": 1, "lambda": [1, 1], "mu": [1, 1], "b": 1},
                                    "grid": {"n": 400},
                                    "sweep": {"axes": [{"path": "b", "values": [0.5, 3]}]}})");
  auto r = cli({"sweep", config, "--out", ws.out_dir()});
  CHECK(r.code == kExitOk);
  CHECK(value_of(r.out, "points") == "2");
  CHECK(value_of(r.out, "semitrivial") == "1");
  CHECK(value_of(r.out, "fully_nontrivial") == "1");
  const auto one = slurp(ws.path("out/sweep.csv"));
  r = cli({"sweep", config, "--out", ws.out_dir(), "--workers", "2"});
  CHECK(r.code == kExitOk);
  CHECK(slurp(ws.path("out/sweep.csv")) == one);
  CHECK(one.rfind("b,full_level,", 0) == 0);
}

TEST_CASE("a sweep without axes has one row") {
  Workspace ws("sweep_single");
  const auto r = cli({"sweep",
                      ws.config(R"({"parameters": {"d": 2, "N": 1, "lambda": [1, 1], "mu": [1, 1], "b": 3},
                                    "grid": {"n": 400}})"),
                      "--out", ws.out_dir()});
  CHECK(r.code == kExitOk);
  CHECK(value_of(r.out, "points") == "1");
  std::istringstream csv(slurp(ws.path("out/sweep.csv")));
  std::string header, row, extra;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(header.rfind("full_level,", 0) == 0);
  CHECK(row.find("fully_nontrivial") != std::string::npos);
  CHECK_FALSE(std::getline(csv, extra));
}

TEST_CASE("seed override changes the hash") {
  Workspace ws("seed");
  const auto config = ws.config(kSingle);
  const auto a = value_of(cli({"thresholds", config}).out, "config_hash");
  const auto b = value_of(cli({"thresholds", config, "--seed", "5"}).out, "config_hash");
  const auto c = value_of(cli({"thresholds", config, "--out", "/tmp/elsewhere"}).out, "config_hash");
  CHECK(a != b);
  CHECK(a == c);
}

TEST_CASE("selftest is reproducible and detects a corrupted quadrature") {
  const auto first = cli({"selftest"});
  CHECK(first.code == kExitOk);
  CHECK(first.out.find("[FAIL]") == std::string::npos);
  CHECK(first.out.find("all criteria passed") != std::string::npos);
  const auto second = cli({"selftest"});
  CHECK(second.out == first.out);

  const auto faulty = cli({"selftest", "--fault-weights", "1.01"});
  CHECK(faulty.code != kExitOk);
  CHECK(faulty.out.find("[FAIL]") != std::string::npos);
}

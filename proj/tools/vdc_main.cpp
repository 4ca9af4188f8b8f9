// Copyright 2026 the vdc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: tune | run | compare | sweep over scenario files.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vdc/scenario.hpp"
#include "vdc/simulation.hpp"
#include "vdc/trace_io.hpp"
#include "vdc/tune.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadScenario = 1;
constexpr int kExitAborted = 2;
constexpr int kExitIoError = 3;

struct GlobalOpts {
  std::string scenario_file;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  bool timing = false;
};

vdc::Scenario load(const GlobalOpts& g) {
  if (g.scenario_file.empty())
    throw vdc::ScenarioError("scenario: --scenario <file> is required");
  vdc::Scenario sc = vdc::load_scenario(g.scenario_file);
  if (g.seed) sc.seed = *g.seed;
  return sc;
}

std::filesystem::path ensure_out_dir(const GlobalOpts& g) {
  std::filesystem::path dir(g.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string());
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

int cmd_run(const GlobalOpts& g) {
  const vdc::Scenario sc = load(g);
  vdc::RunOptions opt;
  opt.timing = g.timing;
  const vdc::RunResult res = vdc::run(sc, opt);

  const auto dir = ensure_out_dir(g);
  const std::string stem = res.scenario_name + "_" + vdc::cost_mode_name(res.cost_mode);
  vdc::export_csv(res.trace, (dir / (stem + ".csv")).string());
  write_text(dir / (stem + "_summary.txt"), vdc::summary_table(res));
  write_text(dir / (stem + "_summary.kv"), vdc::summary_kv(res));
  if (!g.quiet) std::cout << vdc::summary_table(res);

  if (res.summary.aborted) {
    std::cerr << "simulation aborted: " << res.summary.abort_reason << '\n';
    return kExitAborted;
  }
  return kExitOk;
}

int cmd_compare(const GlobalOpts& g) {
  const vdc::Scenario sc = load(g);
  vdc::RunOptions opt;
  opt.timing = g.timing;
  const vdc::CompareReport rep = vdc::compare(sc, opt);

  const auto dir = ensure_out_dir(g);
  vdc::export_csv(rep.standard.trace,
                  (dir / (sc.name + "_standard.csv")).string());
  vdc::export_csv(rep.enhanced.trace,
                  (dir / (sc.name + "_enhanced.csv")).string());
  write_text(dir / (sc.name + "_compare.txt"), vdc::comparison_table(rep));
  write_text(dir / (sc.name + "_compare.kv"), vdc::comparison_kv(rep));
  if (!g.quiet) std::cout << vdc::comparison_table(rep);

  if (rep.standard.summary.aborted || rep.enhanced.summary.aborted) {
    std::cerr << "simulation aborted in at least one mode\n";
    return kExitAborted;
  }
  return kExitOk;
}

int cmd_tune(const GlobalOpts& g) {
  const vdc::Scenario sc = load(g);
  const vdc::TuneResult res = vdc::tune_pid(sc, g.seed);

  const auto dir = ensure_out_dir(g);
  std::ostringstream kv;
  kv << "kp=" << vdc::format_double(res.gains.kp) << '\n'
     << "ki=" << vdc::format_double(res.gains.ki) << '\n'
     << "kd=" << vdc::format_double(res.gains.kd) << '\n'
     << "mse=" << vdc::format_double(res.mse) << '\n';
  write_text(dir / (sc.name + "_gains.kv"), kv.str());
  std::ostringstream hist;
  vdc::write_history_csv(hist, res.search.history);
  write_text(dir / (sc.name + "_pso_history.csv"), hist.str());
  if (!g.quiet) {
    std::cout << "tuned gains for " << sc.name << ":\n" << kv.str();
  }
  return kExitOk;
}

int cmd_sweep(const GlobalOpts& g, const std::string& key,
              const std::vector<double>& values) {
  if (g.scenario_file.empty())
    throw vdc::ScenarioError("scenario: --scenario <file> is required");
  std::ifstream f(g.scenario_file);
  if (!f) throw std::runtime_error("cannot open " + g.scenario_file);
  nlohmann::json base;
  try {
    f >> base;
  } catch (const nlohmann::json::exception& e) {
    throw vdc::ScenarioError(std::string("scenario: JSON parse error: ") + e.what());
  }

  // dotted key -> JSON pointer, e.g. mpc.beta -> /mpc/beta
  std::string pointer = "/";
  for (char c : key) pointer += (c == '.') ? '/' : c;

  const auto dir = ensure_out_dir(g);
  std::ostringstream table;
  table << "sweep: " << key << '\n';
  std::ostringstream kv;
  bool any_aborted = false;
  for (double value : values) {
    nlohmann::json patched = base;
    patched[nlohmann::json::json_pointer(pointer)] = value;
    vdc::Scenario sc = vdc::scenario_from_json(patched);
    if (g.seed) sc.seed = *g.seed;
    vdc::RunOptions opt;
    opt.timing = g.timing;
    const vdc::RunResult res = vdc::run(sc, opt);
    any_aborted = any_aborted || res.summary.aborted;

    table << "  " << key << "=" << vdc::format_double(value)
          << "  position_mse=" << vdc::format_double(res.summary.position_mse)
          << "  heading_mse=" << vdc::format_double(res.summary.heading_mse)
          << "  speed_mse=" << vdc::format_double(res.summary.speed_mse)
          << (res.summary.aborted ? "  ABORTED" : "") << '\n';
    kv << key << "=" << vdc::format_double(value)
       << " position_mse=" << vdc::format_double(res.summary.position_mse) << '\n';
  }
  write_text(dir / "sweep.txt", table.str());
  write_text(dir / "sweep.kv", kv.str());
  if (!g.quiet) std::cout << table.str();
  return any_aborted ? kExitAborted : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coordinated longitudinal/lateral vehicle control simulator"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--scenario", g.scenario_file, "scenario JSON file")
      ->expected(1);
  app.add_option("--out", g.out_dir, "output directory (default: out)");
  std::uint64_t seed_raw = 0;
  auto* seed_opt = app.add_option("--seed", seed_raw, "override the scenario seed");
  app.add_flag("--quiet", g.quiet, "suppress stdout reporting");
  app.add_flag("--timing", g.timing,
               "record wall-clock solve times in the trace (breaks byte-exact "
               "reproducibility of the solve_ms column)");

  auto* run_cmd = app.add_subcommand("run", "run one scenario and export its trace");
  auto* compare_cmd =
      app.add_subcommand("compare", "run both cost modes and report side by side");
  auto* tune_cmd =
      app.add_subcommand("tune", "swarm-search PID gains for a scenario");
  auto* sweep_cmd =
      app.add_subcommand("sweep", "re-run while varying one scenario key");
  std::string sweep_key;
  std::vector<double> sweep_values;
  sweep_cmd->add_option("--key", sweep_key, "dotted scenario key, e.g. mpc.beta")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "values to sweep")
      ->required()
      ->expected(-1);

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) g.seed = seed_raw;

  try {
    if (*run_cmd) return cmd_run(g);
    if (*compare_cmd) return cmd_compare(g);
    if (*tune_cmd) return cmd_tune(g);
    if (*sweep_cmd) return cmd_sweep(g, sweep_key, sweep_values);
  } catch (const vdc::ScenarioError& e) {
    std::cerr << e.what() << '\n';
    return kExitBadScenario;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitIoError;
  }
  return kExitOk;
}

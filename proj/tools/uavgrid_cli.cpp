// Copyright 2026 The uavgrid Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// uavgrid: run experiment specs, observation sweeps, the reference
// oracles, and the canned result tables.
//
// Exit status: 0 success, 1 a check or run failed, 2 usage / spec / file
// errors.

#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uavgrid/harness.hpp"
#include "uavgrid/oracles.hpp"

namespace {

using namespace uavgrid;

constexpr int kUsageError = 2;

struct Common {
  std::string out_dir;
  bool no_timing = false;
  bool dump = false;
  int threads = 1;

  std::filesystem::path dir() const { return out_dir.empty() ? output_dir() : std::filesystem::path(out_dir); }
  CsvOptions csv() const { return {!no_timing}; }

  void apply(ExperimentSpec& s) const {
    if (threads > 1) s.threads = threads;
    if (dump) s.dump_dir = (dir() / "artifacts").string();
  }
};

int report(const BatchResult& b, const std::filesystem::path& dir, const std::string& stem, const Common& c) {
  write_batch(dir, stem, b, c.csv());
  std::cout << format_rows(b.rows);
  int errors = 0;
  for (const auto& [spec, details] : b.runs) {
    for (const auto& d : details) {
      if (!d.error.empty()) {
        std::cerr << spec.name << " replication " << d.index << ": " << d.error << '\n';
        ++errors;
      }
    }
  }
  std::cout << "wrote " << (dir / (stem + ".csv")).string() << '\n';
  return errors > 0 ? 1 : 0;
}

int run_oracles(int grad_cases, int plan_cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < grad_cases; ++i) {
    const auto c = oracle::random_gradient_case(rng);
    worst = std::max(worst, oracle::check_gradient(c.net, c.input, c.target, c.mask).max_rel_error);
  }
  const bool grad_ok = worst <= 1e-4;
  std::cout << (grad_ok ? "PASS" : "FAIL") << "  gradient oracle: " << grad_cases
            << " random networks, max relative error " << worst << " (limit 1e-4)\n";

  int agree = 0;
  int feasible = 0;
  for (int i = 0; i < plan_cases; ++i) {
    const auto pc = oracle::random_plan_case(rng);
    const auto r = oracle::compare_with_enumeration(pc);
    agree += r.agree;
    feasible += r.feasible;
    if (!r.agree) {
      std::cout << "  instance " << i << ": solver " << r.solver << " enumeration " << r.enumeration << ' '
                << r.route_error << '\n';
    }
  }
  const bool plan_ok = agree == plan_cases;
  std::cout << (plan_ok ? "PASS" : "FAIL") << "  planner oracle: " << agree << '/' << plan_cases
            << " instances match exhaustive enumeration (" << feasible << " feasible)\n";
  return grad_ok && plan_ok ? 0 : 1;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in list '" + s + "'");
    }
    if (used != item.size() || v < 0) throw ConfigError("bad number '" + item + "' in list '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward-collecting grid game against patrolling adversaries: experiments and checks"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Common common;
  app.add_option("-o,--out", common.out_dir, "Output directory (default: $UAVGRID_OUT_DIR or ./results)");
  app.add_flag("--no-timing", common.no_timing, "Leave wall-time columns empty (byte-identical reruns)");
  app.add_flag("--dump", common.dump, "Write per-replication Q-tables, networks or traces under <out>/artifacts");
  app.add_option("-j,--threads", common.threads, "Replications run in parallel")->check(CLI::PositiveNumber);

  std::string spec_file;
  auto* run = app.add_subcommand("run", "Run one experiment spec");
  run->add_option("spec", spec_file, "JSON experiment spec")->required();

  std::string n_obs_list;
  auto* sweep = app.add_subcommand("sweep", "Run an online spec once per observation count");
  sweep->add_option("--n-obs", n_obs_list, "Comma-separated observation counts, e.g. 10,25,50,75")->required();
  sweep->add_option("spec", spec_file, "JSON experiment spec (method online)")->required();

  int grad_cases = 20;
  int plan_cases = 200;
  std::uint64_t oracle_seed = 2024;
  auto* oracles = app.add_subcommand("oracle-check", "Check backprop and the planner against reference oracles");
  oracles->add_option("--gradient-cases", grad_cases)->check(CLI::PositiveNumber);
  oracles->add_option("--plan-cases", plan_cases)->check(CLI::PositiveNumber);
  oracles->add_option("--seed", oracle_seed);

  int table_id = 0;
  int reps = 0;
  std::uint64_t base_seed = 1;
  auto* table = app.add_subcommand("table", "Run a canned result table (1, 2, 3, 4, 7 or 8)");
  table->add_option("id", table_id, "Table number")->required()->check(CLI::IsMember(kCannedTables));
  table->add_option("--reps", reps, "Replications per row (default depends on the table)")
      ->check(CLI::PositiveNumber);
  table->add_option("--seed", base_seed, "Base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*run) {
      ExperimentSpec spec = load_experiment(spec_file);
      common.apply(spec);
      return report(run_batch({spec}), common.dir(), spec.name, common);
    }
    if (*sweep) {
      ExperimentSpec spec = load_experiment(spec_file);
      common.apply(spec);
      auto specs = sweep_specs(spec, parse_int_list(n_obs_list));
      const int status = report(run_batch(specs), common.dir(), spec.name + "_sweep", common);
      std::cout << "wrote " << (common.dir() / (spec.name + "_sweep_curve.csv")).string() << '\n';
      return status;
    }
    if (*oracles) return run_oracles(grad_cases, plan_cases, oracle_seed);
    if (*table) {
      auto specs = table_specs(table_id, reps > 0 ? reps : default_table_reps(table_id), base_seed);
      for (auto& s : specs) common.apply(s);
      const std::string stem = "table" + std::to_string(table_id);
      const BatchResult b = run_batch(specs);
      const int status = report(b, common.dir(), stem, common);
      if (table_id == 1) {
        std::cout << "\ntraining wins (averages)      successes  optimal  wins|succ  optwins|opt  wins|fail  optwins|fail"
                     "  one-off\n";
        for (const auto& [spec, details] : b.runs) {
          const TabularBreakdown t = tabular_breakdown(details);
          auto show = [](const std::optional<double>& v) { return v ? fixed(*v, 1) : std::string("NA"); };
          char line[256];
          std::snprintf(line, sizeof line, "%-29s %9d %8d %10s %12s %10s %13s %8d\n", movement_label(spec.game).c_str(),
                        t.successes, t.optimal_successes, show(t.wins_if_successful).c_str(),
                        show(t.optimal_wins_if_optimal).c_str(), show(t.wins_if_not_successful).c_str(),
                        show(t.optimal_wins_if_not_successful).c_str(), t.one_action_from_optimal);
          std::cout << line;
        }
      }
      return status;
    }
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsageError;
}

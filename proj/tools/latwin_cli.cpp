//  Copyright 2026 The latwin Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

// Command-line driver for the sweeps, trace replay and the oracle suite.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "latwin/errors.hpp"
#include "latwin/experiment.hpp"
#include "latwin/oracle_check.hpp"
#include "latwin/simulator.hpp"
#include "latwin/trace_io.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = "results";
  std::uint64_t seed = 0;
  std::size_t seeds = 0;
  std::uint64_t lat_budget = 0;
  std::size_t w = 0;
  std::size_t threads = 0;
  std::string lifetime;
  bool timing = false;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw latwin::ConfigError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

latwin::ExperimentConfig load(const Options& opt, CLI::App& sub) {
  latwin::ExperimentConfig config;
  if (!opt.config_path.empty()) {
    config = latwin::experiment_config_from_json(slurp(opt.config_path));
  }
  if (sub.count("--seed")) config.sim.seed = opt.seed;
  if (sub.count("--seeds")) config.seeds = opt.seeds;
  if (sub.count("--lat-budget")) config.lat_budget = opt.lat_budget;
  if (sub.count("--w")) config.sim.w = opt.w;
  if (sub.count("--threads")) config.threads = opt.threads;
  if (sub.count("--lifetime")) {
    config.sim.lifetime = latwin::parse_duration(opt.lifetime);
  }
  config.timing = opt.timing;
  config.validate();
  return config;
}

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config_path, "experiment config JSON");
  sub->add_option("--seed", opt.seed, "base RNG seed");
  sub->add_option("--out", opt.out_dir, "output directory")
      ->capture_default_str();
  sub->add_option("--seeds", opt.seeds, "seeds per sweep point");
  sub->add_option("--lat-budget", opt.lat_budget,
                  "node budget of the full-lattice count");
  sub->add_option("--w", opt.w, "window size where a sweep holds it fixed");
  sub->add_option("--lifetime", opt.lifetime, "simulated lifetime, e.g. 2h");
  sub->add_option("--threads", opt.threads, "worker threads (0: all cores)");
  sub->add_flag("--timing", opt.timing,
                "include t_latwin_us (output no longer reproducible)");
}

void print_summary(const latwin::SweepResult& result, const std::string& dir) {
  std::cout << result.sweep << ": " << result.rows.size() / 2
            << " points written to " << dir << "\n";
  if (result.theta_fit) std::cout << "theta_fit " << *result.theta_fit << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliding-window lattice of consistent global states"};
  app.require_subcommand(1);
  Options opt;

  auto* benefit = app.add_subcommand("benefit", "perc_det/perc_s over w");
  auto* window = app.add_subcommand("window", "Lat-Win cost over w");
  auto* delay = app.add_subcommand("delay", "metrics over mean_delay");
  auto* nprocs = app.add_subcommand("nprocs", "metrics over n, theta fit");
  auto* replay = app.add_subcommand("replay", "run a JSON-lines trace");
  auto* simulate =
      app.add_subcommand("simulate", "write one simulated trace as JSON lines");
  auto* oracle = app.add_subcommand("oracle-check",
                                    "randomized engine vs full lattice suite");
  for (auto* sub : {benefit, window, delay, nprocs, replay, simulate}) {
    add_common(sub, opt);
  }

  std::string trace_path, event_log;
  replay->add_option("--trace", trace_path, "JSON-lines trace")->required();
  replay->add_option("--event-log", event_log, "write UpdateReports here");
  std::string sim_out;
  simulate->add_option("--trace-out", sim_out, "destination file")->required();

  latwin::OracleCheckOptions oracle_opt;
  oracle->add_option("--traces", oracle_opt.traces, "number of traces")
      ->capture_default_str();
  oracle->add_option("--seed", oracle_opt.seed, "RNG seed")
      ->capture_default_str();
  oracle->add_option("--max-events", oracle_opt.max_events,
                     "events per process, at most")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (oracle->parsed()) {
      auto report = latwin::run_oracle_check(oracle_opt);
      std::cout << "traces " << report.traces << " steps " << report.steps
                << "\n"
                << "node_mismatches " << report.node_mismatches << "\n"
                << "edge_mismatches " << report.edge_mismatches << "\n"
                << "lattice_violations " << report.lattice_violations << "\n"
                << "anchor_violations " << report.anchor_violations << "\n"
                << "bound_violations " << report.bound_violations << "\n"
                << "order_divergences " << report.order_divergences << "\n";
      for (const auto& f : report.failures) std::cout << "  " << f << "\n";
      std::cout << (report.passed() ? "PASS" : "FAIL") << "\n";
      return report.passed() ? 0 : 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    latwin::ExperimentConfig config = load(opt, *sub);

    if (simulate->parsed()) {
      latwin::Trace trace = latwin::generate(config.sim);
      std::ofstream out(sim_out);
      if (!out) throw std::runtime_error("cannot write " + sim_out);
      latwin::write_replay(out, latwin::deliver(trace, config.sim));
      std::cout << trace.total_states() << " states written to " << sim_out
                << "\n";
      return 0;
    }

    latwin::SweepResult result;
    if (benefit->parsed()) {
      result = latwin::run_benefit_sweep(config);
    } else if (window->parsed()) {
      result = latwin::run_window_sweep(config);
    } else if (delay->parsed()) {
      result = latwin::run_delay_sweep(config);
    } else if (nprocs->parsed()) {
      result = latwin::run_n_sweep(config);
    } else {
      std::ifstream in(trace_path);
      if (!in) throw latwin::IngestError("cannot read " + trace_path);
      auto records = latwin::read_replay(in);
      latwin::Trace trace = latwin::trace_from_records(records);
      std::vector<latwin::LocalState> arrivals;
      arrivals.reserve(records.size());
      for (const auto& r : records) arrivals.push_back(r.state);
      result = latwin::run_replay(config, trace, arrivals, event_log);
    }
    latwin::emit(result, config, opt.out_dir);
    print_summary(result, opt.out_dir);
    return 0;
  } catch (const latwin::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latwin/detection.hpp"
#include "latwin/engine.hpp"
#include "latwin/simulator.hpp"
#include "latwin/trace.hpp"

namespace latwin {

struct ExperimentConfig {
  SimConfig sim;
  std::size_t seeds = 10;
  std::uint64_t lat_budget = 10'000'000;
  bool timing = false;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::vector<std::size_t> w_values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> delays{0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<std::size_t> n_values{2, 3, 4, 5, 6};
  /// Locals of the detected conjunction for replayed traces; simulated
  /// sweeps always use every process's "active" flag.
  std::optional<Property> property;

  void validate() const;
};

/// {"sim": {...}, "seeds", "lat_budget", "w_values", "delays", "n_values",
///  "property": {"name", "locals"}}; every key optional.
ExperimentConfig experiment_config_from_json(const std::string& text);

constexpr std::array<Modality, 2> kModalities{Modality::definitely,
                                              Modality::possibly};

/// Detection counts of one modality for one run.
struct DetectionCounts {
  std::uint64_t latwin = 0;    // occurrences the windowed checker found
  std::uint64_t lat = 0;       // occurrences the unbounded checker found
  std::uint64_t physical = 0;  // windowed detections that really overlapped
};

/// Metrics of one trace replayed through one window size.
struct RunMetrics {
  std::size_t w = 0;
  DetectionCounts counts[2];  // indexed like kModalities
  double s_latwin = 0.0;      // mean node count over advances
  double t_latwin_us = 0.0;   // mean engine advance time
  std::uint64_t s_lat = 0;
  bool lat_truncated = false;
  std::size_t max_nodes = 0;
  std::uint64_t max_grow_candidates = 0;
  std::size_t max_prune_removed = 0;

  double perc_det(std::size_t m) const;
  double perc_s() const;
  double prob_det(std::size_t m) const;
};

/// Replays `arrivals` (any order; reassembled per process) through one
/// engine per window size and through the unbounded baseline.
std::vector<RunMetrics> evaluate_trace(const Trace& trace,
                                       const std::vector<LocalState>& arrivals,
                                       const Property& prop,
                                       const std::vector<std::size_t>& ws,
                                       std::uint64_t lat_budget,
                                       const std::string& event_log = {});

struct Stat {
  double mean = 0.0;
  double sd = 0.0;
};

/// One sweep point for one modality, aggregated over seeds.
struct MetricsRow {
  std::string sweep;
  double param = 0.0;
  Modality modality = Modality::definitely;
  std::size_t seed_count = 0;
  Stat perc_det, perc_s, prob_det, s_latwin, t_latwin_us;
  std::optional<double> theta_fit;
  bool lat_truncated = false;
  std::uint64_t n_latwin = 0, n_lat = 0, n_physical = 0;  // summed over seeds
  std::size_t max_nodes = 0;
  std::uint64_t max_grow_candidates = 0;
  std::size_t max_prune_removed = 0;
};

struct SweepResult {
  std::string sweep;
  std::vector<MetricsRow> rows;  // all definitely rows, then possibly rows
  std::optional<double> theta_fit;
};

SweepResult run_benefit_sweep(const ExperimentConfig& config);
SweepResult run_window_sweep(const ExperimentConfig& config);
SweepResult run_delay_sweep(const ExperimentConfig& config);
SweepResult run_n_sweep(const ExperimentConfig& config);

/// Single-trace run over replayed records at window config.sim.w.
SweepResult run_replay(const ExperimentConfig& config, const Trace& trace,
                       const std::vector<LocalState>& arrivals,
                       const std::string& event_log = {});

/// Least-squares fit of ln s = n ln(theta w) through the origin.
std::optional<double> fit_theta(const std::vector<std::size_t>& ns,
                                const std::vector<double>& sizes,
                                std::size_t w);

inline constexpr const char* kCsvHeader =
    "sweep,param,seed_count,perc_det,perc_s,prob_det,s_latwin,t_latwin_us,"
    "theta_fit";

/// CSV text for the rows of one modality. t_latwin_us is left empty unless
/// `timing` is set, keeping outputs byte-identical across runs.
std::string to_csv(const SweepResult& result, Modality modality, bool timing);
std::string to_json(const SweepResult& result, const ExperimentConfig& config,
                    bool timing);

/// Writes <dir>/<sweep>-definitely.csv, <sweep>-possibly.csv and
/// <sweep>.json. Throws std::runtime_error when the directory is unwritable.
void emit(const SweepResult& result, const ExperimentConfig& config,
          const std::string& dir);

}  // namespace latwin

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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "latwin/clock.hpp"
#include "latwin/detection.hpp"
#include "latwin/trace.hpp"

namespace latwin {

/// Durations are seconds; rates are per process-hour.
struct SimConfig {
  std::size_t n = 3;
  std::uint64_t seed = 1;
  double mean_activity = 25.0 * 60.0;
  double mean_gap = 5.0 * 60.0;
  double sample_period = 60.0;
  double mean_delay = 0.5;
  double lifetime = 2.0 * 3600.0;
  double peer_msg_rate = 6.0;
  std::size_t w = 4;

  /// Throws ConfigError on non-positive durations or n == 0. mean_delay
  /// and peer_msg_rate may be zero.
  void validate() const;
};

/// Parses "25min", "0.5s", "2h", "150ms" or a bare number of seconds.
double parse_duration(const std::string& text);

/// Name of the single boolean predicate every simulated payload carries.
inline constexpr const char* kActive = "active";

/// The smart-office property: every process active at once.
Property all_active(std::size_t n, Modality modality);

/// Seeded run: alternating exponential active/idle phases, periodic sample
/// ticks, Poisson peer messages with exponential delays. Every phase
/// change, tick, send and receive is an event that opens a new state.
Trace generate(const SimConfig& config);

struct Delivery {
  double arrival = 0.0;
  double begin = 0.0;  // physical begin of the state
  LocalState state;
};

/// Each state reaches the checker at its begin time plus an exponential
/// delay; the schedule is sorted by (arrival, process, index).
std::vector<Delivery> deliver(const Trace& trace, const SimConfig& config);

/// True iff some instant in [t0, t1] has every local predicate of `prop`
/// holding in physical time.
bool ground_truth(const Trace& trace, const Property& prop, double t0,
                  double t1);

/// Small random run for oracle suites: 1..max_events events per process,
/// random sends/receives and random "active" payloads. True time is the
/// global step counter.
Trace random_trace(std::size_t n, std::size_t max_events, double msg_prob,
                   std::uint64_t seed);

}  // namespace latwin

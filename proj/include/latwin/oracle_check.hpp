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
#include <functional>
#include <string>
#include <vector>

#include "latwin/engine.hpp"
#include "latwin/lattice.hpp"

namespace latwin {

struct OracleCheckOptions {
  std::size_t traces = 500;
  std::uint64_t seed = 1;
  std::size_t max_events = 25;
  std::vector<std::size_t> process_counts{2, 3};
  std::vector<std::size_t> window_sizes{1, 2, 3, 4};
  double msg_prob = 0.3;
};

/// Violation counters of the randomized engine-vs-LAT comparison. Traces
/// cycle through every (n, w) combination; states are delivered to the
/// engine in a shuffled order.
struct OracleCheckReport {
  std::uint64_t traces = 0;
  std::uint64_t steps = 0;
  std::uint64_t node_mismatches = 0;
  std::uint64_t edge_mismatches = 0;
  std::uint64_t lattice_violations = 0;  // closure, distributivity, convexity
  std::uint64_t anchor_violations = 0;
  std::uint64_t bound_violations = 0;  // nodes, grow work, prune work
  std::uint64_t order_divergences = 0;  // grow-first vs prune-first
  std::vector<std::string> failures;    // first few, for diagnostics

  bool passed() const {
    return node_mismatches + edge_mismatches + lattice_violations +
               anchor_violations + bound_violations + order_divergences ==
           0;
  }
};

/// Called after every advance with the snapshot, its full lattice and the
/// window size, for checks layered on top of the suite.
using ViewVisitor =
    std::function<void(const LatWinView&, const FullLattice&, std::size_t w)>;

OracleCheckReport run_oracle_check(const OracleCheckOptions& options,
                                   const ViewVisitor& visit = {});

}  // namespace latwin

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
#include <string>
#include <vector>

#include "latwin/clock.hpp"

namespace latwin {

/// One local state of a recorded run together with its ground-truth
/// physical interval. The state begins with event `begin_kind`.
struct TraceState {
  LocalState state;
  EventKind begin_kind = EventKind::internal;
  double begin = 0.0;  // seconds
  double end = 0.0;
};

struct MessageRecord {
  ProcessId from = 0;
  StateIndex send_index = 0;  // index of the send event on `from`
  ProcessId to = 0;
  StateIndex receive_index = 0;
  double delay = 0.0;
};

struct EventRecord {
  EventId id;
  VectorClock clock;
  double true_time = 0.0;
};

/// A complete run of n processes. states[k][i] is s^(k)_i; event e^(k)_i
/// begins it, so events and states are in one-to-one correspondence.
struct Trace {
  std::size_t n = 0;
  std::vector<std::string> schema;
  std::vector<std::vector<TraceState>> states;
  std::vector<MessageRecord> messages;
  double lifetime = 0.0;

  const LocalState& state(ProcessId k, StateIndex i) const {
    return states[k][i].state;
  }
  std::size_t state_count(ProcessId k) const { return states[k].size(); }
  std::size_t total_states() const;

  /// Events in (true_time, process, index) order.
  std::vector<EventRecord> events() const;

  /// Throws IngestError unless every process has gapless indices from 0,
  /// clock lengths equal n and clock[k] == index + 1.
  void validate() const;
};

}  // namespace latwin

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
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

namespace latwin {

using ProcessId = std::size_t;
using StateIndex = std::uint32_t;

/// Fixed-length vector timestamp. Component k counts the events of process k
/// known to have happened, so the i-th event (0-based) of process k carries
/// component k equal to i + 1.
class VectorClock {
 public:
  VectorClock() = default;
  explicit VectorClock(std::size_t n) : components_(n, 0) {}
  explicit VectorClock(std::vector<std::uint32_t> components)
      : components_(std::move(components)) {}
  VectorClock(std::initializer_list<std::uint32_t> components)
      : components_(components) {}

  std::size_t size() const { return components_.size(); }
  std::uint32_t operator[](std::size_t k) const { return components_[k]; }
  const std::vector<std::uint32_t>& components() const { return components_; }

  /// Records one more local event on process k.
  void tick(ProcessId k) { ++components_.at(k); }

  /// Componentwise <=. Throws ConfigError on length mismatch.
  bool dominated_by(const VectorClock& other) const;

  friend bool operator==(const VectorClock&, const VectorClock&) = default;

 private:
  std::vector<std::uint32_t> components_;
};

/// Componentwise maximum; ConfigError if the lengths differ.
VectorClock merge(const VectorClock& a, const VectorClock& b);

enum class EventKind { internal, send, receive };

const char* to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& name);

/// e^(k)_i: the index-th event of a process.
struct EventId {
  ProcessId process = 0;
  StateIndex index = 0;
  EventKind kind = EventKind::internal;

  friend bool operator==(const EventId& a, const EventId& b) {
    return a.process == b.process && a.index == b.index;
  }
};

bool event_happens_before(const EventId& a, const VectorClock& a_clock,
                          const EventId& b, const VectorClock& b_clock);

/// Truth values of the local predicates, keyed by predicate name.
using Payload = std::map<std::string, bool>;

/// s^(k)_i, the interval between events e^(k)_i and e^(k)_(i+1). The clock is
/// the clock of the beginning event, so clock[process] == index + 1.
struct LocalState {
  ProcessId process = 0;
  StateIndex index = 0;
  VectorClock clock;
  std::uint64_t seq = 0;
  Payload payload;
};

/// The ending of s1 happens before (or is) the beginning of s2.
bool state_happens_before(const LocalState& s1, const LocalState& s2);

/// Neither state happens before the other. Throws DomainError when both
/// states live on the same process.
bool concurrent(const LocalState& s1, const LocalState& s2);

}  // namespace latwin

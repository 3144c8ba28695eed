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

#include "latwin/clock.hpp"

#include <algorithm>

#include "latwin/errors.hpp"

namespace latwin {

namespace {

void require_same_length(const VectorClock& a, const VectorClock& b) {
  if (a.size() != b.size()) {
    throw ConfigError("vector clock length mismatch: " +
                      std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()));
  }
}

}  // namespace

bool VectorClock::dominated_by(const VectorClock& other) const {
  require_same_length(*this, other);
  for (std::size_t k = 0; k < size(); ++k) {
    if (components_[k] > other.components_[k]) return false;
  }
  return true;
}

VectorClock merge(const VectorClock& a, const VectorClock& b) {
  require_same_length(a, b);
  std::vector<std::uint32_t> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = std::max(a[k], b[k]);
  return VectorClock(std::move(out));
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::internal:
      return "internal";
    case EventKind::send:
      return "send";
    case EventKind::receive:
      return "receive";
  }
  return "internal";
}

EventKind event_kind_from_string(const std::string& name) {
  if (name == "internal") return EventKind::internal;
  if (name == "send") return EventKind::send;
  if (name == "receive") return EventKind::receive;
  throw ConfigError("unknown event kind '" + name + "'");
}

bool event_happens_before(const EventId& a, const VectorClock& a_clock,
                          const EventId& b, const VectorClock& b_clock) {
  if (a == b) return false;
  if (a.process == b.process) return a.index < b.index;
  // b has seen the first (a.index + 1) events of a's process, a included.
  return a_clock[a.process] <= b_clock[a.process];
}

bool state_happens_before(const LocalState& s1, const LocalState& s2) {
  if (s1.process == s2.process) return s1.index < s2.index;
  // s1 ends with e^(i)_(index+1), the (index+2)-th event of process i.
  return s2.clock[s1.process] >= s1.index + 2;
}

bool concurrent(const LocalState& s1, const LocalState& s2) {
  if (s1.process == s2.process) {
    throw DomainError("concurrent(): states s" + std::to_string(s1.index) +
                      " and s" + std::to_string(s2.index) +
                      " share process " + std::to_string(s1.process));
  }
  return !state_happens_before(s1, s2) && !state_happens_before(s2, s1);
}

}  // namespace latwin

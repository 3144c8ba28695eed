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

#include "latwin/trace.hpp"

#include <algorithm>
#include <tuple>

#include "latwin/errors.hpp"

namespace latwin {

std::size_t Trace::total_states() const {
  std::size_t total = 0;
  for (const auto& per_process : states) total += per_process.size();
  return total;
}

std::vector<EventRecord> Trace::events() const {
  std::vector<EventRecord> out;
  out.reserve(total_states());
  for (const auto& per_process : states) {
    for (const auto& ts : per_process) {
      out.push_back(EventRecord{
          EventId{ts.state.process, ts.state.index, ts.begin_kind},
          ts.state.clock, ts.begin});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EventRecord& a, const EventRecord& b) {
                     return std::tie(a.true_time, a.id.process, a.id.index) <
                            std::tie(b.true_time, b.id.process, b.id.index);
                   });
  return out;
}

void Trace::validate() const {
  if (states.size() != n) {
    throw IngestError("trace declares " + std::to_string(n) +
                      " processes but holds " + std::to_string(states.size()));
  }
  for (ProcessId k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < states[k].size(); ++i) {
      const LocalState& s = states[k][i].state;
      if (s.process != k || s.index != i) {
        throw IngestError("trace gap on process " + std::to_string(k) +
                          ": expected index " + std::to_string(i) +
                          ", found " + std::to_string(s.index));
      }
      if (s.clock.size() != n || s.clock[k] != i + 1) {
        throw IngestError("bad clock on s^(" + std::to_string(k) + ")_" +
                          std::to_string(i));
      }
    }
  }
}

}  // namespace latwin

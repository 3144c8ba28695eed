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

#include <iosfwd>
#include <string>
#include <vector>

#include "latwin/clock.hpp"
#include "latwin/simulator.hpp"
#include "latwin/trace.hpp"

namespace latwin {

/// One line of the replay format:
/// {"process", "index", "seq", "clock", "payload", "true_time_begin"}.
struct ReplayRecord {
  LocalState state;
  double true_time_begin = 0.0;
};

std::string to_json_line(const ReplayRecord& record);
ReplayRecord replay_record_from_json(const std::string& line);

/// Writes the schedule in arrival order, one record per line.
void write_replay(std::ostream& out, const std::vector<Delivery>& schedule);

/// Reads records until end of stream, skipping blank lines. IngestError
/// names the offending line on malformed input.
std::vector<ReplayRecord> read_replay(std::istream& in);

/// Rebuilds a trace from replay records. State ends are the next begin on
/// the same process, or the latest begin seen for the final states.
/// Messages are not recoverable and are left empty.
Trace trace_from_records(const std::vector<ReplayRecord>& records);

/// SimConfig as a JSON object. Durations may be numbers (seconds) or
/// strings with units; unknown keys raise ConfigError.
SimConfig sim_config_from_json(const std::string& text);
std::string sim_config_to_json(const SimConfig& config);

}  // namespace latwin

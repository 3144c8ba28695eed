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

#include "latwin/trace_io.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>

#include "json.hpp"
#include "latwin/errors.hpp"

namespace latwin {

using nlohmann::json;

std::string to_json_line(const ReplayRecord& record) {
  const LocalState& s = record.state;
  json doc;
  doc["process"] = s.process;
  doc["index"] = s.index;
  doc["seq"] = s.seq;
  doc["clock"] = s.clock.components();
  doc["payload"] = s.payload;
  doc["true_time_begin"] = record.true_time_begin;
  return doc.dump();
}

ReplayRecord replay_record_from_json(const std::string& line) {
  ReplayRecord record;
  try {
    json doc = json::parse(line);
    LocalState& s = record.state;
    s.process = doc.at("process").get<ProcessId>();
    s.index = doc.at("index").get<StateIndex>();
    s.seq = doc.contains("seq") ? doc["seq"].get<std::uint64_t>() : s.index;
    s.clock = VectorClock(doc.at("clock").get<std::vector<std::uint32_t>>());
    s.payload = doc.at("payload").get<Payload>();
    record.true_time_begin = doc.value("true_time_begin", 0.0);
  } catch (const json::exception& e) {
    throw IngestError(std::string("malformed replay record: ") + e.what());
  }
  return record;
}

void write_replay(std::ostream& out, const std::vector<Delivery>& schedule) {
  for (const Delivery& d : schedule) {
    out << to_json_line({d.state, d.begin}) << '\n';
  }
}

std::vector<ReplayRecord> read_replay(std::istream& in) {
  std::vector<ReplayRecord> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (std::all_of(line.begin(), line.end(),
                    [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    try {
      out.push_back(replay_record_from_json(line));
    } catch (const IngestError& e) {
      throw IngestError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

Trace trace_from_records(const std::vector<ReplayRecord>& records) {
  Trace trace;
  if (records.empty()) return trace;
  trace.n = records.front().state.clock.size();
  trace.states.resize(trace.n);
  for (const auto& [name, value] : records.front().state.payload) {
    trace.schema.push_back(name);
  }
  double latest = 0.0;
  for (const ReplayRecord& r : records) {
    const LocalState& s = r.state;
    if (s.process >= trace.n) {
      throw IngestError("record names process " + std::to_string(s.process) +
                        " but clocks have length " + std::to_string(trace.n));
    }
    if (s.payload.size() != trace.schema.size() ||
        !std::all_of(trace.schema.begin(), trace.schema.end(),
                     [&](const std::string& k) { return s.payload.count(k); })) {
      throw IngestError("payload keys differ between records");
    }
    TraceState ts;
    ts.state = s;
    ts.begin = r.true_time_begin;
    trace.states[s.process].push_back(std::move(ts));
    latest = std::max(latest, r.true_time_begin);
  }
  for (auto& per_process : trace.states) {
    std::sort(per_process.begin(), per_process.end(),
              [](const TraceState& a, const TraceState& b) {
                return a.state.index < b.state.index;
              });
    for (std::size_t i = 0; i < per_process.size(); ++i) {
      per_process[i].end =
          i + 1 < per_process.size() ? per_process[i + 1].begin : latest;
    }
  }
  trace.lifetime = latest;
  trace.validate();
  return trace;
}

namespace {

double duration_field(const json& value, const std::string& key) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return parse_duration(value.get<std::string>());
  throw ConfigError("field '" + key + "' must be a number or a duration string");
}

}  // namespace

SimConfig sim_config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  SimConfig config;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "n") {
        config.n = value.get<std::size_t>();
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "w") {
        config.w = value.get<std::size_t>();
      } else if (key == "peer_msg_rate") {
        config.peer_msg_rate = value.get<double>();
      } else if (key == "mean_activity") {
        config.mean_activity = duration_field(value, key);
      } else if (key == "mean_gap") {
        config.mean_gap = duration_field(value, key);
      } else if (key == "sample_period") {
        config.sample_period = duration_field(value, key);
      } else if (key == "mean_delay") {
        config.mean_delay = duration_field(value, key);
      } else if (key == "lifetime") {
        config.lifetime = duration_field(value, key);
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  config.validate();
  return config;
}

std::string sim_config_to_json(const SimConfig& config) {
  json doc;
  doc["n"] = config.n;
  doc["seed"] = config.seed;
  doc["mean_activity"] = config.mean_activity;
  doc["mean_gap"] = config.mean_gap;
  doc["sample_period"] = config.sample_period;
  doc["mean_delay"] = config.mean_delay;
  doc["lifetime"] = config.lifetime;
  doc["peer_msg_rate"] = config.peer_msg_rate;
  doc["w"] = config.w;
  return doc.dump(2);
}

}  // namespace latwin

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

#include "latwin/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <tuple>

#include "latwin/errors.hpp"

namespace latwin {

void SimConfig::validate() const {
  if (n == 0) throw ConfigError("n must be at least 1");
  if (w == 0) throw ConfigError("w must be at least 1");
  if (!(mean_activity > 0) || !(mean_gap > 0) || !(sample_period > 0) ||
      !(lifetime > 0)) {
    throw ConfigError("durations must be positive");
  }
  if (!(mean_delay >= 0) || !(peer_msg_rate >= 0)) {
    throw ConfigError("mean_delay and peer_msg_rate must be non-negative");
  }
}

double parse_duration(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse duration '" + text + "'");
  }
  std::string unit = text.substr(used);
  unit.erase(std::remove_if(unit.begin(), unit.end(),
                            [](unsigned char c) { return std::isspace(c); }),
             unit.end());
  double scale = 0.0;
  if (unit.empty() || unit == "s" || unit == "sec") {
    scale = 1.0;
  } else if (unit == "ms") {
    scale = 1e-3;
  } else if (unit == "min" || unit == "m") {
    scale = 60.0;
  } else if (unit == "h" || unit == "hr") {
    scale = 3600.0;
  } else {
    throw ConfigError("unknown duration unit in '" + text + "'");
  }
  if (!std::isfinite(value)) throw ConfigError("duration is not finite");
  return value * scale;
}

Property all_active(std::size_t n, Modality modality) {
  return Property{"all_active", std::vector<std::string>(n, kActive),
                  modality};
}

namespace {

// Independent streams so that changing one parameter (say the delay) leaves
// the draws of the others untouched.
enum Stream : std::uint64_t { kStructure = 1, kMessageDelay = 2, kDelivery = 3 };

std::mt19937_64 stream(std::uint64_t seed, Stream id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

double unit_exponential(std::mt19937_64& rng) {
  return std::exponential_distribution<double>(1.0)(rng);
}

struct PendingEvent {
  double time = 0.0;
  int rank = 0;  // sends before internals before receives at equal times
  ProcessId process = 0;
  std::size_t order = 0;  // creation order, final tie-break
  EventKind kind = EventKind::internal;
  bool toggles = false;     // phase boundary
  std::size_t message = 0;  // index into messages for send/receive
};

}  // namespace

Trace generate(const SimConfig& config) {
  config.validate();
  const std::size_t n = config.n;
  auto rng = stream(config.seed, kStructure);
  auto delay_rng = stream(config.seed, kMessageDelay);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<PendingEvent> pending;
  std::vector<bool> initially_active(n);
  std::vector<MessageRecord> messages;
  std::vector<std::pair<double, double>> message_times;  // send, receive

  const double p_active =
      config.mean_activity / (config.mean_activity + config.mean_gap);
  for (ProcessId k = 0; k < n; ++k) {
    bool active = unit(rng) < p_active;
    initially_active[k] = active;
    for (double t = 0.0;;) {
      t += unit_exponential(rng) *
           (active ? config.mean_activity : config.mean_gap);
      if (t >= config.lifetime) break;
      pending.push_back({t, 1, k, pending.size(), EventKind::internal, true, 0});
      active = !active;
    }
    const double offset = config.sample_period * (1.0 - unit(rng));
    for (double t = offset; t < config.lifetime; t += config.sample_period) {
      pending.push_back({t, 1, k, pending.size(), EventKind::internal, false, 0});
    }
    if (n < 2 || config.peer_msg_rate <= 0) continue;
    const double mean_gap_s = 3600.0 / config.peer_msg_rate;
    for (double t = unit_exponential(rng) * mean_gap_s; t < config.lifetime;
         t += unit_exponential(rng) * mean_gap_s) {
      std::uniform_int_distribution<std::size_t> peer(0, n - 2);
      ProcessId to = peer(rng);
      if (to >= k) ++to;
      const double delay = unit_exponential(delay_rng) * config.mean_delay;
      if (t + delay >= config.lifetime) continue;
      const std::size_t m = messages.size();
      messages.push_back({k, 0, to, 0, delay});
      message_times.emplace_back(t, t + delay);
      pending.push_back({t, 0, k, pending.size(), EventKind::send, false, m});
      pending.push_back(
          {t + delay, 2, to, pending.size(), EventKind::receive, false, m});
    }
  }
  std::sort(pending.begin(), pending.end(),
            [](const PendingEvent& a, const PendingEvent& b) {
              return std::tie(a.time, a.rank, a.order) <
                     std::tie(b.time, b.rank, b.order);
            });

  Trace trace;
  trace.n = n;
  trace.schema = {kActive};
  trace.lifetime = config.lifetime;
  trace.states.resize(n);
  std::vector<VectorClock> clock(n, VectorClock(n));
  std::vector<bool> active = initially_active;
  std::vector<VectorClock> sent_clock(messages.size());

  auto open_state = [&](ProcessId k, EventKind kind, double t) {
    clock[k].tick(k);
    TraceState ts;
    ts.state.process = k;
    ts.state.index = static_cast<StateIndex>(trace.states[k].size());
    ts.state.seq = ts.state.index;
    ts.state.clock = clock[k];
    ts.state.payload = {{kActive, active[k]}};
    ts.begin_kind = kind;
    ts.begin = t;
    if (!trace.states[k].empty()) trace.states[k].back().end = t;
    trace.states[k].push_back(std::move(ts));
  };

  for (ProcessId k = 0; k < n; ++k) open_state(k, EventKind::internal, 0.0);
  for (const PendingEvent& ev : pending) {
    const ProcessId k = ev.process;
    switch (ev.kind) {
      case EventKind::internal:
        if (ev.toggles) active[k] = !active[k];
        open_state(k, ev.kind, ev.time);
        break;
      case EventKind::send:
        open_state(k, ev.kind, ev.time);
        messages[ev.message].send_index = trace.states[k].back().state.index;
        sent_clock[ev.message] = clock[k];
        break;
      case EventKind::receive:
        clock[k] = merge(clock[k], sent_clock[ev.message]);
        open_state(k, ev.kind, ev.time);
        messages[ev.message].receive_index =
            trace.states[k].back().state.index;
        break;
    }
  }
  for (auto& per_process : trace.states) per_process.back().end = config.lifetime;
  trace.messages = std::move(messages);
  return trace;
}

std::vector<Delivery> deliver(const Trace& trace, const SimConfig& config) {
  auto rng = stream(config.seed, kDelivery);
  std::vector<Delivery> out;
  out.reserve(trace.total_states());
  for (const auto& per_process : trace.states) {
    for (const auto& ts : per_process) {
      out.push_back({ts.begin + unit_exponential(rng) * config.mean_delay,
                     ts.begin, ts.state});
    }
  }
  std::sort(out.begin(), out.end(), [](const Delivery& a, const Delivery& b) {
    return std::tie(a.arrival, a.state.process, a.state.index) <
           std::tie(b.arrival, b.state.process, b.state.index);
  });
  return out;
}

bool ground_truth(const Trace& trace, const Property& prop, double t0,
                  double t1) {
  if (t0 > t1) throw DomainError("ground truth span is reversed");
  check_schema(prop, trace.schema);
  // Running intersection of half-open [begin, end) intervals.
  std::vector<std::pair<double, double>> common{{t0, std::nextafter(t1, INFINITY)}};
  for (std::size_t k = 0; k < trace.n && !common.empty(); ++k) {
    std::vector<std::pair<double, double>> mine;
    for (const auto& ts : trace.states[k]) {
      if (!ts.state.payload.at(prop.locals[k])) continue;
      if (!mine.empty() && mine.back().second >= ts.begin) {
        mine.back().second = std::max(mine.back().second, ts.end);
      } else {
        mine.emplace_back(ts.begin, ts.end);
      }
    }
    std::vector<std::pair<double, double>> next;
    std::size_t a = 0, b = 0;
    while (a < common.size() && b < mine.size()) {
      double lo = std::max(common[a].first, mine[b].first);
      double hi = std::min(common[a].second, mine[b].second);
      if (lo < hi) next.emplace_back(lo, hi);
      if (common[a].second < mine[b].second) {
        ++a;
      } else {
        ++b;
      }
    }
    common = std::move(next);
  }
  return !common.empty();
}

Trace random_trace(std::size_t n, std::size_t max_events, double msg_prob,
                   std::uint64_t seed) {
  if (n == 0 || max_events == 0) {
    throw ConfigError("random_trace needs n >= 1 and max_events >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> events(1, max_events);
  Trace trace;
  trace.n = n;
  trace.schema = {kActive};
  trace.states.resize(n);
  std::vector<std::size_t> budget(n);
  for (auto& b : budget) b = events(rng);
  std::vector<VectorClock> clock(n, VectorClock(n));
  // Messages in flight per destination: (sender clock, message index).
  std::vector<std::vector<std::pair<VectorClock, std::size_t>>> inbox(n);
  double now = 0.0;

  auto open_state = [&](ProcessId k, EventKind kind) {
    clock[k].tick(k);
    TraceState ts;
    ts.state.process = k;
    ts.state.index = static_cast<StateIndex>(trace.states[k].size());
    ts.state.seq = ts.state.index;
    ts.state.clock = clock[k];
    ts.state.payload = {{kActive, unit(rng) < 0.5}};
    ts.begin_kind = kind;
    ts.begin = now;
    if (!trace.states[k].empty()) trace.states[k].back().end = now;
    trace.states[k].push_back(std::move(ts));
    --budget[k];
  };

  while (true) {
    std::vector<ProcessId> live;
    for (ProcessId k = 0; k < n; ++k) {
      if (budget[k] > 0) live.push_back(k);
    }
    if (live.empty()) break;
    ProcessId k = live[std::uniform_int_distribution<std::size_t>(
        0, live.size() - 1)(rng)];
    now += 1.0;
    const bool first = trace.states[k].empty();
    double roll = unit(rng);
    if (!first && !inbox[k].empty() && roll < msg_prob) {
      std::size_t pick = std::uniform_int_distribution<std::size_t>(
          0, inbox[k].size() - 1)(rng);
      auto [sent, m] = inbox[k][pick];
      inbox[k].erase(inbox[k].begin() + static_cast<std::ptrdiff_t>(pick));
      clock[k] = merge(clock[k], sent);
      open_state(k, EventKind::receive);
      trace.messages[m].receive_index = trace.states[k].back().state.index;
      trace.messages[m].delay = now - trace.messages[m].delay;
    } else if (!first && n > 1 && roll < 2 * msg_prob) {
      ProcessId to =
          std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
      if (to >= k) ++to;
      open_state(k, EventKind::send);
      // delay holds the send time until the receive fills it in
      trace.messages.push_back(
          {k, trace.states[k].back().state.index, to, 0, now});
      inbox[to].emplace_back(clock[k], trace.messages.size() - 1);
    } else {
      open_state(k, EventKind::internal);
    }
  }
  // Drop messages that were never received.
  std::vector<MessageRecord> received;
  for (std::size_t m = 0; m < trace.messages.size(); ++m) {
    bool pending = false;
    for (const auto& box : inbox) {
      for (const auto& entry : box) pending = pending || entry.second == m;
    }
    if (!pending) received.push_back(trace.messages[m]);
  }
  trace.messages = std::move(received);
  now += 1.0;
  for (auto& per_process : trace.states) per_process.back().end = now;
  trace.lifetime = now;
  return trace;
}

}  // namespace latwin

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

#include "latwin/detection.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "latwin/errors.hpp"

namespace latwin {

const char* to_string(Modality m) {
  return m == Modality::possibly ? "possibly" : "definitely";
}

Modality modality_from_string(const std::string& name) {
  if (name == "possibly") return Modality::possibly;
  if (name == "definitely") return Modality::definitely;
  throw ConfigError("unknown modality '" + name + "'");
}

void check_schema(const Property& prop,
                  const std::vector<std::string>& schema) {
  for (const auto& local : prop.locals) {
    if (std::find(schema.begin(), schema.end(), local) == schema.end()) {
      throw SchemaError("property '" + prop.name +
                        "' references unknown predicate '" + local + "'");
    }
  }
}

namespace {

bool payload_value(const LocalState& s, const std::string& name) {
  auto it = s.payload.find(name);
  if (it == s.payload.end()) {
    throw SchemaError("state " + std::to_string(s.index) + " of process " +
                      std::to_string(s.process) + " has no predicate '" +
                      name + "'");
  }
  return it->second;
}

// Breadth-first search from c_min over nodes rejected by `blocked`;
// returns whether c_max is reachable, and fills `visited`.
bool reaches_max(const LatWinView& view,
                 const std::function<bool(std::size_t)>& blocked,
                 std::vector<bool>& visited) {
  const std::size_t start = *view.position(*view.c_min);
  const std::size_t goal = *view.position(*view.c_max);
  visited.assign(view.nodes.size(), false);
  if (blocked(start)) return false;
  std::vector<std::size_t> queue{start};
  visited[start] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::size_t at = queue[head];
    if (at == goal) return true;
    for (std::size_t next : view.succ[at]) {
      if (!visited[next] && !blocked(next)) {
        visited[next] = true;
        queue.push_back(next);
      }
    }
  }
  return false;
}

}  // namespace

bool eval_cgs(const Cut& c, const Property& prop, const LatWinView& view) {
  if (prop.locals.size() != view.n || c.size() != view.n) {
    throw SchemaError("property '" + prop.name + "' has " +
                      std::to_string(prop.locals.size()) +
                      " locals for a view of " + std::to_string(view.n) +
                      " processes");
  }
  bool all = true;
  for (std::size_t k = 0; k < view.n; ++k) {
    // Evaluate every coordinate so schema errors are never masked.
    all = payload_value(view.local(k, c[k]), prop.locals[k]) && all;
  }
  return all;
}

DetectionOutcome detect(const Property& prop, const LatWinView& view) {
  DetectionOutcome out;
  if (view.empty()) return out;
  std::vector<bool> sat(view.nodes.size());
  for (std::size_t i = 0; i < view.nodes.size(); ++i) {
    sat[i] = eval_cgs(view.nodes[i], prop, view);
  }
  if (prop.modality == Modality::possibly) {
    auto it = std::find(sat.begin(), sat.end(), true);
    if (it != sat.end()) {
      out.holds = true;
      out.witness = view.nodes[it - sat.begin()];
    }
    return out;
  }
  std::vector<bool> visited;
  if (reaches_max(view, [&](std::size_t i) { return sat[i]; }, visited)) {
    return out;
  }
  out.holds = true;
  const std::size_t start = *view.position(*view.c_min);
  if (sat[start]) {
    out.cut_set.push_back(view.nodes[start]);
    return out;
  }
  std::vector<bool> listed(view.nodes.size(), false);
  for (std::size_t i = 0; i < view.nodes.size(); ++i) {
    if (!visited[i]) continue;
    for (std::size_t next : view.succ[i]) {
      if (sat[next] && !listed[next]) {
        listed[next] = true;
        out.cut_set.push_back(view.nodes[next]);
      }
    }
  }
  std::sort(out.cut_set.begin(), out.cut_set.end());
  return out;
}

IntervalIndex::IntervalIndex(const Trace& trace, const Property& prop) {
  if (prop.locals.size() != trace.n) {
    throw SchemaError("property '" + prop.name + "' has " +
                      std::to_string(prop.locals.size()) + " locals for " +
                      std::to_string(trace.n) + " processes");
  }
  check_schema(prop, trace.schema);
  start_.resize(trace.n);
  runs_.resize(trace.n);
  for (std::size_t k = 0; k < trace.n; ++k) {
    const auto& states = trace.states[k];
    start_[k].assign(states.size(), kFalse);
    for (StateIndex i = 0; i < states.size(); ++i) {
      if (!payload_value(states[i].state, prop.locals[k])) continue;
      if (i > 0 && start_[k][i - 1] != kFalse) {
        start_[k][i] = start_[k][i - 1];
        runs_[k].back().second = i;
      } else {
        start_[k][i] = i;
        runs_[k].emplace_back(i, i);
      }
    }
  }
}

StateIndex IntervalIndex::run_end(ProcessId k, StateIndex first) const {
  const auto& runs = runs_[k];
  auto it = std::lower_bound(
      runs.begin(), runs.end(), first,
      [](const auto& run, StateIndex v) { return run.first < v; });
  if (it == runs.end() || it->first != first) {
    throw DomainError("no run of process " + std::to_string(k) +
                      " starts at " + std::to_string(first));
  }
  return it->second;
}

std::optional<Occurrence> IntervalIndex::occurrence_of(const Cut& cut) const {
  Occurrence occ(cut.size());
  for (std::size_t k = 0; k < cut.size(); ++k) {
    occ[k] = run_start(k, cut[k]);
    if (occ[k] == kFalse) return std::nullopt;
  }
  return occ;
}

bool IntervalIndex::in_box(const Cut& cut, const Occurrence& occ) const {
  for (std::size_t k = 0; k < cut.size(); ++k) {
    if (run_start(k, cut[k]) != occ[k]) return false;
  }
  return true;
}

std::vector<Occurrence> windowed_occurrences(Modality modality,
                                             const LatWinView& view,
                                             const IntervalIndex& index) {
  std::map<Occurrence, std::size_t> present;
  for (const Cut& c : view.nodes) {
    if (auto occ = index.occurrence_of(c)) ++present[*occ];
  }
  std::vector<Occurrence> out;
  std::vector<bool> visited;
  for (const auto& [occ, count] : present) {
    if (modality == Modality::definitely) {
      auto blocked = [&](std::size_t i) {
        return index.in_box(view.nodes[i], occ);
      };
      if (reaches_max(view, blocked, visited)) continue;
    }
    out.push_back(occ);
  }
  return out;
}

std::vector<Occurrence> candidate_occurrences(const Trace& trace,
                                              const IntervalIndex& index) {
  const std::size_t n = trace.n;
  std::vector<Occurrence> out;
  if (n == 0) return out;
  const auto& runs = index.runs();
  Occurrence first(n), last(n);
  std::function<void(std::size_t)> place = [&](std::size_t j) {
    if (j == n) {
      out.push_back(first);
      return;
    }
    for (const auto& [a, b] : runs[j]) {
      bool ok = true;
      for (std::size_t i = 0; i < j && ok; ++i) {
        ok = !state_happens_before(trace.state(i, last[i]),
                                   trace.state(j, a)) &&
             !state_happens_before(trace.state(j, b),
                                   trace.state(i, first[i]));
      }
      if (!ok) continue;
      first[j] = a;
      last[j] = b;
      place(j + 1);
    }
  };
  place(0);
  std::sort(out.begin(), out.end());
  return out;
}

Cut greatest_cgs_below(const Trace& trace, Cut bound) {
  const std::size_t n = trace.n;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        // s_i[x] -> s_j[y] only gets easier as y grows, so y must drop.
        while (bound[j] > 0 && state_happens_before(trace.state(i, bound[i]),
                                                    trace.state(j, bound[j]))) {
          --bound[j];
          changed = true;
        }
      }
    }
  }
  return bound;
}

PrefixBaseline::PrefixBaseline(const Trace& trace, const IntervalIndex& index,
                               std::vector<Occurrence> candidates)
    : trace_(trace),
      index_(index),
      candidates_(std::move(candidates)),
      hit_possibly_(candidates_.size(), false),
      hit_definitely_(candidates_.size(), false),
      delivered_(trace.n, -1) {}

void PrefixBaseline::advance(ProcessId k, StateIndex i) {
  if (static_cast<std::int64_t>(i) != delivered_.at(k) + 1) {
    throw DomainError("baseline expects states in order per process");
  }
  delivered_[k] = i;
  if (std::any_of(delivered_.begin(), delivered_.end(),
                  [](std::int64_t d) { return d < 0; })) {
    return;
  }
  Cut bound(delivered_.begin(), delivered_.end());
  top_ = greatest_cgs_below(trace_, std::move(bound));
  for (std::size_t c = 0; c < candidates_.size(); ++c) {
    if (hit_possibly_[c] && hit_definitely_[c]) continue;
    if (!leads_to(candidates_[c], *top_)) continue;
    if (!hit_possibly_[c]) {
      hit_possibly_[c] = holds(candidates_[c], *top_, Modality::possibly);
    }
    if (!hit_definitely_[c]) {
      hit_definitely_[c] = holds(candidates_[c], *top_, Modality::definitely);
    }
  }
}

std::vector<Occurrence> PrefixBaseline::detected(Modality modality) const {
  const auto& hit =
      modality == Modality::possibly ? hit_possibly_ : hit_definitely_;
  std::vector<Occurrence> out;
  for (std::size_t c = 0; c < candidates_.size(); ++c) {
    if (hit[c]) out.push_back(candidates_[c]);
  }
  return out;
}

bool PrefixBaseline::holds(const Occurrence& occ, const Cut& top,
                           Modality modality) const {
  const std::size_t n = occ.size();
  if (!leads_to(occ, top)) return false;
  std::vector<StateIndex> last(n);
  for (std::size_t k = 0; k < n; ++k) last[k] = index_.run_end(k, occ[k]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (modality == Modality::possibly) {
        // The part of run i visible below top must not end before run j
        // starts.
        StateIndex visible = std::min(last[i], top[i]);
        if (state_happens_before(trace_.state(i, visible),
                                 trace_.state(j, occ[j]))) {
          return false;
        }
      } else {
        // Run i must start before run j ends; a run holding the initial
        // state starts before everything and a run still open at top never
        // ends.
        if (occ[i] == 0 || last[j] >= top[j]) continue;
        if (trace_.state(j, last[j] + 1).clock[i] < occ[i] + 1) return false;
      }
    }
  }
  return true;
}

}  // namespace latwin

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

// Independent reference computations used only by the tests. None of them
// look at vector clocks except where the clocks are the thing compared.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "latwin/detection.hpp"
#include "latwin/engine.hpp"
#include "latwin/lattice.hpp"
#include "latwin/trace.hpp"

namespace oracle {

using latwin::Cut;
using latwin::StateIndex;

/// Transitive closure of program order and message edges over events.
class EventDag {
 public:
  explicit EventDag(const latwin::Trace& trace) : trace_(trace) {
    for (std::size_t k = 0; k < trace.n; ++k) {
      offset_.push_back(total_);
      total_ += trace.states[k].size();
    }
    adj_.resize(total_);
    for (std::size_t k = 0; k < trace.n; ++k) {
      for (std::size_t i = 0; i + 1 < trace.states[k].size(); ++i) {
        adj_[id(k, i)].push_back(id(k, i + 1));
      }
    }
    for (const auto& m : trace.messages) {
      adj_[id(m.from, m.send_index)].push_back(id(m.to, m.receive_index));
    }
    reach_.assign(total_, std::vector<bool>(total_, false));
    for (std::size_t s = 0; s < total_; ++s) {
      std::vector<std::size_t> stack{s};
      while (!stack.empty()) {
        std::size_t at = stack.back();
        stack.pop_back();
        for (std::size_t next : adj_[at]) {
          if (!reach_[s][next]) {
            reach_[s][next] = true;
            stack.push_back(next);
          }
        }
      }
    }
  }

  /// Strict happen-before between events e(k,i) and e(l,j).
  bool event_before(std::size_t k, std::size_t i, std::size_t l,
                    std::size_t j) const {
    return reach_[id(k, i)][id(l, j)];
  }

  /// The event ending s(k,i) happens before or is the event beginning
  /// s(l,j).
  bool state_before(std::size_t k, std::size_t i, std::size_t l,
                    std::size_t j) const {
    if (k == l) return i < j;
    if (i + 1 >= trace_.states[k].size()) return false;  // never ends
    return reach_[id(k, i + 1)][id(l, j)];
  }

 private:
  std::size_t id(std::size_t k, std::size_t i) const { return offset_[k] + i; }

  const latwin::Trace& trace_;
  std::vector<std::size_t> offset_;
  std::size_t total_ = 0;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::vector<bool>> reach_;
};

/// Every combination of one state per process, filtered by consistency
/// against the DAG.
inline std::vector<Cut> product_cgs(const latwin::Trace& trace,
                                    const EventDag& dag) {
  std::vector<Cut> out;
  Cut cut(trace.n, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == trace.n) {
      for (std::size_t i = 0; i < trace.n; ++i) {
        for (std::size_t j = 0; j < trace.n; ++j) {
          if (i != j && dag.state_before(i, cut[i], j, cut[j])) return;
        }
      }
      out.push_back(cut);
      return;
    }
    for (StateIndex i = 0; i < trace.states[k].size(); ++i) {
      cut[k] = i;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

/// Definitely by listing every maximal chain c_min -> c_max of the view.
/// Stops at the first chain that avoids every satisfying node.
inline bool definitely_by_chains(const latwin::LatWinView& view,
                                 const std::vector<bool>& sat,
                                 std::uint64_t& chains) {
  if (view.empty()) return false;
  const std::size_t start = *view.position(*view.c_min);
  const std::size_t goal = *view.position(*view.c_max);
  std::vector<std::size_t> path{start};
  bool avoided = false;
  std::function<void()> walk = [&] {
    if (avoided) return;
    std::size_t at = path.back();
    if (at == goal) {
      ++chains;
      bool hit = false;
      for (std::size_t p : path) hit = hit || sat[p];
      avoided = !hit;
      return;
    }
    for (std::size_t next : view.succ[at]) {
      path.push_back(next);
      walk();
      path.pop_back();
    }
  };
  walk();
  return !avoided;
}

/// Sweep over interval endpoints: is there an instant in [t0, t1] covered
/// by a true state of every process? States are half-open [begin, end).
inline bool sweep_ground_truth(const latwin::Trace& trace,
                               const latwin::Property& prop, double t0,
                               double t1) {
  std::vector<double> points{t0};
  for (const auto& per_process : trace.states) {
    for (const auto& ts : per_process) {
      if (ts.begin >= t0 && ts.begin <= t1) points.push_back(ts.begin);
    }
  }
  for (double t : points) {
    bool all = true;
    for (std::size_t k = 0; k < trace.n && all; ++k) {
      bool mine = false;
      for (const auto& ts : trace.states[k]) {
        if (ts.begin <= t && t < ts.end &&
            ts.state.payload.at(prop.locals[k])) {
          mine = true;
        }
      }
      all = mine;
    }
    if (all) return true;
  }
  return false;
}

/// Verdict of one occurrence on the CGSs below `top`, by search over the
/// full lattice: possibly when a node lies in the box, definitely when no
/// path from the bottom to `top` avoids the box.
inline bool prefix_verdict(const latwin::FullLattice& full, const Cut& top,
                           const latwin::IntervalIndex& index,
                           const latwin::Occurrence& occ,
                           latwin::Modality modality) {
  std::set<Cut> below;
  for (const Cut& c : full.nodes()) {
    if (latwin::leads_to(c, top)) below.insert(c);
  }
  if (modality == latwin::Modality::possibly) {
    for (const Cut& c : below) {
      if (index.in_box(c, occ)) return true;
    }
    return false;
  }
  Cut bottom(top.size(), 0);
  if (index.in_box(bottom, occ)) return true;
  std::set<Cut> seen{bottom};
  std::vector<Cut> queue{bottom};
  while (!queue.empty()) {
    Cut at = queue.back();
    queue.pop_back();
    if (at == top) return false;
    for (const Cut& next : full.successors(at)) {
      if (below.count(next) && !index.in_box(next, occ) &&
          seen.insert(next).second) {
        queue.push_back(next);
      }
    }
  }
  return true;
}

}  // namespace oracle

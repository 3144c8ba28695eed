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
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "latwin/clock.hpp"
#include "latwin/lattice.hpp"

namespace latwin {

/// Que^(k): buffers one process's states until their sequence numbers form
/// a gapless run starting at the next expected number.
class ReorderQueue {
 public:
  /// Returns the states that became deliverable, in seq order. Duplicates
  /// and already-delivered seqs are dropped and counted.
  std::vector<LocalState> push(LocalState s);

  std::uint64_t next_expected() const { return next_; }
  std::size_t buffered() const { return pending_.size(); }
  std::uint64_t dropped() const { return dropped_; }

 private:
  std::map<std::uint64_t, LocalState> pending_;
  std::uint64_t next_ = 0;
  std::uint64_t dropped_ = 0;
};

/// W^(k): the latest `capacity` states of one process.
class WindowBuffer {
 public:
  explicit WindowBuffer(std::size_t capacity);

  /// Appends s and returns the evicted oldest state, if any. Throws
  /// DomainError unless s.index directly follows the current maximum.
  std::optional<LocalState> push(LocalState s);

  bool empty() const { return states_.empty(); }
  std::size_t size() const { return states_.size(); }
  std::size_t capacity() const { return capacity_; }
  StateIndex min_index() const { return states_.front().index; }
  StateIndex max_index() const { return states_.back().index; }
  bool contains(StateIndex i) const {
    return !states_.empty() && i >= min_index() && i <= max_index();
  }
  const LocalState& at(StateIndex i) const {
    return states_[i - min_index()];
  }
  const std::deque<LocalState>& states() const { return states_; }

 private:
  std::size_t capacity_;
  std::deque<LocalState> states_;
};

/// Outcome of one advance, also the record type of the engine event log.
struct UpdateReport {
  ProcessId process = 0;
  StateIndex index = 0;
  std::optional<StateIndex> evicted;
  std::vector<Cut> added;
  std::vector<Cut> removed;
  std::optional<Cut> c_min;
  std::optional<Cut> c_max;
  std::uint64_t grow_candidates = 0;
  std::size_t node_count = 0;

  /// Single-line JSON document.
  std::string to_json() const;
};

/// Immutable copy of the engine state. Nodes are sorted lexicographically;
/// succ[i] lists positions in `nodes` of the successors of nodes[i].
struct LatWinView {
  std::size_t n = 0;
  std::vector<std::vector<LocalState>> windows;
  std::vector<Cut> nodes;
  std::vector<std::vector<std::size_t>> succ;
  std::optional<Cut> c_min;
  std::optional<Cut> c_max;

  bool empty() const { return nodes.empty(); }
  std::optional<std::size_t> position(const Cut& cut) const;
  std::vector<Edge> edges() const;
  const LocalState& local(ProcessId k, StateIndex i) const;
};

struct EngineStats {
  std::uint64_t advances = 0;
  std::size_t max_nodes = 0;
  std::uint64_t max_grow_candidates = 0;
  std::size_t max_prune_removed = 0;
  double node_count_sum = 0.0;  // summed after every advance

  double mean_nodes() const {
    return advances == 0 ? 0.0 : node_count_sum / static_cast<double>(advances);
  }
};

enum class StepOrder { grow_then_prune, prune_then_grow };

/// Incremental Lat-Win maintenance. Single writer; take snapshots to read
/// from elsewhere.
class LatWinEngine {
 public:
  LatWinEngine(std::size_t n, std::size_t w,
               StepOrder order = StepOrder::grow_then_prune);
  LatWinEngine(std::vector<std::size_t> capacities,
               StepOrder order = StepOrder::grow_then_prune);

  /// Hands a possibly out-of-order state to its reorder queue and advances
  /// over everything that became deliverable.
  std::vector<UpdateReport> receive(const LocalState& s);

  /// Appends an in-order state to its window, then grows and prunes.
  UpdateReport advance(const LocalState& s);

  LatWinView snapshot() const;

  std::size_t dimension() const { return n_; }
  std::size_t node_count() const { return index_.size(); }
  bool contains(const Cut& cut) const { return index_.count(cut) != 0; }
  std::optional<Cut> c_min() const;
  std::optional<Cut> c_max() const;
  const WindowBuffer& window(ProcessId k) const { return windows_[k]; }
  const EngineStats& stats() const { return stats_; }
  std::uint64_t dropped() const;

 private:
  static constexpr std::uint32_t kNone = UINT32_MAX;

  struct Node {
    Cut cut;
    std::vector<std::uint32_t> pred;  // pred[d]: cut with d stepped back
    std::vector<std::uint32_t> succ;
  };

  bool in_window(const Cut& cut) const;
  bool cut_consistent(const Cut& cut) const;
  std::uint32_t add_node(const Cut& cut);
  void remove_node(std::uint32_t id);
  void grow(ProcessId k, StateIndex s, UpdateReport& report);
  void prune(ProcessId k, StateIndex stale, UpdateReport& report);
  std::optional<Cut> seed_from_empty(
      ProcessId k, StateIndex s,
      std::unordered_set<Cut, CutHash>& tested) const;

  std::size_t n_;
  StepOrder order_;
  std::vector<WindowBuffer> windows_;
  std::vector<ReorderQueue> queues_;
  std::vector<Node> pool_;
  std::vector<std::uint32_t> free_;
  std::unordered_map<Cut, std::uint32_t, CutHash> index_;
  std::uint32_t c_min_ = kNone;
  std::uint32_t c_max_ = kNone;
  EngineStats stats_;
};

}  // namespace latwin

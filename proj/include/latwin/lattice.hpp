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
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "latwin/clock.hpp"
#include "latwin/trace.hpp"

namespace latwin {

/// A global state named by its index vector: cut[k] is the index of the
/// local state of process k. Within one run indices name states uniquely.
using Cut = std::vector<StateIndex>;

struct CutHash {
  std::size_t operator()(const Cut& cut) const noexcept;
};

using Edge = std::pair<Cut, Cut>;

/// One local state per process; states[k].process == k.
class GlobalState {
 public:
  explicit GlobalState(std::vector<LocalState> states);

  std::size_t size() const { return states_.size(); }
  const LocalState& operator[](std::size_t k) const { return states_[k]; }
  const std::vector<LocalState>& states() const { return states_; }
  Cut cut() const;

 private:
  std::vector<LocalState> states_;
};

/// Pairwise concurrency of the constituents, O(n^2) clock lookups.
bool is_consistent(const GlobalState& gs);
bool is_consistent(std::span<const LocalState* const> states);

/// c2 is c1 advanced by exactly one local state on exactly one process.
bool precede(const Cut& c1, const Cut& c2);
bool precede(const GlobalState& c1, const GlobalState& c2);

/// Componentwise index order. On the CGSs of one run this coincides with
/// the reflexive-transitive closure of precede.
bool leads_to(const Cut& c1, const Cut& c2);

Cut meet(const Cut& a, const Cut& b);
Cut join(const Cut& a, const Cut& b);
GlobalState meet(const GlobalState& a, const GlobalState& b);
GlobalState join(const GlobalState& a, const GlobalState& b);

/// Every CGS of a complete run with the precede edges between them (LAT).
/// Built by brute force; meant for oracles and desk-scale baselines.
class FullLattice {
 public:
  static constexpr std::uint32_t kNone = UINT32_MAX;

  std::size_t dimension() const { return n_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  bool contains(const Cut& cut) const { return index_.count(cut) != 0; }

  /// Nodes in lexicographic order.
  const std::vector<Cut>& nodes() const { return nodes_; }
  std::vector<Edge> edges() const;
  std::vector<Cut> predecessors(const Cut& cut) const;
  std::vector<Cut> successors(const Cut& cut) const;

  std::optional<Cut> initial() const;
  std::optional<Cut> final() const;

  /// {"n": n, "nodes": [[...]], "edges": [[[...], [...]]]}
  std::string to_json() const;

  friend FullLattice build_full_lattice(const Trace& trace);

 private:
  std::size_t n_ = 0;
  std::vector<Cut> nodes_;
  std::unordered_map<Cut, std::uint32_t, CutHash> index_;
  // pred_[i][d]: node reached by stepping back along process d, or kNone.
  std::vector<std::vector<std::uint32_t>> pred_;
  std::vector<std::vector<std::uint32_t>> succ_;
};

/// Enumerates the Cartesian product of all states with backtracking on
/// pairwise consistency. Throws IngestError for traces with index gaps.
FullLattice build_full_lattice(const Trace& trace);

/// Closed under meet and join, and contains every LAT member lying between
/// two of its members.
bool is_convex_sublattice(std::span<const Cut> sub, const FullLattice& full);

struct LatticeCount {
  std::uint64_t count = 0;
  bool truncated = false;
};

/// Number of CGSs of the run, without materialising them. Stops once the
/// count reaches `budget` and reports truncation.
LatticeCount count_consistent_cuts(const Trace& trace,
                                   std::uint64_t budget = UINT64_MAX);

/// Serialises node and edge lists in the lattice export format.
std::string lattice_json(std::size_t n, std::span<const Cut> nodes,
                         std::span<const Edge> edges);

}  // namespace latwin

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

#include "latwin/lattice.hpp"

#include <algorithm>
#include <functional>

#include "json.hpp"
#include "latwin/errors.hpp"

namespace latwin {

std::size_t CutHash::operator()(const Cut& cut) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (StateIndex i : cut) {
    h ^= i + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

GlobalState::GlobalState(std::vector<LocalState> states)
    : states_(std::move(states)) {
  for (std::size_t k = 0; k < states_.size(); ++k) {
    if (states_[k].process != k) {
      throw DomainError("global state slot " + std::to_string(k) +
                        " holds a state of process " +
                        std::to_string(states_[k].process));
    }
  }
}

Cut GlobalState::cut() const {
  Cut out(states_.size());
  for (std::size_t k = 0; k < states_.size(); ++k) out[k] = states_[k].index;
  return out;
}

bool is_consistent(std::span<const LocalState* const> states) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = 0; j < states.size(); ++j) {
      if (i != j && state_happens_before(*states[i], *states[j])) return false;
    }
  }
  return true;
}

bool is_consistent(const GlobalState& gs) {
  std::vector<const LocalState*> ptrs;
  ptrs.reserve(gs.size());
  for (const auto& s : gs.states()) ptrs.push_back(&s);
  return is_consistent(ptrs);
}

bool precede(const Cut& c1, const Cut& c2) {
  if (c1.size() != c2.size()) return false;
  std::size_t advanced = 0;
  for (std::size_t k = 0; k < c1.size(); ++k) {
    if (c2[k] == c1[k]) continue;
    if (c2[k] != c1[k] + 1) return false;
    ++advanced;
  }
  return advanced == 1;
}

bool precede(const GlobalState& c1, const GlobalState& c2) {
  return precede(c1.cut(), c2.cut());
}

bool leads_to(const Cut& c1, const Cut& c2) {
  if (c1.size() != c2.size()) return false;
  for (std::size_t k = 0; k < c1.size(); ++k) {
    if (c1[k] > c2[k]) return false;
  }
  return true;
}

Cut meet(const Cut& a, const Cut& b) {
  Cut out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = std::min(a[k], b[k]);
  return out;
}

Cut join(const Cut& a, const Cut& b) {
  Cut out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = std::max(a[k], b[k]);
  return out;
}

GlobalState meet(const GlobalState& a, const GlobalState& b) {
  std::vector<LocalState> out;
  out.reserve(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    out.push_back(a[k].index <= b[k].index ? a[k] : b[k]);
  }
  return GlobalState(std::move(out));
}

GlobalState join(const GlobalState& a, const GlobalState& b) {
  std::vector<LocalState> out;
  out.reserve(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    out.push_back(a[k].index >= b[k].index ? a[k] : b[k]);
  }
  return GlobalState(std::move(out));
}

std::vector<Edge> FullLattice::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::uint32_t j : succ_[i]) {
      if (j != kNone) out.emplace_back(nodes_[i], nodes_[j]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Cut> FullLattice::predecessors(const Cut& cut) const {
  std::vector<Cut> out;
  auto it = index_.find(cut);
  if (it == index_.end()) return out;
  for (std::uint32_t j : pred_[it->second]) {
    if (j != kNone) out.push_back(nodes_[j]);
  }
  return out;
}

std::vector<Cut> FullLattice::successors(const Cut& cut) const {
  std::vector<Cut> out;
  auto it = index_.find(cut);
  if (it == index_.end()) return out;
  for (std::uint32_t j : succ_[it->second]) {
    if (j != kNone) out.push_back(nodes_[j]);
  }
  return out;
}

std::optional<Cut> FullLattice::initial() const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (std::all_of(pred_[i].begin(), pred_[i].end(),
                    [](std::uint32_t j) { return j == kNone; })) {
      return nodes_[i];
    }
  }
  return std::nullopt;
}

std::optional<Cut> FullLattice::final() const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (std::all_of(succ_[i].begin(), succ_[i].end(),
                    [](std::uint32_t j) { return j == kNone; })) {
      return nodes_[i];
    }
  }
  return std::nullopt;
}

std::string FullLattice::to_json() const {
  auto e = edges();
  return lattice_json(n_, nodes_, e);
}

FullLattice build_full_lattice(const Trace& trace) {
  trace.validate();
  FullLattice lat;
  lat.n_ = trace.n;
  const std::size_t n = trace.n;
  if (n == 0) return lat;
  for (const auto& per_process : trace.states) {
    if (per_process.empty()) return lat;
  }

  Cut cut(n, 0);
  std::vector<const LocalState*> chosen(n, nullptr);
  std::function<void(std::size_t)> descend = [&](std::size_t k) {
    if (k == n) {
      lat.nodes_.push_back(cut);
      return;
    }
    for (StateIndex i = 0; i < trace.state_count(k); ++i) {
      const LocalState& s = trace.state(k, i);
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j) {
        ok = !state_happens_before(*chosen[j], s) &&
             !state_happens_before(s, *chosen[j]);
      }
      if (!ok) continue;
      chosen[k] = &s;
      cut[k] = i;
      descend(k + 1);
    }
  };
  descend(0);

  // Enumeration order is already lexicographic.
  lat.index_.reserve(lat.nodes_.size());
  for (std::uint32_t i = 0; i < lat.nodes_.size(); ++i) {
    lat.index_.emplace(lat.nodes_[i], i);
  }
  lat.pred_.assign(lat.nodes_.size(),
                   std::vector<std::uint32_t>(n, FullLattice::kNone));
  lat.succ_ = lat.pred_;
  for (std::uint32_t i = 0; i < lat.nodes_.size(); ++i) {
    Cut next = lat.nodes_[i];
    for (std::size_t d = 0; d < n; ++d) {
      ++next[d];
      auto it = lat.index_.find(next);
      if (it != lat.index_.end()) {
        lat.succ_[i][d] = it->second;
        lat.pred_[it->second][d] = i;
      }
      --next[d];
    }
  }
  return lat;
}

bool is_convex_sublattice(std::span<const Cut> sub, const FullLattice& full) {
  if (sub.empty()) return true;
  std::unordered_map<Cut, bool, CutHash> members;
  for (const Cut& c : sub) {
    if (!full.contains(c)) return false;
    members.emplace(c, true);
  }
  for (const Cut& a : sub) {
    for (const Cut& b : sub) {
      if (!members.count(meet(a, b)) || !members.count(join(a, b))) {
        return false;
      }
    }
  }
  // A meet/join-closed set has a least and greatest member; any LAT member
  // between two members lies between those two.
  Cut lo = sub.front();
  Cut hi = sub.front();
  for (const Cut& c : sub) {
    lo = meet(lo, c);
    hi = join(hi, c);
  }
  for (const Cut& c : full.nodes()) {
    if (leads_to(lo, c) && leads_to(c, hi) && !members.count(c)) return false;
  }
  return true;
}

LatticeCount count_consistent_cuts(const Trace& trace, std::uint64_t budget) {
  trace.validate();
  const std::size_t n = trace.n;
  LatticeCount result;
  if (n == 0) return result;
  for (const auto& per_process : trace.states) {
    if (per_process.empty()) return result;
  }
  // column[m][j][i] = clock component j of s^(m)_i, nondecreasing in i.
  std::vector<std::vector<std::vector<std::uint32_t>>> column(
      n, std::vector<std::vector<std::uint32_t>>(n));
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t j = 0; j < n; ++j) {
      auto& col = column[m][j];
      col.reserve(trace.state_count(m));
      for (const auto& ts : trace.states[m]) col.push_back(ts.state.clock[j]);
    }
  }

  Cut cut(n, 0);
  std::uint64_t work = 0;
  // Given cut[0..m), the admissible indices of process m form an interval:
  // s^(m)_i must not have seen the ending of cut[j] (upper bound) and
  // cut[j] must not have seen the ending of s^(m)_i (lower bound).
  auto range = [&](std::size_t m) -> std::pair<std::int64_t, std::int64_t> {
    std::int64_t lo = 0;
    std::int64_t hi = static_cast<std::int64_t>(trace.state_count(m)) - 1;
    for (std::size_t j = 0; j < m; ++j) {
      const auto& col = column[m][j];
      auto it = std::upper_bound(col.begin(), col.end(), cut[j] + 1);
      hi = std::min<std::int64_t>(hi, (it - col.begin()) - 1);
      std::int64_t seen = trace.state(j, cut[j]).clock[m];
      lo = std::max<std::int64_t>(lo, seen - 1);
    }
    return {lo, hi};
  };
  std::function<bool(std::size_t)> descend = [&](std::size_t m) -> bool {
    auto [lo, hi] = range(m);
    if (lo > hi) return true;
    if (m + 1 == n) {
      result.count += static_cast<std::uint64_t>(hi - lo + 1);
      return result.count < budget;
    }
    for (std::int64_t i = lo; i <= hi; ++i) {
      if (++work > budget) return false;
      cut[m] = static_cast<StateIndex>(i);
      if (!descend(m + 1)) return false;
    }
    return true;
  };
  if (!descend(0)) {
    result.truncated = true;
    result.count = std::min(result.count, budget);
  }
  return result;
}

std::string lattice_json(std::size_t n, std::span<const Cut> nodes,
                         std::span<const Edge> edges) {
  nlohmann::json doc;
  doc["n"] = n;
  doc["nodes"] = nlohmann::json::array();
  for (const Cut& c : nodes) doc["nodes"].push_back(c);
  doc["edges"] = nlohmann::json::array();
  for (const auto& [from, to] : edges) {
    doc["edges"].push_back(nlohmann::json::array({from, to}));
  }
  return doc.dump();
}

}  // namespace latwin

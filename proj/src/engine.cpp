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

#include "latwin/engine.hpp"

#include <algorithm>

#include "json.hpp"
#include "latwin/errors.hpp"

namespace latwin {

std::vector<LocalState> ReorderQueue::push(LocalState s) {
  std::vector<LocalState> out;
  if (s.seq < next_ || pending_.count(s.seq) != 0) {
    ++dropped_;
    return out;
  }
  pending_.emplace(s.seq, std::move(s));
  for (auto it = pending_.begin(); it != pending_.end() && it->first == next_;
       it = pending_.erase(it)) {
    out.push_back(std::move(it->second));
    ++next_;
  }
  return out;
}

WindowBuffer::WindowBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("window capacity must be positive");
}

std::optional<LocalState> WindowBuffer::push(LocalState s) {
  if (!states_.empty() && s.index != max_index() + 1) {
    throw DomainError("window expects index " +
                      std::to_string(max_index() + 1) + ", got " +
                      std::to_string(s.index));
  }
  states_.push_back(std::move(s));
  if (states_.size() <= capacity_) return std::nullopt;
  LocalState evicted = std::move(states_.front());
  states_.pop_front();
  return evicted;
}

namespace {

nlohmann::json cut_or_null(const std::optional<Cut>& cut) {
  return cut ? nlohmann::json(*cut) : nlohmann::json(nullptr);
}

}  // namespace

std::string UpdateReport::to_json() const {
  nlohmann::json doc;
  doc["process"] = process;
  doc["index"] = index;
  doc["evicted"] = evicted ? nlohmann::json(*evicted) : nlohmann::json(nullptr);
  doc["added"] = added;
  doc["removed"] = removed;
  doc["c_min"] = cut_or_null(c_min);
  doc["c_max"] = cut_or_null(c_max);
  doc["grow_candidates"] = grow_candidates;
  doc["nodes"] = node_count;
  return doc.dump();
}

std::optional<std::size_t> LatWinView::position(const Cut& cut) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), cut);
  if (it == nodes.end() || *it != cut) return std::nullopt;
  return static_cast<std::size_t>(it - nodes.begin());
}

std::vector<Edge> LatWinView::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j : succ[i]) out.emplace_back(nodes[i], nodes[j]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

const LocalState& LatWinView::local(ProcessId k, StateIndex i) const {
  const auto& win = windows.at(k);
  if (win.empty() || i < win.front().index || i > win.back().index) {
    throw DomainError("state " + std::to_string(i) + " of process " +
                      std::to_string(k) + " is outside the window");
  }
  return win[i - win.front().index];
}

LatWinEngine::LatWinEngine(std::size_t n, std::size_t w, StepOrder order)
    : LatWinEngine(std::vector<std::size_t>(n, w), order) {}

LatWinEngine::LatWinEngine(std::vector<std::size_t> capacities,
                           StepOrder order)
    : n_(capacities.size()), order_(order), queues_(capacities.size()) {
  if (n_ == 0) throw ConfigError("engine needs at least one process");
  windows_.reserve(n_);
  for (std::size_t c : capacities) windows_.emplace_back(c);
}

std::optional<Cut> LatWinEngine::c_min() const {
  if (c_min_ == kNone) return std::nullopt;
  return pool_[c_min_].cut;
}

std::optional<Cut> LatWinEngine::c_max() const {
  if (c_max_ == kNone) return std::nullopt;
  return pool_[c_max_].cut;
}

std::uint64_t LatWinEngine::dropped() const {
  std::uint64_t total = 0;
  for (const auto& q : queues_) total += q.dropped();
  return total;
}

bool LatWinEngine::in_window(const Cut& cut) const {
  for (std::size_t d = 0; d < n_; ++d) {
    if (!windows_[d].contains(cut[d])) return false;
  }
  return true;
}

bool LatWinEngine::cut_consistent(const Cut& cut) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const LocalState& a = windows_[i].at(cut[i]);
    for (std::size_t j = 0; j < n_; ++j) {
      if (i != j && state_happens_before(a, windows_[j].at(cut[j]))) {
        return false;
      }
    }
  }
  return true;
}

std::uint32_t LatWinEngine::add_node(const Cut& cut) {
  std::uint32_t id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
  } else {
    id = static_cast<std::uint32_t>(pool_.size());
    pool_.emplace_back();
  }
  Node& node = pool_[id];
  node.cut = cut;
  node.pred.assign(n_, kNone);
  node.succ.assign(n_, kNone);
  index_.emplace(cut, id);

  Cut probe = cut;
  for (std::size_t d = 0; d < n_; ++d) {
    ++probe[d];
    if (auto it = index_.find(probe); it != index_.end()) {
      pool_[id].succ[d] = it->second;
      pool_[it->second].pred[d] = id;
    }
    probe[d] -= 2;
    if (cut[d] > 0) {
      if (auto it = index_.find(probe); it != index_.end()) {
        pool_[id].pred[d] = it->second;
        pool_[it->second].succ[d] = id;
      }
    }
    ++probe[d];
  }
  return id;
}

void LatWinEngine::remove_node(std::uint32_t id) {
  Node& node = pool_[id];
  for (std::size_t d = 0; d < n_; ++d) {
    if (node.pred[d] != kNone) pool_[node.pred[d]].succ[d] = kNone;
    if (node.succ[d] != kNone) pool_[node.succ[d]].pred[d] = kNone;
  }
  index_.erase(node.cut);
  node.cut.clear();
  free_.push_back(id);
}

std::optional<Cut> LatWinEngine::seed_from_empty(
    ProcessId k, StateIndex s,
    std::unordered_set<Cut, CutHash>& tested) const {
  // Odometer over the peer windows with coordinate k pinned to s.
  Cut cut(n_);
  for (std::size_t d = 0; d < n_; ++d) cut[d] = windows_[d].min_index();
  cut[k] = s;
  while (true) {
    bool touches_min = false;
    for (std::size_t d = 0; d < n_ && !touches_min; ++d) {
      touches_min = cut[d] == windows_[d].min_index();
    }
    if (touches_min) {
      tested.insert(cut);
      if (cut_consistent(cut)) return cut;
    }
    std::size_t d = 0;
    for (; d < n_; ++d) {
      if (d == k) continue;
      if (cut[d] < windows_[d].max_index()) {
        ++cut[d];
        break;
      }
      cut[d] = windows_[d].min_index();
    }
    if (d == n_) return std::nullopt;
  }
}

void LatWinEngine::grow(ProcessId k, StateIndex s, UpdateReport& report) {
  for (const auto& win : windows_) {
    if (win.empty()) return;
  }
  std::unordered_set<Cut, CutHash> tested;
  const bool was_empty = index_.empty();
  std::optional<Cut> seed;
  if (!was_empty) {
    Cut g = pool_[c_max_].cut;
    if (g[k] + 1 == s) {
      g[k] = s;
      tested.insert(g);
      if (cut_consistent(g)) seed = std::move(g);
    }
  } else {
    seed = seed_from_empty(k, s, tested);
  }
  if (!seed) {
    report.grow_candidates = tested.size();
    return;
  }

  std::vector<std::uint32_t> added{add_node(*seed)};
  for (std::size_t head = 0; head < added.size(); ++head) {
    Cut probe = pool_[added[head]].cut;
    for (std::size_t d = 0; d < n_; ++d) {
      if (d == k) continue;  // every new cut has coordinate k equal to s
      for (int step : {-1, 1}) {
        if (step < 0 && probe[d] == 0) continue;
        probe[d] += step;
        if (windows_[d].contains(probe[d]) && !index_.count(probe) &&
            tested.insert(probe).second && cut_consistent(probe)) {
          added.push_back(add_node(probe));
        }
        probe[d] -= step;
      }
    }
  }
  report.grow_candidates = tested.size();

  auto no_link = [](const std::vector<std::uint32_t>& links) {
    return std::all_of(links.begin(), links.end(),
                       [](std::uint32_t j) { return j == kNone; });
  };
  for (std::uint32_t id : added) {
    report.added.push_back(pool_[id].cut);
    if (no_link(pool_[id].succ)) c_max_ = id;
    if (was_empty && no_link(pool_[id].pred)) c_min_ = id;
  }
}

void LatWinEngine::prune(ProcessId k, StateIndex stale, UpdateReport& report) {
  if (index_.empty() || pool_[c_min_].cut[k] != stale) return;
  if (pool_[c_max_].cut[k] == stale) {
    for (const auto& [cut, id] : index_) report.removed.push_back(cut);
    pool_.clear();
    free_.clear();
    index_.clear();
    c_min_ = c_max_ = kNone;
    return;
  }

  std::vector<std::uint32_t> doomed{c_min_};
  std::unordered_set<std::uint32_t> seen{c_min_};
  for (std::size_t head = 0; head < doomed.size(); ++head) {
    for (std::uint32_t next : pool_[doomed[head]].succ) {
      if (next != kNone && pool_[next].cut[k] == stale &&
          seen.insert(next).second) {
        doomed.push_back(next);
      }
    }
  }
  std::vector<std::uint32_t> frontier;
  for (std::uint32_t id : doomed) {
    for (std::uint32_t next : pool_[id].succ) {
      if (next != kNone && !seen.count(next)) frontier.push_back(next);
    }
  }
  for (std::uint32_t id : doomed) {
    report.removed.push_back(pool_[id].cut);
    remove_node(id);
  }

  c_min_ = kNone;
  for (std::uint32_t id : frontier) {
    const auto& pred = pool_[id].pred;
    if (std::all_of(pred.begin(), pred.end(),
                    [](std::uint32_t j) { return j == kNone; })) {
      c_min_ = id;
      break;
    }
  }
  if (c_min_ == kNone) {
    // Grow never links to evicted states, so with single-state windows the
    // survivors may not touch the doomed set; walk down from c_max instead.
    std::uint32_t id = c_max_;
    for (bool moved = true; moved;) {
      moved = false;
      for (std::uint32_t p : pool_[id].pred) {
        if (p != kNone) {
          id = p;
          moved = true;
          break;
        }
      }
    }
    c_min_ = id;
  }
}

UpdateReport LatWinEngine::advance(const LocalState& s) {
  if (s.process >= n_) {
    throw IngestError("state names process " + std::to_string(s.process) +
                      " but the engine has " + std::to_string(n_));
  }
  if (s.clock.size() != n_) {
    throw IngestError("clock length " + std::to_string(s.clock.size()) +
                      " does not match process count " + std::to_string(n_));
  }
  const ProcessId k = s.process;
  UpdateReport report;
  report.process = k;
  report.index = s.index;
  std::optional<LocalState> evicted = windows_[k].push(s);
  if (evicted) report.evicted = evicted->index;

  if (order_ == StepOrder::grow_then_prune) {
    grow(k, s.index, report);
    if (evicted) prune(k, evicted->index, report);
  } else {
    if (evicted) prune(k, evicted->index, report);
    grow(k, s.index, report);
  }

  std::sort(report.added.begin(), report.added.end());
  std::sort(report.removed.begin(), report.removed.end());
  report.c_min = c_min();
  report.c_max = c_max();
  report.node_count = index_.size();

  ++stats_.advances;
  stats_.max_nodes = std::max(stats_.max_nodes, index_.size());
  stats_.max_grow_candidates =
      std::max(stats_.max_grow_candidates, report.grow_candidates);
  stats_.max_prune_removed =
      std::max(stats_.max_prune_removed, report.removed.size());
  stats_.node_count_sum += static_cast<double>(index_.size());
  return report;
}

std::vector<UpdateReport> LatWinEngine::receive(const LocalState& s) {
  if (s.process >= n_) {
    throw IngestError("state names process " + std::to_string(s.process) +
                      " but the engine has " + std::to_string(n_));
  }
  std::vector<UpdateReport> out;
  for (const LocalState& ready : queues_[s.process].push(s)) {
    out.push_back(advance(ready));
  }
  return out;
}

LatWinView LatWinEngine::snapshot() const {
  LatWinView view;
  view.n = n_;
  view.windows.reserve(n_);
  for (const auto& win : windows_) {
    view.windows.emplace_back(win.states().begin(), win.states().end());
  }
  view.nodes.reserve(index_.size());
  for (const auto& [cut, id] : index_) view.nodes.push_back(cut);
  std::sort(view.nodes.begin(), view.nodes.end());
  view.succ.resize(view.nodes.size());
  for (std::size_t i = 0; i < view.nodes.size(); ++i) {
    const Node& node = pool_[index_.at(view.nodes[i])];
    for (std::uint32_t next : node.succ) {
      if (next != kNone) view.succ[i].push_back(*view.position(pool_[next].cut));
    }
  }
  view.c_min = c_min();
  view.c_max = c_max();
  return view;
}

}  // namespace latwin

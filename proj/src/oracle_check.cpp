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

#include "latwin/oracle_check.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <unordered_set>

#include "latwin/simulator.hpp"

namespace latwin {

namespace {

std::string describe(const Cut& c) {
  std::ostringstream out;
  out << '[';
  for (std::size_t k = 0; k < c.size(); ++k) out << (k ? "," : "") << c[k];
  out << ']';
  return out.str();
}

std::uint64_t power(std::uint64_t base, std::size_t exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

void note(OracleCheckReport& report, const std::string& what) {
  if (report.failures.size() < 20) report.failures.push_back(what);
}

// Closure under meet/join, distributivity on sampled triples, convexity.
bool lattice_laws_hold(const LatWinView& view, const FullLattice& full,
                       std::mt19937_64& rng) {
  if (view.empty()) return true;
  std::unordered_set<Cut, CutHash> members(view.nodes.begin(),
                                           view.nodes.end());
  for (const Cut& a : view.nodes) {
    for (const Cut& b : view.nodes) {
      if (!members.count(meet(a, b)) || !members.count(join(a, b))) {
        return false;
      }
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, view.nodes.size() - 1);
  for (int t = 0; t < 32; ++t) {
    const Cut& a = view.nodes[pick(rng)];
    const Cut& b = view.nodes[pick(rng)];
    const Cut& c = view.nodes[pick(rng)];
    if (meet(a, join(b, c)) != join(meet(a, b), meet(a, c))) return false;
    if (meet(a, join(a, b)) != a || join(a, meet(a, b)) != a) return false;
  }
  return is_convex_sublattice(view.nodes, full);
}

bool anchors_hold(const LatWinView& view) {
  if (view.empty()) return !view.c_min && !view.c_max;
  if (!view.c_min || !view.c_max) return false;
  const std::size_t n = view.n;
  std::vector<std::size_t> indegree(view.nodes.size(), 0);
  for (const auto& next : view.succ) {
    for (std::size_t j : next) ++indegree[j];
  }
  std::size_t sources = 0, sinks = 0;
  for (std::size_t i = 0; i < view.nodes.size(); ++i) {
    if (indegree[i] == 0) {
      ++sources;
      if (view.nodes[i] != *view.c_min) return false;
    }
    if (view.succ[i].empty()) {
      ++sinks;
      if (view.nodes[i] != *view.c_max) return false;
    }
  }
  if (sources != 1 || sinks != 1) return false;
  Cut lo = view.nodes.front(), hi = view.nodes.front();
  for (const Cut& c : view.nodes) {
    lo = meet(lo, c);
    hi = join(hi, c);
  }
  if (lo != *view.c_min || hi != *view.c_max) return false;
  bool touches_min = false, touches_max = false;
  for (std::size_t k = 0; k < n; ++k) {
    touches_min = touches_min || lo[k] == view.windows[k].front().index;
    touches_max = touches_max || hi[k] == view.windows[k].back().index;
  }
  return touches_min && touches_max;
}

}  // namespace

OracleCheckReport run_oracle_check(const OracleCheckOptions& options,
                                   const ViewVisitor& visit) {
  OracleCheckReport report;
  std::mt19937_64 rng(options.seed);
  for (std::size_t t = 0; t < options.traces; ++t) {
    const std::size_t n =
        options.process_counts[t % options.process_counts.size()];
    const std::size_t w =
        options.window_sizes[(t / options.process_counts.size()) %
                             options.window_sizes.size()];
    const std::uint64_t trace_seed = rng();
    Trace trace = random_trace(n, options.max_events, options.msg_prob,
                               trace_seed);
    FullLattice full = build_full_lattice(trace);
    const auto full_edges = full.edges();

    // Shuffled delivery: each state is delayed by a random amount of steps.
    std::vector<std::pair<double, LocalState>> arrivals;
    std::exponential_distribution<double> delay(0.3);
    for (const auto& per_process : trace.states) {
      for (const auto& ts : per_process) {
        arrivals.emplace_back(ts.begin + delay(rng), ts.state);
      }
    }
    std::stable_sort(arrivals.begin(), arrivals.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    LatWinEngine grow_first(n, w, StepOrder::grow_then_prune);
    LatWinEngine prune_first(n, w, StepOrder::prune_then_grow);
    const std::uint64_t space = power(w, n);
    const std::uint64_t layer = power(w, n - 1);
    ++report.traces;
    std::string where = "trace seed " + std::to_string(trace_seed) +
                        " n=" + std::to_string(n) + " w=" + std::to_string(w);

    std::vector<ReorderQueue> queues(n);
    std::vector<LocalState> in_order;
    for (const auto& [when, state] : arrivals) {
      for (LocalState& ready : queues[state.process].push(state)) {
        in_order.push_back(std::move(ready));
      }
    }

    for (const LocalState& state : in_order) {
      const UpdateReport up = grow_first.advance(state);
      prune_first.advance(state);
      ++report.steps;
      if (up.grow_candidates > layer || up.removed.size() > layer) {
        ++report.bound_violations;
        note(report, where + ": per-step work above w^(n-1)");
      }

      LatWinView view = grow_first.snapshot();
      LatWinView alt = prune_first.snapshot();
      if (view.nodes.size() > space) {
        ++report.bound_violations;
        note(report, where + ": node count above w^n");
      }

      std::vector<Cut> expected;
      for (const Cut& c : full.nodes()) {
        bool inside = true;
        for (std::size_t k = 0; k < n && inside; ++k) {
          const auto& win = view.windows[k];
          inside = !win.empty() && c[k] >= win.front().index &&
                   c[k] <= win.back().index;
        }
        if (inside) expected.push_back(c);
      }
      if (expected != view.nodes) {
        ++report.node_mismatches;
        note(report, where + ": node set differs after state " +
                         std::to_string(state.process) + "/" +
                         std::to_string(state.index));
      }
      std::vector<Edge> expected_edges;
      std::unordered_set<Cut, CutHash> in_view(expected.begin(), expected.end());
      for (const Edge& e : full_edges) {
        if (in_view.count(e.first) && in_view.count(e.second)) {
          expected_edges.push_back(e);
        }
      }
      if (expected_edges != view.edges()) {
        ++report.edge_mismatches;
        note(report, where + ": edge set differs");
      }
      if (!lattice_laws_hold(view, full, rng)) {
        ++report.lattice_violations;
        note(report, where + ": lattice law violated");
      }
      if (!anchors_hold(view)) {
        ++report.anchor_violations;
        note(report, where + ": anchor invariant violated, c_min " +
                         (view.c_min ? describe(*view.c_min) : "null"));
      }
      if (alt.nodes != view.nodes || alt.succ != view.succ ||
          alt.c_min != view.c_min || alt.c_max != view.c_max) {
        ++report.order_divergences;
        note(report, where + ": grow/prune order changes the snapshot");
      }
      if (visit) visit(view, full, w);
    }
    if (grow_first.stats().max_nodes > space) {
      ++report.bound_violations;
      note(report, where + ": peak node count above w^n");
    }
  }
  return report;
}

}  // namespace latwin

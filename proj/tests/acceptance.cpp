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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Detail lines are indented.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "golden.hpp"
#include "latwin/detection.hpp"
#include "latwin/engine.hpp"
#include "latwin/experiment.hpp"
#include "latwin/oracle_check.hpp"
#include "oracles.hpp"

#ifndef LATWIN_CLI
#error "LATWIN_CLI must name the CLI binary"
#endif

using namespace latwin;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
  std::cout << (ok ? "PASS" : "FAIL") << ' ' << id << ' ' << what << '\n'
            << std::flush;
  failures += !ok;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::uint64_t ipow(std::uint64_t b, std::size_t e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

// Pool-adjacent-violators fit of a non-decreasing sequence.
std::vector<double> isotonic(const std::vector<double>& y) {
  std::vector<double> val;
  std::vector<std::size_t> len;
  for (double v : y) {
    val.push_back(v);
    len.push_back(1);
    while (val.size() > 1 && val[val.size() - 2] > val.back()) {
      const std::size_t a = len[len.size() - 2], b = len.back();
      const double merged = (val[val.size() - 2] * a + val.back() * b) / (a + b);
      val.pop_back();
      len.pop_back();
      val.back() = merged;
      len.back() = a + b;
    }
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < val.size(); ++i) out.insert(out.end(), len[i], val[i]);
  return out;
}

double max_dev(const std::vector<double>& y, const std::vector<double>& fit) {
  double d = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) d = std::max(d, std::abs(y[i] - fit[i]));
  return d;
}

// Largest step against the wanted direction (positive: a violation).
double worst_step(const std::vector<double>& y, bool increasing) {
  double worst = -INFINITY;
  for (std::size_t i = 1; i < y.size(); ++i) {
    worst = std::max(worst, increasing ? y[i - 1] - y[i] : y[i] - y[i - 1]);
  }
  return worst;
}

std::vector<const MetricsRow*> rows_of(const SweepResult& r, Modality m) {
  std::vector<const MetricsRow*> out;
  for (const auto& row : r.rows) {
    if (row.modality == m) out.push_back(&row);
  }
  return out;
}

// Suite 1 with the detection and bound checks riding along.
struct SuiteOne {
  OracleCheckReport report;
  double seconds = 0.0;
  std::uint64_t views = 0;
  std::uint64_t implication_failures = 0;
  std::uint64_t chain_views = 0, chains = 0, chain_mismatches = 0;
  std::uint64_t node_bound_failures = 0;
  std::size_t largest_view = 0;
};

SuiteOne run_suite_one() {
  SuiteOne s;
  std::mt19937_64 rng(4242);
  OracleCheckOptions opt;  // 500 traces, n in {2,3}, w in 1..4, <= 25 events
  auto t0 = std::chrono::steady_clock::now();
  s.report = run_oracle_check(opt, [&](const LatWinView& view,
                                        const FullLattice&, std::size_t w) {
    ++s.views;
    s.largest_view = std::max(s.largest_view, view.nodes.size());
    s.node_bound_failures += view.nodes.size() > ipow(w, view.n);

    // The trace's own payloads, then a random relabelling of the window.
    LatWinView relabelled = view;
    for (auto& win : relabelled.windows) {
      for (auto& st : win) st.payload["active"] = rng() % 3 != 0;
    }
    for (const LatWinView* v : {&view, static_cast<const LatWinView*>(&relabelled)}) {
      Property p{"all", std::vector<std::string>(v->n, "active"),
                 Modality::possibly};
      const bool pos = detect(p, *v).holds;
      p.modality = Modality::definitely;
      const bool def = detect(p, *v).holds;
      s.implication_failures += def && !pos;
      if (!v->empty() && v->nodes.size() <= 200) {
        ++s.chain_views;
        std::vector<bool> sat;
        for (const Cut& c : v->nodes) sat.push_back(eval_cgs(c, p, *v));
        s.chain_mismatches += def != oracle::definitely_by_chains(*v, sat, s.chains);
      }
    }
  });
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& f : s.report.failures) std::cout << "  suite 1: " << f << '\n';
  return s;
}

bool golden_sequence(std::string& why) {
  using Cuts = std::vector<Cut>;
  Trace t = golden::fig_trace();
  LatWinEngine engine(2, 3);
  auto feed = [&](std::size_t k, StateIndex i) { return engine.advance(t.state(k, i)); };
  auto expect = [&](bool ok, const char* step) {
    if (!ok && why.empty()) why = step;
    return ok;
  };
  bool ok = true;
  for (auto [k, i] : std::vector<std::pair<std::size_t, StateIndex>>{
           {0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2}, {0, 3}}) {
    feed(k, i);
  }
  ok &= expect(engine.node_count() == 0, "window empty before s(1,3)");

  UpdateReport r = feed(1, 3);
  ok &= expect(r.removed.empty() && r.added == Cuts{{1, 3}, {2, 3}, {3, 3}} &&
                   r.c_min == Cut{1, 3},
               "s(1,3) grows from (1,3)");
  r = feed(0, 4);
  ok &= expect(r.added.empty() && r.removed == Cuts{{1, 3}},
               "s(0,4) refuses (4,3) and prunes (1,3)");
  r = feed(1, 4);
  ok &= expect(engine.snapshot().nodes == Cuts{{2, 3}, {2, 4}, {3, 3}, {3, 4}, {4, 4}},
               "s(1,4) yields the five-node lattice");
  r = feed(0, 5);
  ok &= expect(r.added == Cuts{{5, 4}} && r.removed == Cuts{{2, 3}, {2, 4}} &&
                   engine.c_min() == Cut{3, 3} && engine.c_max() == Cut{5, 4},
               "s(0,5) adds (5,4) and prunes column 2");
  return ok;
}

bool bounds_hold(const MetricsRow& row, std::size_t n, std::size_t w,
                 std::string& worst) {
  const bool ok = row.max_nodes <= ipow(w, n) &&
                  row.max_grow_candidates <= ipow(w, n - 1) &&
                  row.max_prune_removed <= ipow(w, n - 1);
  if (!ok) {
    worst = row.sweep + " param " + fmt(row.param) + ": nodes " +
            std::to_string(row.max_nodes) + " grow " +
            std::to_string(row.max_grow_candidates) + " prune " +
            std::to_string(row.max_prune_removed);
  }
  return ok;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool run_cli(const std::string& args) {
  const std::string cmd = std::string(LATWIN_CLI) + " " + args + " > /dev/null";
  return std::system(cmd.c_str()) == 0;
}

}  // namespace

int main() {
  // Criteria 1, 2, 3, 6, 8 and half of 5 share suite 1.
  SuiteOne one = run_suite_one();
  const auto& rep = one.report;
  verdict(1, rep.traces >= 500 && rep.node_mismatches == 0 &&
                 rep.edge_mismatches == 0 && one.seconds < 300.0,
          "oracle equivalence: " + std::to_string(rep.traces) + " traces, " +
              std::to_string(rep.steps) + " advances, node mismatches " +
              std::to_string(rep.node_mismatches) + ", edge mismatches " +
              std::to_string(rep.edge_mismatches) + ", " + fmt(one.seconds) + " s");
  verdict(2, rep.lattice_violations == 0,
          "lattice laws and convexity: " + std::to_string(rep.lattice_violations) +
              " violations");
  verdict(3, rep.anchor_violations == 0,
          "anchors: " + std::to_string(rep.anchor_violations) + " violations");

  std::string why;
  verdict(4, golden_sequence(why),
          why.empty() ? "worked example replays as narrated" : "worked example: " + why);

  // Suite 7: desk-scale trends, n = 3, 10 seeds, 2 h.
  ExperimentConfig base;
  std::string trend_notes;
  bool ok7 = true;
  std::string bound_failure;
  bool ok5 = rep.bound_violations == 0 && one.node_bound_failures == 0;

  SweepResult benefit = run_benefit_sweep(base);
  {
    std::vector<double> y;
    double at4 = 0.0;
    for (const MetricsRow* row : rows_of(benefit, Modality::definitely)) {
      y.push_back(row->perc_det.mean);
      if (row->param == 4) at4 = row->perc_det.mean;
      ok5 &= bounds_hold(*row, base.sim.n, static_cast<std::size_t>(row->param), bound_failure);
    }
    const double dev = max_dev(y, isotonic(y));
    const bool ok = at4 >= 0.9 && dev <= 0.05;
    std::cout << "  7a perc_det(w=1..10):";
    for (double v : y) std::cout << ' ' << fmt(v);
    std::cout << "; at w=4 " << fmt(at4) << ", monotone-fit deviation " << fmt(dev)
              << ", largest drop " << fmt(worst_step(y, true)) << '\n';
    ok7 &= ok;
    trend_notes += std::string("a ") + (ok ? "ok" : "fail");
  }
  {
    ExperimentConfig c = base;
    c.sim.lifetime = 3 * 3600.0;  // 2 h gives fewer than 200 events per process
    c.w_values = {10};
    SweepResult r = run_benefit_sweep(c);
    std::size_t fewest = SIZE_MAX;
    for (std::size_t s = 0; s < c.seeds; ++s) {
      SimConfig sim = c.sim;
      sim.seed = c.sim.seed + s;
      Trace t = generate(sim);
      for (std::size_t k = 0; k < t.n; ++k) fewest = std::min(fewest, t.state_count(k));
    }
    const MetricsRow& row = *rows_of(r, Modality::definitely).front();
    const bool ok = fewest >= 200 && !row.lat_truncated && row.perc_s.mean < 0.05;
    std::cout << "  7b perc_s(w=10, 3 h) " << fmt(row.perc_s.mean)
              << ", fewest events per process " << fewest
              << (row.lat_truncated ? ", LAT truncated" : "") << '\n';
    ok5 &= bounds_hold(row, c.sim.n, 10, bound_failure);
    ok7 &= ok;
    trend_notes += std::string(", b ") + (ok ? "ok" : "fail");
  }
  {
    SweepResult r = run_delay_sweep(base);
    std::vector<double> y, s;
    for (const MetricsRow* row : rows_of(r, Modality::definitely)) {
      y.push_back(row->prob_det.mean);
      s.push_back(row->s_latwin.mean);
      ok5 &= bounds_hold(*row, base.sim.n, base.sim.w, bound_failure);
    }
    std::vector<double> neg;
    for (double v : y) neg.push_back(-v);
    const double dev = max_dev(neg, isotonic(neg));
    const double lowest = *std::min_element(y.begin(), y.end());
    const bool ok = lowest >= 0.75 && dev <= 0.05;
    std::cout << "  7c prob_det(delay 0..5 s):";
    for (double v : y) std::cout << ' ' << fmt(v);
    std::cout << "; minimum " << fmt(lowest) << ", monotone-fit deviation " << fmt(dev)
              << ", largest rise " << fmt(worst_step(y, false))
              << "; s_latwin " << fmt(s.front()) << " -> " << fmt(s.back()) << '\n';
    ok7 &= ok;
    trend_notes += std::string(", c ") + (ok ? "ok" : "fail");
  }
  {
    SweepResult r = run_n_sweep(base);
    std::vector<double> s;
    for (const MetricsRow* row : rows_of(r, Modality::definitely)) {
      s.push_back(row->s_latwin.mean);
      ok5 &= bounds_hold(*row, static_cast<std::size_t>(row->param), base.sim.w,
                         bound_failure);
    }
    bool convex = s.size() >= 3;
    for (std::size_t i = 2; i < s.size(); ++i) convex &= s[i] - s[i - 1] > s[i - 1] - s[i - 2];
    const double theta = r.theta_fit.value_or(NAN);
    const bool ok = convex && theta >= 0.5 && theta <= 1.0;
    std::cout << "  7d s_latwin(n=2..6):";
    for (double v : s) std::cout << ' ' << fmt(v);
    std::cout << "; theta " << fmt(theta) << '\n';
    ok7 &= ok;
    trend_notes += std::string(", d ") + (ok ? "ok" : "fail");
  }

  verdict(5, ok5,
          "space and work bounds: largest suite 1 view " +
              std::to_string(one.largest_view) + " nodes, suite 1 bound violations " +
              std::to_string(rep.bound_violations + one.node_bound_failures) +
              (bound_failure.empty() ? "" : ", " + bound_failure));
  verdict(6, rep.order_divergences == 0,
          "grow/prune commutativity: " + std::to_string(rep.order_divergences) +
              " divergences");
  verdict(7, ok7, "desk-scale trends: " + trend_notes);
  verdict(8, one.views * 2 >= 10'000 && one.implication_failures == 0 &&
                 one.chain_mismatches == 0,
          "detection semantics: " + std::to_string(one.views * 2) + " views, " +
              std::to_string(one.implication_failures) + " implication failures, " +
              std::to_string(one.chain_views) + " views by chains (" +
              std::to_string(one.chains) + " chains), " +
              std::to_string(one.chain_mismatches) + " mismatches");

  // Criterion 9: the CLI twice with the same seed.
  const fs::path dir = fs::temp_directory_path() / "latwin-acceptance";
  fs::remove_all(dir);
  const std::string common = " --seed 7 --seeds 3 --lifetime 1h --out ";
  bool ok9 = true;
  std::string diff;
  for (const std::string sweep : {"delay", "benefit"}) {
    ok9 &= run_cli(sweep + " --threads 4" + common + (dir / "a").string());
    ok9 &= run_cli(sweep + " --threads 1" + common + (dir / "b").string());
    for (const char* m : {"-definitely.csv", "-possibly.csv"}) {
      const std::string name = sweep + m;
      const std::string a = slurp(dir / "a" / name), b = slurp(dir / "b" / name);
      if (a.empty() || a != b) {
        ok9 = false;
        diff += " " + name;
      }
    }
  }
  const fs::path trace = dir / "trace.jsonl";
  ok9 &= run_cli("simulate --seed 3 --lifetime 1h --trace-out " + trace.string());
  for (const char* sub : {"c", "d"}) {
    ok9 &= run_cli("replay --trace " + trace.string() + " --out " + (dir / sub).string());
  }
  for (const char* m : {"replay-definitely.csv", "replay-possibly.csv"}) {
    const std::string a = slurp(dir / "c" / m), b = slurp(dir / "d" / m);
    if (a.empty() || a != b) {
      ok9 = false;
      diff += std::string(" ") + m;
    }
  }
  fs::remove_all(dir);
  verdict(9, ok9,
          diff.empty() ? "delay, benefit and replay CSVs byte-identical across runs"
                       : "CSV differs or missing:" + diff);

  return failures == 0 ? 0 : 1;
}

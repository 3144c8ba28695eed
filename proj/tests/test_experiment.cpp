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

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "latwin/errors.hpp"
#include "latwin/experiment.hpp"
#include "latwin/trace_io.hpp"

using namespace latwin;

namespace {

ExperimentConfig quick() {
  ExperimentConfig c;
  c.sim.lifetime = 1800.0;
  c.seeds = 3;
  c.w_values = {1, 2, 3};
  c.delays = {0.0, 1.0};
  c.n_values = {2, 3};
  c.threads = 2;
  return c;
}

}  // namespace

TEST_CASE("csv layout") {
  SweepResult empty{"benefit", {}, std::nullopt};
  CHECK(to_csv(empty, Modality::definitely, false) ==
        std::string(kCsvHeader) + "\n");

  MetricsRow row;
  row.sweep = "delay";
  row.param = 0.5;
  row.seed_count = 10;
  row.perc_det.mean = 0.25;
  row.perc_s.mean = 0.001;
  row.prob_det.mean = 1.0;
  row.s_latwin.mean = 54.125;
  row.t_latwin_us.mean = 3.5;
  SweepResult one{"delay", {row}, std::nullopt};
  CHECK(to_csv(one, Modality::definitely, false) ==
        std::string(kCsvHeader) +
            "\ndelay,0.5,10,0.250000,0.001000,1.000000,54.125000,,\n");
  row.theta_fit = 0.75;
  one.rows = {row};
  CHECK(to_csv(one, Modality::definitely, true) ==
        std::string(kCsvHeader) +
            "\ndelay,0.5,10,0.250000,0.001000,1.000000,54.125000,3.500000,"
            "0.750000\n");
  CHECK(to_csv(one, Modality::possibly, true) ==
        std::string(kCsvHeader) + "\n");
}

TEST_CASE("theta fit recovers an exact power law") {
  std::vector<std::size_t> ns{2, 3, 4, 5};
  std::vector<double> sizes;
  for (std::size_t n : ns) sizes.push_back(std::pow(0.75 * 4, n));
  auto theta = fit_theta(ns, sizes, 4);
  REQUIRE(theta);
  CHECK(*theta == doctest::Approx(0.75));
  CHECK_FALSE(fit_theta({}, {}, 4));
}

TEST_CASE("perc_s equals the hand-counted ratio on tiny traces") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Trace t = random_trace(2 + seed % 2, 8, 0.3, seed + 50);
    FullLattice full = build_full_lattice(t);
    std::vector<LocalState> order;
    for (const auto& ev : t.events()) order.push_back(t.state(ev.id.process, ev.id.index));
    const std::size_t w = 3;
    // Lat-Win size after each advance, recomputed from LAT.
    std::vector<std::vector<StateIndex>> seen(t.n);
    double total = 0.0;
    for (const LocalState& s : order) {
      seen[s.process].push_back(s.index);
      std::size_t count = 0;
      for (const Cut& c : full.nodes()) {
        bool inside = true;
        for (std::size_t k = 0; k < t.n && inside; ++k) {
          const auto& got = seen[k];
          inside = !got.empty() && c[k] <= got.back() &&
                   c[k] + w > got.back();
        }
        count += inside;
      }
      total += static_cast<double>(count);
    }
    const double expected = total / order.size() / full.size();
    Property p = all_active(t.n, Modality::definitely);
    auto runs = evaluate_trace(t, order, p, {w}, 1'000'000);
    CHECK(runs[0].perc_s() == doctest::Approx(expected));
    CHECK(runs[0].s_lat == full.size());
  }
}

TEST_CASE("one process without delay is detected exactly") {
  SimConfig sim;
  sim.n = 1;
  sim.mean_delay = 0.0;
  sim.peer_msg_rate = 0.0;
  sim.seed = 6;
  Trace t = generate(sim);
  auto schedule = deliver(t, sim);
  std::vector<LocalState> arrivals;
  for (const auto& d : schedule) arrivals.push_back(d.state);
  auto runs = evaluate_trace(t, arrivals, all_active(1, Modality::definitely),
                             {1, 4}, 1'000'000);
  for (const auto& r : runs) {
    for (std::size_t m = 0; m < 2; ++m) {
      CHECK(r.counts[m].latwin > 0);
      CHECK(r.prob_det(m) == 1.0);
      CHECK(r.perc_det(m) == 1.0);
    }
  }
}

TEST_CASE("sweeps are deterministic and respect the space bound") {
  ExperimentConfig c = quick();
  auto a = run_delay_sweep(c);
  c.threads = 1;
  auto b = run_delay_sweep(c);
  for (Modality m : kModalities) CHECK(to_csv(a, m, false) == to_csv(b, m, false));
  CHECK(to_json(a, c, false) == to_json(b, c, false));
  for (const auto& row : a.rows) CHECK(row.max_nodes <= 64);

  auto n = run_n_sweep(quick());
  REQUIRE(n.theta_fit);
  CHECK(*n.theta_fit > 0.0);
  CHECK(n.rows.size() == 4);
}

TEST_CASE("benefit sweep reaches full agreement once w covers the run") {
  ExperimentConfig c = quick();
  c.sim.lifetime = 600.0;  // about ten states per process
  c.w_values = {1, 64};
  auto result = run_benefit_sweep(c);
  for (const auto& row : result.rows) {
    if (row.param == 64) {
      CHECK(row.perc_det.mean == 1.0);
      CHECK(row.perc_s.mean < 1.0);  // averaged over a growing prefix
    }
  }
}

TEST_CASE("experiment config parsing") {
  auto c = experiment_config_from_json(R"({
    "sim": {"n": 4, "lifetime": "3h", "mean_delay": "250ms", "w": 5},
    "seeds": 2, "w_values": [1, 2], "delays": ["0s", "2s"],
    "property": {"name": "busy", "locals": ["active"]}
  })");
  CHECK(c.sim.n == 4);
  CHECK(c.sim.lifetime == doctest::Approx(10800.0));
  CHECK(c.sim.mean_delay == doctest::Approx(0.25));
  CHECK(c.delays == std::vector<double>{0.0, 2.0});
  REQUIRE(c.property);
  CHECK(c.property->name == "busy");
  CHECK_THROWS_AS(experiment_config_from_json(R"({"sedes": 3})"), ConfigError);
  CHECK_THROWS_AS(experiment_config_from_json(R"({"seeds": 0})"), ConfigError);
  CHECK_THROWS_AS(experiment_config_from_json("not json"), ConfigError);

  SimConfig s;
  s.n = 5;
  s.mean_gap = 42.0;
  SimConfig back = sim_config_from_json(sim_config_to_json(s));
  CHECK(back.n == 5);
  CHECK(back.mean_gap == 42.0);
}

TEST_CASE("replay records round-trip") {
  SimConfig sim;
  sim.lifetime = 1200.0;
  sim.peer_msg_rate = 20.0;
  Trace t = generate(sim);
  auto schedule = deliver(t, sim);
  std::stringstream buf;
  write_replay(buf, schedule);
  auto records = read_replay(buf);
  REQUIRE(records.size() == t.total_states());
  Trace back = trace_from_records(records);
  CHECK(back.n == t.n);
  for (std::size_t k = 0; k < t.n; ++k) {
    REQUIRE(back.state_count(k) == t.state_count(k));
    for (StateIndex i = 0; i < t.state_count(k); ++i) {
      CHECK(back.state(k, i).clock == t.state(k, i).clock);
      CHECK(back.state(k, i).payload == t.state(k, i).payload);
      CHECK(back.states[k][i].begin == t.states[k][i].begin);
    }
  }
  auto line = nlohmann::json::parse(to_json_line(records.front()));
  for (const char* key :
       {"process", "index", "seq", "clock", "payload", "true_time_begin"}) {
    CHECK(line.contains(key));
  }

  std::stringstream bad("{\"process\": 0}\n");
  CHECK_THROWS_AS(read_replay(bad), IngestError);
}

TEST_CASE("emit fails on an unwritable directory") {
  SweepResult empty{"benefit", {}, std::nullopt};
  CHECK_THROWS(emit(empty, ExperimentConfig{}, "/proc/latwin-no-such-dir"));
}

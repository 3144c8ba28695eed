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

#include "latwin/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "latwin/errors.hpp"
#include "latwin/trace_io.hpp"

namespace latwin {

using nlohmann::json;

void ExperimentConfig::validate() const {
  sim.validate();
  if (seeds == 0) throw ConfigError("seeds must be at least 1");
  if (lat_budget == 0) throw ConfigError("lat_budget must be positive");
  for (std::size_t w : w_values) {
    if (w == 0) throw ConfigError("window sizes must be positive");
  }
  for (double d : delays) {
    if (!(d >= 0)) throw ConfigError("delays must be non-negative");
  }
  for (std::size_t n : n_values) {
    if (n == 0) throw ConfigError("process counts must be positive");
  }
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig config;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "sim") {
        config.sim = sim_config_from_json(value.dump());
      } else if (key == "seeds") {
        config.seeds = value.get<std::size_t>();
      } else if (key == "lat_budget") {
        config.lat_budget = value.get<std::uint64_t>();
      } else if (key == "threads") {
        config.threads = value.get<std::size_t>();
      } else if (key == "w_values") {
        config.w_values = value.get<std::vector<std::size_t>>();
      } else if (key == "n_values") {
        config.n_values = value.get<std::vector<std::size_t>>();
      } else if (key == "delays") {
        config.delays.clear();
        for (const auto& d : value) {
          config.delays.push_back(d.is_string()
                                      ? parse_duration(d.get<std::string>())
                                      : d.get<double>());
        }
      } else if (key == "property") {
        Property prop;
        prop.name = value.value("name", "property");
        prop.locals = value.at("locals").get<std::vector<std::string>>();
        if (value.contains("modality")) {
          prop.modality = modality_from_string(value["modality"]);
        }
        config.property = prop;
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  config.validate();
  return config;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  // Nothing to find and nothing found counts as full agreement.
  if (den == 0) return num == 0 ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::vector<LocalState> reassemble(const std::vector<LocalState>& arrivals,
                                   std::size_t n) {
  std::vector<ReorderQueue> queues(n);
  std::vector<LocalState> out;
  out.reserve(arrivals.size());
  for (const LocalState& s : arrivals) {
    if (s.process >= n) {
      throw IngestError("state names process " + std::to_string(s.process));
    }
    for (LocalState& ready : queues[s.process].push(s)) {
      out.push_back(std::move(ready));
    }
  }
  return out;
}

// Physical overlap of the occurrence's runs, within [lo, hi].
bool really_overlaps(const Trace& trace, const IntervalIndex& index,
                     const Occurrence& occ, double lo, double hi) {
  double start = -INFINITY, finish = INFINITY;
  for (std::size_t k = 0; k < occ.size(); ++k) {
    const StateIndex last = index.run_end(k, occ[k]);
    start = std::max(start, trace.states[k][occ[k]].begin);
    finish = std::min(finish, trace.states[k][last].end);
  }
  return start < finish && start <= hi && finish > lo;
}

bool window_may_satisfy(const LatWinEngine& engine, const IntervalIndex& index) {
  for (std::size_t k = 0; k < engine.dimension(); ++k) {
    const WindowBuffer& win = engine.window(k);
    if (win.empty()) return false;
    bool any = false;
    for (StateIndex i = win.min_index(); i <= win.max_index() && !any; ++i) {
      any = index.run_start(k, i) != IntervalIndex::kFalse;
    }
    if (!any) return false;
  }
  return true;
}

}  // namespace

double RunMetrics::perc_det(std::size_t m) const {
  return ratio(counts[m].latwin, counts[m].lat);
}

double RunMetrics::perc_s() const {
  if (s_lat == 0) return s_latwin == 0.0 ? 1.0 : 0.0;
  return s_latwin / static_cast<double>(s_lat);
}

double RunMetrics::prob_det(std::size_t m) const {
  return ratio(counts[m].physical, counts[m].latwin);
}

std::vector<RunMetrics> evaluate_trace(const Trace& trace,
                                       const std::vector<LocalState>& arrivals,
                                       const Property& prop,
                                       const std::vector<std::size_t>& ws,
                                       std::uint64_t lat_budget,
                                       const std::string& event_log) {
  const std::size_t n = trace.n;
  IntervalIndex index(trace, prop);
  const std::vector<LocalState> order = reassemble(arrivals, n);

  PrefixBaseline baseline(trace, index, candidate_occurrences(trace, index));
  for (const LocalState& s : order) baseline.advance(s.process, s.index);
  const LatticeCount lat = count_consistent_cuts(trace, lat_budget);

  std::ofstream log;
  if (!event_log.empty()) {
    log.open(event_log);
    if (!log) throw std::runtime_error("cannot write event log " + event_log);
  }

  std::vector<RunMetrics> out;
  for (std::size_t wi = 0; wi < ws.size(); ++wi) {
    RunMetrics run;
    run.w = ws[wi];
    run.s_lat = lat.count;
    run.lat_truncated = lat.truncated;
    for (std::size_t m = 0; m < kModalities.size(); ++m) {
      run.counts[m].lat = baseline.detected(kModalities[m]).size();
    }

    LatWinEngine engine(n, ws[wi]);
    std::set<Occurrence> seen[2];
    double busy_us = 0.0;
    for (const LocalState& s : order) {
      auto t0 = std::chrono::steady_clock::now();
      UpdateReport report = engine.advance(s);
      auto t1 = std::chrono::steady_clock::now();
      busy_us += std::chrono::duration<double, std::micro>(t1 - t0).count();
      if (log.is_open() && wi == 0) log << report.to_json() << '\n';

      if (engine.node_count() == 0 || !window_may_satisfy(engine, index)) {
        continue;
      }
      const LatWinView view = engine.snapshot();
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t k = 0; k < n; ++k) {
        lo = std::min(lo, trace.states[k][view.windows[k].front().index].begin);
        hi = std::max(hi, trace.states[k][view.windows[k].back().index].end);
      }
      for (std::size_t m = 0; m < kModalities.size(); ++m) {
        for (Occurrence& occ :
             windowed_occurrences(kModalities[m], view, index)) {
          if (!seen[m].insert(occ).second) continue;
          ++run.counts[m].latwin;
          if (really_overlaps(trace, index, occ, lo, hi)) {
            ++run.counts[m].physical;
          }
        }
      }
    }
    const EngineStats& stats = engine.stats();
    run.s_latwin = stats.mean_nodes();
    run.t_latwin_us =
        stats.advances == 0 ? 0.0 : busy_us / static_cast<double>(stats.advances);
    run.max_nodes = stats.max_nodes;
    run.max_grow_candidates = stats.max_grow_candidates;
    run.max_prune_removed = stats.max_prune_removed;
    out.push_back(run);
  }
  return out;
}

std::optional<double> fit_theta(const std::vector<std::size_t>& ns,
                                const std::vector<double>& sizes,
                                std::size_t w) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ns.size() && i < sizes.size(); ++i) {
    if (!(sizes[i] > 0)) continue;
    num += static_cast<double>(ns[i]) * std::log(sizes[i]);
    den += static_cast<double>(ns[i]) * static_cast<double>(ns[i]);
  }
  if (den == 0.0 || w == 0) return std::nullopt;
  return std::exp(num / den) / static_cast<double>(w);
}

namespace {

// Runs jobs on a small worker pool; results keep job order.
template <typename Result>
std::vector<Result> run_pool(std::vector<std::function<Result()>> jobs,
                             std::size_t threads) {
  std::vector<Result> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        results[j] = jobs[j]();
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

Stat summarize(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double acc = 0.0;
    for (double x : xs) acc += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(acc / static_cast<double>(xs.size() - 1));
  }
  return s;
}

// points[p][seed] holds the run of sweep point p for one seed.
std::vector<MetricsRow> aggregate(
    const std::string& sweep, const std::vector<double>& params,
    const std::vector<std::vector<RunMetrics>>& points) {
  std::vector<MetricsRow> rows;
  for (std::size_t m = 0; m < kModalities.size(); ++m) {
    for (std::size_t p = 0; p < params.size(); ++p) {
      const auto& runs = points[p];
      MetricsRow row;
      row.sweep = sweep;
      row.param = params[p];
      row.modality = kModalities[m];
      row.seed_count = runs.size();
      std::vector<double> det, ps, prob, size, time;
      for (const RunMetrics& r : runs) {
        det.push_back(r.perc_det(m));
        ps.push_back(r.perc_s());
        prob.push_back(r.prob_det(m));
        size.push_back(r.s_latwin);
        time.push_back(r.t_latwin_us);
        row.n_latwin += r.counts[m].latwin;
        row.n_lat += r.counts[m].lat;
        row.n_physical += r.counts[m].physical;
        row.lat_truncated = row.lat_truncated || r.lat_truncated;
        row.max_nodes = std::max(row.max_nodes, r.max_nodes);
        row.max_grow_candidates =
            std::max(row.max_grow_candidates, r.max_grow_candidates);
        row.max_prune_removed =
            std::max(row.max_prune_removed, r.max_prune_removed);
      }
      row.perc_det = summarize(det);
      row.perc_s = summarize(ps);
      row.prob_det = summarize(prob);
      row.s_latwin = summarize(size);
      row.t_latwin_us = summarize(time);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<LocalState> arrival_order(const std::vector<Delivery>& schedule) {
  std::vector<LocalState> out;
  out.reserve(schedule.size());
  for (const Delivery& d : schedule) out.push_back(d.state);
  return out;
}

std::vector<RunMetrics> simulate_and_evaluate(const SimConfig& sim,
                                              const std::vector<std::size_t>& ws,
                                              std::uint64_t lat_budget) {
  Trace trace = generate(sim);
  auto schedule = deliver(trace, sim);
  return evaluate_trace(trace, arrival_order(schedule),
                        all_active(sim.n, Modality::definitely), ws,
                        lat_budget);
}

SweepResult window_style_sweep(const std::string& name,
                               const ExperimentConfig& config) {
  config.validate();
  if (config.w_values.empty()) throw ConfigError("w_values is empty");
  std::vector<std::function<std::vector<RunMetrics>()>> jobs;
  for (std::size_t s = 0; s < config.seeds; ++s) {
    SimConfig sim = config.sim;
    sim.seed = config.sim.seed + s;
    jobs.push_back([sim, &config] {
      return simulate_and_evaluate(sim, config.w_values, config.lat_budget);
    });
  }
  auto per_seed = run_pool(std::move(jobs), config.threads);
  std::vector<std::vector<RunMetrics>> points(config.w_values.size());
  std::vector<double> params;
  for (std::size_t p = 0; p < config.w_values.size(); ++p) {
    params.push_back(static_cast<double>(config.w_values[p]));
    for (const auto& runs : per_seed) points[p].push_back(runs[p]);
  }
  return {name, aggregate(name, params, points), std::nullopt};
}

}  // namespace

SweepResult run_benefit_sweep(const ExperimentConfig& config) {
  return window_style_sweep("benefit", config);
}

SweepResult run_window_sweep(const ExperimentConfig& config) {
  return window_style_sweep("window", config);
}

SweepResult run_delay_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.delays.empty()) throw ConfigError("delays is empty");
  std::vector<std::function<std::vector<RunMetrics>()>> jobs;
  for (double delay : config.delays) {
    for (std::size_t s = 0; s < config.seeds; ++s) {
      SimConfig sim = config.sim;
      sim.seed = config.sim.seed + s;
      sim.mean_delay = delay;
      jobs.push_back([sim, &config] {
        return simulate_and_evaluate(sim, {sim.w}, config.lat_budget);
      });
    }
  }
  auto results = run_pool(std::move(jobs), config.threads);
  std::vector<std::vector<RunMetrics>> points(config.delays.size());
  for (std::size_t j = 0; j < results.size(); ++j) {
    points[j / config.seeds].push_back(results[j].front());
  }
  return {"delay", aggregate("delay", config.delays, points), std::nullopt};
}

SweepResult run_n_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.n_values.empty()) throw ConfigError("n_values is empty");
  std::vector<std::function<std::vector<RunMetrics>()>> jobs;
  for (std::size_t n : config.n_values) {
    for (std::size_t s = 0; s < config.seeds; ++s) {
      SimConfig sim = config.sim;
      sim.seed = config.sim.seed + s;
      sim.n = n;
      jobs.push_back([sim, &config] {
        return simulate_and_evaluate(sim, {sim.w}, config.lat_budget);
      });
    }
  }
  auto results = run_pool(std::move(jobs), config.threads);
  std::vector<std::vector<RunMetrics>> points(config.n_values.size());
  for (std::size_t j = 0; j < results.size(); ++j) {
    points[j / config.seeds].push_back(results[j].front());
  }
  std::vector<double> params(config.n_values.begin(), config.n_values.end());
  SweepResult result{"nprocs", aggregate("nprocs", params, points),
                     std::nullopt};
  std::vector<double> sizes;
  for (std::size_t p = 0; p < config.n_values.size(); ++p) {
    sizes.push_back(result.rows[p].s_latwin.mean);
  }
  result.theta_fit = fit_theta(config.n_values, sizes, config.sim.w);
  for (auto& row : result.rows) row.theta_fit = result.theta_fit;
  return result;
}

SweepResult run_replay(const ExperimentConfig& config, const Trace& trace,
                       const std::vector<LocalState>& arrivals,
                       const std::string& event_log) {
  Property prop;
  if (config.property) {
    prop = *config.property;
  } else {
    if (trace.schema.empty()) throw SchemaError("trace has no predicates");
    const bool has_active = std::find(trace.schema.begin(), trace.schema.end(),
                                      kActive) != trace.schema.end();
    prop = Property{"all", std::vector<std::string>(
                               trace.n, has_active ? kActive : trace.schema[0]),
                    Modality::definitely};
  }
  auto runs = evaluate_trace(trace, arrivals, prop, {config.sim.w},
                             config.lat_budget, event_log);
  std::vector<std::vector<RunMetrics>> points{runs};
  return {"replay",
          aggregate("replay", {static_cast<double>(config.sim.w)}, points),
          std::nullopt};
}

namespace {

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string compact(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

json stat_json(const Stat& s) { return {{"mean", s.mean}, {"sd", s.sd}}; }

json reference_annotations(const SweepResult& result,
                           const ExperimentConfig& config) {
  // Published figures for comparison only; desk-scale runs are not expected
  // to match them.
  if (result.sweep == "benefit" || result.sweep == "window") {
    return {{"perc_det_at_w4", 0.9711}, {"perc_s_at_w10_below", 0.01}};
  }
  if (result.sweep == "delay") {
    double worst = std::pow(static_cast<double>(config.sim.w),
                            static_cast<double>(config.sim.n));
    return {{"prob_det_above", 0.85}, {"s_latwin_worst_case", worst}};
  }
  if (result.sweep == "nprocs") {
    return {{"s_latwin_by_n",
             {{"2", 9}, {"3", 25}, {"4", 78}, {"5", 221}, {"6", 768},
              {"7", 2691}, {"8", 9799}, {"9", 34408}}},
            {"theta", 0.75}};
  }
  return json::object();
}

}  // namespace

std::string to_csv(const SweepResult& result, Modality modality, bool timing) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const MetricsRow& row : result.rows) {
    if (row.modality != modality) continue;
    out << row.sweep << ',' << compact(row.param) << ',' << row.seed_count
        << ',' << fixed6(row.perc_det.mean) << ',' << fixed6(row.perc_s.mean)
        << ',' << fixed6(row.prob_det.mean) << ','
        << fixed6(row.s_latwin.mean) << ','
        << (timing ? fixed6(row.t_latwin_us.mean) : std::string()) << ','
        << (row.theta_fit ? fixed6(*row.theta_fit) : std::string()) << '\n';
  }
  return out.str();
}

std::string to_json(const SweepResult& result, const ExperimentConfig& config,
                    bool timing) {
  json doc;
  doc["sweep"] = result.sweep;
  doc["config"] = json::parse(sim_config_to_json(config.sim));
  doc["seeds"] = config.seeds;
  doc["lat_budget"] = config.lat_budget;
  doc["theta_fit"] =
      result.theta_fit ? json(*result.theta_fit) : json(nullptr);
  doc["rows"] = json::array();
  for (const MetricsRow& row : result.rows) {
    json r;
    r["modality"] = to_string(row.modality);
    r["param"] = row.param;
    r["seed_count"] = row.seed_count;
    r["perc_det"] = stat_json(row.perc_det);
    r["perc_s"] = stat_json(row.perc_s);
    r["prob_det"] = stat_json(row.prob_det);
    r["s_latwin"] = stat_json(row.s_latwin);
    if (timing) r["t_latwin_us"] = stat_json(row.t_latwin_us);
    r["n_latwin"] = row.n_latwin;
    r["n_lat"] = row.n_lat;
    r["n_physical"] = row.n_physical;
    r["baseline_truncated"] = row.lat_truncated;
    r["max_nodes"] = row.max_nodes;
    r["max_grow_candidates"] = row.max_grow_candidates;
    r["max_prune_removed"] = row.max_prune_removed;
    doc["rows"].push_back(r);
  }
  doc["reference"] = reference_annotations(result, config);
  return doc.dump(2) + "\n";
}

void emit(const SweepResult& result, const ExperimentConfig& config,
          const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  auto write = [&](const std::string& name, const std::string& body) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
    if (!out) throw std::runtime_error("failed writing " + path.string());
  };
  for (Modality m : kModalities) {
    write(result.sweep + "-" + to_string(m) + ".csv",
          to_csv(result, m, config.timing));
  }
  write(result.sweep + ".json", to_json(result, config, config.timing));
}

}  // namespace latwin

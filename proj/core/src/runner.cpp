#include "mlsim/runner.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <thread>

#include "mlsim/csv.hpp"
#include "mlsim/simulation.hpp"

namespace fs = std::filesystem;

namespace mlsim {

fs::path cell_dir(const fs::path& out, Strategy s, double mp, int rep) {
  int pct = static_cast<int>(std::lround(mp * 100.0));
  return out / std::string(to_string(s)) / ("mp_" + std::to_string(pct)) /
         ("rep_" + std::to_string(rep));
}

namespace {

void write_summary(const fs::path& dir, Strategy s, double mp, int rep, std::uint64_t seed,
                   const RunSummary& sum) {
  csv::Writer w((dir / "summary.csv").string());
  w.comment("units: q_kmh=km/h pti=ratio speed_stddev=m/s fuel=L/veh/s "
            "pct_platooned=% mean_depth=index vhp=veh*h vhp_per_hour=veh*h/h "
            "travel times=s vmt=veh*km vht=veh*h");
  std::vector<std::string> header = {"strategy", "mp", "replication", "seed",
                                     "q_kmh", "pti", "traverse_count", "speed_stddev_ms",
                                     "fuel_l_per_veh_s", "pct_platooned", "mean_platoon_depth",
                                     "vhp_veh_h", "vhp_per_hour", "vmt_veh_km", "vht_veh_h",
                                     "entered", "exited", "missed_exits", "merge_starvations",
                                     "latent_unserved", "fallback_events"};
  for (const char* klass : {"gp", "hov", "cacc"}) {
    for (const char* stat : {"count", "min", "q1", "median", "q3", "max"}) {
      header.push_back(std::string(klass) + "_tt_" + stat);
    }
  }
  w.row(header);

  std::vector<std::string> row = {std::string(to_string(s)), csv::num(mp), std::to_string(rep),
                                  std::to_string(seed), csv::num(sum.q_kmh), csv::num(sum.pti),
                                  std::to_string(sum.traverse_count),
                                  csv::num(sum.speed_stddev_ms), csv::num(sum.fuel_l_per_veh_s),
                                  csv::num(sum.pct_platooned), csv::num(sum.mean_platoon_depth),
                                  csv::num(sum.vhp_veh_h), csv::num(sum.vhp_per_hour),
                                  csv::num(sum.vmt_veh_km), csv::num(sum.vht_veh_h),
                                  std::to_string(sum.entered), std::to_string(sum.exited),
                                  std::to_string(sum.missed_exits),
                                  std::to_string(sum.merge_starvations),
                                  std::to_string(sum.latent_unserved),
                                  std::to_string(sum.fallback_events)};
  for (int k = 0; k < 3; ++k) {
    const auto& st = sum.travel_stats[k];
    if (st) {
      row.push_back(std::to_string(st->count));
      row.push_back(csv::num(st->min));
      row.push_back(csv::num(st->q1));
      row.push_back(csv::num(st->median));
      row.push_back(csv::num(st->q3));
      row.push_back(csv::num(st->max));
    } else {
      for (int i = 0; i < 6; ++i) row.push_back("");
    }
  }
  w.row(row);
}

}  // namespace

RunSummary run_cell(const ScenarioConfig& scenario, Strategy s, double mp, int rep,
                    std::uint64_t base_seed, const fs::path& dir) {
  fs::create_directories(dir);
  ScenarioConfig cfg = scenario;
  cfg.strategy = s;
  cfg.market_penetration = mp;
  cfg.finalize();
  std::uint64_t seed = derive_cell_seed(base_seed, s, mp, rep);

  Simulation sim(cfg, seed);

  csv::Writer platoon_events((dir / "platoon_events.csv").string());
  platoon_events.comment("units: time=s size=vehicles");
  platoon_events.row({"time_s", "event", "platoon_id", "vehicle_id", "size"});
  sim.set_platoon_event_sink([&](const PlatoonEvent& e) {
    platoon_events.row({csv::num(e.time), std::string(to_string(e.kind)),
                        std::to_string(e.platoon), std::to_string(e.vehicle),
                        std::to_string(e.size)});
  });

  csv::Writer lane_changes((dir / "lane_changes.csv").string());
  lane_changes.comment("units: time=s position=m incentive=m/s^2 threshold=m/s^2");
  lane_changes.row({"time_s", "vehicle_id", "class", "kind", "from_lane", "to_lane",
                    "position_m", "incentive", "threshold"});
  sim.set_lane_change_sink([&](const LaneChangeEvent& e) {
    lane_changes.row({csv::num(e.time), std::to_string(e.vehicle),
                      std::string(to_string(e.klass)), std::string(to_string(e.kind)),
                      std::to_string(e.from_lane), std::to_string(e.to_lane),
                      csv::num(e.position), csv::num(e.incentive), csv::num(e.threshold)});
  });

  sim.run();
  RunSummary sum = sim.summary();

  write_summary(dir, s, mp, rep, seed, sum);

  {
    csv::Writer w((dir / "travel_times.csv").string());
    w.comment("full mainline traverses, post-warmup entries; units: s");
    w.row({"class", "entry_time_s", "travel_time_s"});
    for (VehClass k : {VehClass::GP, VehClass::HOV, VehClass::CACC}) {
      for (const auto& [entry, tt] : sim.ledger().travel_times(k)) {
        w.row({std::string(to_string(k)), csv::num(entry), csv::num(tt)});
      }
    }
  }
  {
    csv::Writer w((dir / "platoon_counts.csv").string());
    w.comment("1 Hz post-warmup samples");
    w.row({"time_s", "cacc_present", "platooned", "platoon_count"});
    for (const auto& tick : sim.ledger().platoon_ticks()) {
      w.row({csv::num(tick.time), std::to_string(tick.cacc_present),
             std::to_string(tick.platooned), std::to_string(tick.platoon_count)});
    }
  }
  return sum;
}

std::vector<CellResult> run_matrix(const ScenarioConfig& scenario, const RunMatrix& matrix,
                                   const RunnerOptions& opts, std::ostream* log) {
  struct Cell {
    Strategy s;
    double mp;
    int rep;
    std::size_t result_index;
  };
  std::vector<CellResult> results;
  std::vector<Cell> cells;
  for (Strategy s : matrix.strategies) {
    for (double mp : matrix.mp_values) {
      CellResult cr;
      cr.strategy = s;
      cr.mp = mp;
      cr.reps.resize(static_cast<std::size_t>(matrix.replications));
      std::size_t idx = results.size();
      results.push_back(std::move(cr));
      for (int rep = 1; rep <= matrix.replications; ++rep) {
        cells.push_back({s, mp, rep, idx});
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& c = cells[i];
      try {
        fs::path dir = cell_dir(opts.out_dir, c.s, c.mp, c.rep);
        RunSummary sum = run_cell(scenario, c.s, c.mp, c.rep, matrix.base_seed, dir);
        results[c.result_index].reps[static_cast<std::size_t>(c.rep - 1)] = sum;
        if (log && !opts.quiet) {
          std::lock_guard<std::mutex> lock(log_mutex);
          *log << to_string(c.s) << " mp=" << c.mp << " rep=" << c.rep << " done\n";
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(cells.size());
        return;
      }
    }
  };

  int workers = std::max(1, opts.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  auto rows = score_matrix(results);
  write_score_matrix(rows, opts.out_dir / "score_matrix.csv");
  return results;
}

void write_score_matrix(const std::vector<ScoreRow>& rows, const fs::path& path) {
  csv::Writer w(path.string());
  w.comment("traditional scores: +1 improvement / 0 neutral / -1 degradation vs BASE "
            "(1.96-SE noise band); platoon_rank: 4..1 by mean VHP per MP; "
            "normalized_total: sum of min-max normalized categories");
  w.row({"strategy", "mp", "mobility", "safety", "equity", "environment", "platoon_rank",
         "normalized_total"});
  auto opt_int = [](const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string{};
  };
  for (const auto& r : rows) {
    w.row({std::string(to_string(r.strategy)), csv::num(r.mp), opt_int(r.mobility),
           opt_int(r.safety), opt_int(r.equity), opt_int(r.environment),
           opt_int(r.platoon_rank), csv::num(r.normalized_total)});
  }
}

}  // namespace mlsim

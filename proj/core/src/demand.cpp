#include "mlsim/demand.hpp"

#include <algorithm>
#include <cmath>

#include "mlsim/longitudinal.hpp"

namespace mlsim {

std::pair<double, double> DemandTable::rates_at(const std::string& zone, double time) const {
  for (const auto& r : rows) {
    if (r.zone == zone && time >= r.start_s && time < r.start_s + interval_s) {
      return {r.gp_vph, r.hov_vph};
    }
  }
  return {0.0, 0.0};
}

std::vector<std::string> DemandTable::zones() const {
  std::vector<std::string> z;
  for (const auto& r : rows) {
    if (std::find(z.begin(), z.end(), r.zone) == z.end()) z.push_back(r.zone);
  }
  return z;
}

DemandTable default_demand() {
  DemandTable t;
  t.interval_s = 900.0;
  struct ZoneDemand {
    const char* zone;
    double gp_avg, hov_avg, gp_peak, hov_peak;
  };
  // Z3 ships the same GP and HOV columns as printed in the source table.
  const ZoneDemand zones[] = {
      {"Z1", 3998.0, 1796.0, 4197.0, 1885.0},
      {"Z2", 382.0, 180.0, 712.0, 335.0},
      {"Z3", 1146.0, 1146.0, 1411.0, 1411.0},
  };
  for (const auto& z : zones) {
    t.rows.push_back({z.zone, 0.0, z.gp_avg, z.hov_avg});
    t.rows.push_back({z.zone, 900.0, z.gp_peak, z.hov_peak});
    t.rows.push_back({z.zone, 1800.0, z.gp_peak, z.hov_peak});
    t.rows.push_back({z.zone, 2700.0, z.gp_peak, z.hov_peak});
    t.rows.push_back({z.zone, 3600.0, z.gp_avg, z.hov_avg});
  }
  return t;
}

ArrivalGenerator::ArrivalGenerator(const DemandTable& table, std::vector<OriginSpec> origins,
                                   double market_penetration, bool fold_hov,
                                   double offramp_split, std::uint64_t demand_seed,
                                   std::uint64_t heterogeneity_seed, double cacc_desired_speed)
    : table_(table),
      mp_(market_penetration),
      fold_hov_(fold_hov),
      offramp_split_(offramp_split),
      demand_rng_(demand_seed),
      heterogeneity_rng_(heterogeneity_seed),
      cacc_desired_speed_(cacc_desired_speed) {
  for (auto& o : origins) {
    OriginState st;
    st.spec = std::move(o);
    origins_.push_back(std::move(st));
  }
}

double ArrivalGenerator::total_rate(const OriginState& o, double time, double* hov_share) const {
  auto [gp, hov] = table_.rates_at(o.spec.zone, time);
  double total = gp + hov;
  if (hov_share) *hov_share = (fold_hov_ || total <= 0.0) ? 0.0 : hov / total;
  return total;
}

void ArrivalGenerator::generate(double t0, double t1, std::vector<Arrival>& out) {
  (void)t0;  // the per-origin cursors already sit at the window start
  for (auto& o : origins_) {
    if (o.primed) {
      if (o.next.time >= t1) continue;  // pending arrival still ahead of this window
      out.push_back(o.next);
      o.primed = false;
    }
    // Draw arrivals forward from the cursor; rates are piecewise constant and
    // by memorylessness the exponential clock restarts at interval boundaries.
    while (o.cursor < t1) {
      double rate_vph = total_rate(o, o.cursor, nullptr);
      double boundary = table_.interval_s * (std::floor(o.cursor / table_.interval_s) + 1.0);
      if (rate_vph <= 0.0) {
        o.cursor = boundary;
        continue;
      }
      double gap_s = demand_rng_.exponential(rate_vph / 3600.0);
      if (o.cursor + gap_s >= boundary) {
        o.cursor = boundary;  // rate changes first; discard the partial draw
        continue;
      }
      o.cursor += gap_s;

      Arrival a;
      a.time = o.cursor;
      a.origin = o.spec.origin_index;
      double hov_share = 0.0;
      total_rate(o, o.cursor, &hov_share);
      if (demand_rng_.bernoulli(mp_)) {
        a.klass = VehClass::CACC;
      } else if (demand_rng_.bernoulli(hov_share)) {
        a.klass = VehClass::HOV;
      } else {
        a.klass = VehClass::GP;
      }
      const auto& ramps = o.spec.downstream_offramps;
      double u = demand_rng_.uniform();
      if (!ramps.empty() && u < offramp_split_ * static_cast<double>(ramps.size())) {
        a.dest_offramp = ramps[static_cast<std::size_t>(u / offramp_split_)];
      } else {
        a.dest_offramp = -1;
      }
      // Every arrival consumes one heterogeneity draw so the stream is
      // independent of class composition; a CACC keeps it for its fallback
      // driver.
      a.human_desired_speed = draw_human_desired_speed(heterogeneity_rng_);
      a.desired_speed =
          a.klass == VehClass::CACC ? cacc_desired_speed_ : a.human_desired_speed;
      if (a.time < t1) {
        out.push_back(a);
      } else {
        o.next = a;  // belongs to a later window
        o.primed = true;
        break;
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Arrival& a, const Arrival& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.origin < b.origin;
  });
}

}  // namespace mlsim

#pragma once

#include <string>
#include <vector>

#include "mlsim/rng.hpp"
#include "mlsim/types.hpp"

namespace mlsim {

/// Demand for one origin over one 15-min interval.
struct DemandRow {
  std::string zone;       // Z1..Z3
  double start_s = 0.0;   // interval start, contiguous per zone
  double gp_vph = 0.0;
  double hov_vph = 0.0;
};

struct DemandTable {
  std::vector<DemandRow> rows;
  double interval_s = 900.0;

  /// GP/HOV rates for a zone at a simulation time (0 outside defined rows).
  std::pair<double, double> rates_at(const std::string& zone, double time) const;
  std::vector<std::string> zones() const;
};

/// The paper's network demand (peak/avg per origin); profile ramps avg ->
/// peak x3 -> avg over five 15-min intervals. Z3's identical GP and HOV
/// columns are shipped as printed in the source table.
DemandTable default_demand();

/// One pre-drawn arrival. Class, route and desired speed are drawn at
/// generation time so the arrival process is independent of downstream
/// spawn blocking and of the comms stream.
struct Arrival {
  double time = 0.0;
  int origin = 0;          // index into the origin list
  VehClass klass = VehClass::GP;
  double desired_speed = 0.0;  // m/s
  double human_desired_speed = 0.0;  // m/s; a CACC's fallback driver uses this
  int dest_offramp = -1;   // index into geometry.interchanges, -1 = mainline sink
};

/// Per-origin Poisson arrival generation with piecewise-constant rates.
/// Each arrival is CACC with probability MP, otherwise HOV with the
/// interval's HOV share (zero when the strategy folds HOV into GP), else GP.
class ArrivalGenerator {
public:
  struct OriginSpec {
    std::string zone;
    int origin_index = 0;
    std::vector<int> downstream_offramps;  // eligible off-ramp destinations
  };

  ArrivalGenerator(const DemandTable& table, std::vector<OriginSpec> origins,
                   double market_penetration, bool fold_hov, double offramp_split,
                   std::uint64_t demand_seed, std::uint64_t heterogeneity_seed,
                   double cacc_desired_speed);

  /// All arrivals with time in [t0, t1), appended in time order per origin.
  void generate(double t0, double t1, std::vector<Arrival>& out);

private:
  struct OriginState {
    OriginSpec spec;
    double cursor = 0.0;  // time up to which this origin's clock has advanced
    Arrival next;         // drawn arrival beyond the last window, valid when primed
    bool primed = false;
  };

  double total_rate(const OriginState& o, double time, double* hov_share) const;

  const DemandTable& table_;
  std::vector<OriginState> origins_;
  double mp_;
  bool fold_hov_;
  double offramp_split_;
  RngStream demand_rng_;
  RngStream heterogeneity_rng_;
  double cacc_desired_speed_;
};

}  // namespace mlsim

#include "mlsim/geometry.hpp"

#include <algorithm>

namespace mlsim {

namespace {
constexpr double kWeavingLengthPerChange = 333.0;  // m (1,000 ft)
}

NetworkGeometry default_geometry() {
  NetworkGeometry g;
  g.mainline_length = 8000.0;
  g.lanes = 4;
  g.diverge_length = 500.0;
  g.interchanges = {
      {"Z2", 2800.0, 3200.0, 300.0},
      {"Z3", 5600.0, 6000.0, 300.0},
  };
  return g;
}

bool lane_eligibility(Strategy strategy, VehClass klass, int lane, const NetworkGeometry& g) {
  if (lane != g.managed_lane()) return true;
  switch (strategy) {
    case Strategy::BASE: return klass == VehClass::HOV;
    case Strategy::UML: return true;
    case Strategy::MML: return klass == VehClass::CACC || klass == VehClass::HOV;
    case Strategy::DL:
    case Strategy::DLA: return klass == VehClass::CACC;
  }
  return false;
}

std::vector<AccessZone> access_zone_builder(const NetworkGeometry& g, int entry_lane) {
  const int ml = g.managed_lane();
  std::vector<AccessZone> zones;

  auto clamp_zone = [&](double start, double end) {
    start = std::max(0.0, start);
    end = std::min(g.mainline_length, end);
    if (end > start) zones.push_back({start, end});
  };

  // Entry zone at the mainline origin.
  clamp_zone(0.0, kWeavingLengthPerChange * (ml - entry_lane));

  for (const auto& ic : g.interchanges) {
    // On-ramp traffic attaches at lane 0 after the merge lane ends.
    double entry_start = ic.on_ramp_pos + ic.merge_length;
    clamp_zone(entry_start, entry_start + kWeavingLengthPerChange * ml);
    // Exit zone ends at the off-ramp so managed-lane traffic can reach lane 0.
    clamp_zone(ic.off_ramp_pos - kWeavingLengthPerChange * ml, ic.off_ramp_pos);
  }

  std::sort(zones.begin(), zones.end(),
            [](const AccessZone& a, const AccessZone& b) { return a.start < b.start; });
  std::vector<AccessZone> merged;
  for (const auto& z : zones) {
    if (!merged.empty() && z.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, z.end);
    } else {
      merged.push_back(z);
    }
  }
  return merged;
}

bool lane_change_allowed(Strategy strategy, VehClass klass, int from, int to, double position,
                         const NetworkGeometry& g) {
  if (g.is_aux_lane(to)) return false;  // nobody merges back into a ramp lane
  if (!lane_eligibility(strategy, klass, to, g)) return false;
  if (strategy == Strategy::DLA) {
    const int ml = g.managed_lane();
    bool crosses_ml_boundary = (from == ml) != (to == ml);
    if (crosses_ml_boundary && !g.in_access_zone(position)) return false;
  }
  return true;
}

}  // namespace mlsim

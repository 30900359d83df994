#include "mlsim/comms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mlsim {

ChannelModel ideal_channel(double max_range) {
  ChannelModel m;
  m.kind = ChannelKind::Ideal;
  m.max_range = max_range;
  return m;
}

ChannelModel table_channel(std::vector<std::pair<double, double>> points, double max_range) {
  if (points.empty()) throw ConfigError("comms table: no points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].second < 0.0 || points[i].second > 1.0)
      throw ConfigError("comms table: probability outside [0,1]");
    if (i > 0) {
      if (points[i].first <= points[i - 1].first)
        throw ConfigError("comms table: distances must be strictly increasing");
      if (points[i].second > points[i - 1].second)
        throw ConfigError("comms table: probability must be non-increasing in distance");
    }
  }
  ChannelModel m;
  m.kind = ChannelKind::Table;
  m.max_range = max_range;
  m.table = std::move(points);
  return m;
}

ChannelModel load_table_channel(const std::string& csv_path, double max_range) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("comms table: cannot open " + csv_path);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double d, p;
    if (ss >> d >> p) pts.emplace_back(d, p);
  }
  return table_channel(std::move(pts), max_range);
}

double reception_probability(const ChannelModel& model, double distance) {
  if (distance > model.max_range) return 0.0;
  switch (model.kind) {
    case ChannelKind::Ideal:
      return 1.0;
    case ChannelKind::Parametric: {
      double mid = model.midpoint * (1.0 - 0.5 * model.load);
      double p = 1.0 / (1.0 + std::exp(model.steepness * (distance - mid)));
      return std::clamp(p, 0.0, 1.0);
    }
    case ChannelKind::Table: {
      const auto& t = model.table;
      if (distance <= t.front().first) return t.front().second;
      if (distance >= t.back().first) return t.back().second;
      auto it = std::upper_bound(t.begin(), t.end(), distance,
                                 [](double d, const auto& pt) { return d < pt.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      double w = (distance - lo.first) / (hi.first - lo.first);
      return lo.second + w * (hi.second - lo.second);
    }
  }
  return 0.0;
}

bool sample_link(const ChannelModel& model, RngStream& comms_rng, double distance) {
  if (model.kind == ChannelKind::Ideal) return distance <= model.max_range;
  return comms_rng.bernoulli(reception_probability(model, distance));
}

}  // namespace mlsim

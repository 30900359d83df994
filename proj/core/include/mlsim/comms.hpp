#pragma once

#include <string>
#include <vector>

#include "mlsim/rng.hpp"

namespace mlsim {

enum class ChannelKind : std::uint8_t { Ideal = 0, Parametric = 1, Table = 2 };

/// One-hop DSRC broadcast reception-probability model. The parametric form is
/// a logistic surrogate in distance whose midpoint shrinks with channel load;
/// Table mode loads a published curve point-wise.
struct ChannelModel {
  ChannelKind kind = ChannelKind::Parametric;
  double max_range = 500.0;   // m; probability is 0 beyond this
  double load = 0.0;          // channel busy ratio in [0, 1]
  double midpoint = 250.0;    // m, logistic midpoint at zero load
  double steepness = 0.03;    // 1/m
  // Table mode: (distance_m, probability) points, distance strictly
  // increasing, probability non-increasing.
  std::vector<std::pair<double, double>> table;

  /// True when sampling consumes no randomness (outcome is deterministic).
  bool deterministic() const { return kind == ChannelKind::Ideal; }
};

ChannelModel ideal_channel(double max_range);

/// Validates a table and constructs a Table-mode model. Throws ConfigError on
/// a malformed (non-monotone) table.
ChannelModel table_channel(std::vector<std::pair<double, double>> points, double max_range);

/// Loads a two-column CSV (distance_m, probability). Lines starting with '#'
/// are comments.
ChannelModel load_table_channel(const std::string& csv_path, double max_range);

/// Reception probability at the given sender-receiver distance (m).
double reception_probability(const ChannelModel& model, double distance);

/// Bernoulli draw of one link reception. Ideal channels do not touch the rng
/// stream, so disabling comms noise leaves other streams untouched.
bool sample_link(const ChannelModel& model, RngStream& comms_rng, double distance);

}  // namespace mlsim

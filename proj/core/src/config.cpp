#include "mlsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mlsim {

RunMatrix::RunMatrix() {
  for (int i = 1; i <= 11; ++i) mp_values.push_back(0.05 * i);
}

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

using Sections = std::vector<std::pair<std::string, std::vector<Entry>>>;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Sections tokenize(const std::string& text, const std::string& origin) {
  Sections sections;
  std::istringstream in(text);
  std::string line;
  std::string current = "";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section");
      }
      current = trim(line.substr(1, line.size() - 2));
      sections.emplace_back(current, std::vector<Entry>{});
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
    if (sections.empty()) sections.emplace_back("", std::vector<Entry>{});
    sections.back().second.push_back(std::move(e));
  }
  return sections;
}

double to_double(const Entry& e, const std::string& origin) {
  try {
    std::size_t pos = 0;
    double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError(origin + ":" + std::to_string(e.line) + ": bad number for " + e.key);
  }
}

long to_long(const Entry& e, const std::string& origin) {
  try {
    std::size_t pos = 0;
    long v = std::stol(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError(origin + ":" + std::to_string(e.line) + ": bad integer for " + e.key);
  }
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::vector<double> parse_mp_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo, hi, step;
    char c1, c2;
    std::istringstream ss(text);
    if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0) {
      throw ConfigError("bad MP range: " + text);
    }
    for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(std::round(v * 1e6) / 1e6);
    return out;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw ConfigError("empty MP list");
  return out;
}

std::vector<Strategy> parse_strategy_list(const std::string& text) {
  std::vector<Strategy> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    auto s = strategy_from_string(tok);
    if (!s) throw ConfigError("unknown strategy: " + tok);
    out.push_back(*s);
  }
  if (out.empty()) throw ConfigError("empty strategy list");
  return out;
}

LoadedConfig parse_config(const std::string& text, const std::string& origin) {
  LoadedConfig cfg;
  cfg.scenario = default_scenario();
  Sections sections = tokenize(text, origin);

  bool demand_cleared = false;
  bool interchanges_cleared = false;

  for (const auto& [section, entries] : sections) {
    for (const auto& e : entries) {
      auto bad_key = [&]() {
        throw ConfigError(origin + ":" + std::to_string(e.line) + ": unknown key '" + e.key +
                          "' in [" + section + "]");
      };
      ScenarioConfig& sc = cfg.scenario;
      if (section == "run") {
        if (e.key == "strategies") cfg.matrix.strategies = parse_strategy_list(e.value);
        else if (e.key == "mp_values") cfg.matrix.mp_values = parse_mp_list(e.value);
        else if (e.key == "replications") cfg.matrix.replications = static_cast<int>(to_long(e, origin));
        else if (e.key == "base_seed") cfg.matrix.base_seed = static_cast<std::uint64_t>(to_long(e, origin));
        else bad_key();
      } else if (section == "scenario") {
        if (e.key == "timestep_s") sc.timestep = to_double(e, origin);
        else if (e.key == "horizon_s") sc.horizon = to_double(e, origin);
        else if (e.key == "warmup_s") sc.warmup = to_double(e, origin);
        else if (e.key == "offramp_split") sc.offramp_split = to_double(e, origin);
        else if (e.key == "lc_decision_period_s") sc.lc_decision_period = to_double(e, origin);
        else if (e.key == "lc_cooldown_s") sc.lc_cooldown = to_double(e, origin);
        else if (e.key == "vehicle_length_m") sc.vehicle_length = to_double(e, origin);
        else if (e.key == "ramp_entry_speed_ms") sc.ramp_entry_speed = to_double(e, origin);
        else if (e.key == "free_flow_speed_kmh") sc.free_flow_speed = kmh_to_ms(to_double(e, origin));
        else if (e.key == "metrics_sample_period_s") sc.metrics_sample_period = to_double(e, origin);
        else if (e.key == "vt_micro_coeffs") sc.vt_micro_coeffs_path = e.value;
        else bad_key();
      } else if (section == "geometry") {
        if (e.key == "mainline_length_m") sc.geometry.mainline_length = to_double(e, origin);
        else if (e.key == "lanes") sc.geometry.lanes = static_cast<int>(to_long(e, origin));
        else if (e.key == "diverge_length_m") sc.geometry.diverge_length = to_double(e, origin);
        else if (e.key == "interchange") {
          if (!interchanges_cleared) {
            sc.geometry.interchanges.clear();
            interchanges_cleared = true;
          }
          auto tok = split_ws(e.value);
          if (tok.size() != 4) {
            throw ConfigError(origin + ":" + std::to_string(e.line) +
                              ": interchange = zone off_ramp_m on_ramp_m merge_len_m");
          }
          sc.geometry.interchanges.push_back(
              {tok[0], std::stod(tok[1]), std::stod(tok[2]), std::stod(tok[3])});
        } else bad_key();
      } else if (section == "demand") {
        if (e.key == "interval_s") sc.demand.interval_s = to_double(e, origin);
        else if (e.key == "row") {
          if (!demand_cleared) {
            sc.demand.rows.clear();
            demand_cleared = true;
          }
          auto tok = split_ws(e.value);
          if (tok.size() != 4) {
            throw ConfigError(origin + ":" + std::to_string(e.line) +
                              ": row = zone start_s gp_vph hov_vph");
          }
          sc.demand.rows.push_back({tok[0], std::stod(tok[1]), std::stod(tok[2]), std::stod(tok[3])});
        } else if (e.key == "table") {
          std::ifstream in(e.value);
          if (!in) {
            throw ConfigError(origin + ":" + std::to_string(e.line) +
                              ": cannot open demand table " + e.value);
          }
          sc.demand.rows.clear();
          demand_cleared = true;
          std::string line;
          while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            auto tok = split_ws(line);
            if (tok.size() != 4) throw ConfigError("demand table: expected 4 columns");
            sc.demand.rows.push_back(
                {tok[0], std::stod(tok[1]), std::stod(tok[2]), std::stod(tok[3])});
          }
        } else if (e.key == "offramp_split") sc.offramp_split = to_double(e, origin);
        else bad_key();
      } else if (section == "cacc" || section == "human") {
        IdmParams& p = section == "cacc" ? sc.cacc : sc.human;
        if (e.key == "a") p.max_accel = to_double(e, origin);
        else if (e.key == "b") p.comfort_decel = to_double(e, origin);
        else if (e.key == "coolness") p.coolness = to_double(e, origin);
        else if (e.key == "delta") p.accel_exponent = to_double(e, origin);
        else if (e.key == "desired_speed_kmh") p.desired_speed = kmh_to_ms(to_double(e, origin));
        else if (e.key == "s0_m") p.min_gap = to_double(e, origin);
        else if (e.key == "T_s") p.time_gap = to_double(e, origin);
        else bad_key();
      } else if (section == "lane_change") {
        if (e.key == "politeness") sc.lane_change.politeness = to_double(e, origin);
        else if (e.key == "threshold") sc.lane_change.threshold = to_double(e, origin);
        else if (e.key == "safe_decel") sc.lane_change.safe_decel = to_double(e, origin);
        else if (e.key == "cluster_selection") {
          if (e.value == "min") sc.lane_change.cluster_select_max = false;
          else if (e.value == "max") sc.lane_change.cluster_select_max = true;
          else throw ConfigError(origin + ":" + std::to_string(e.line) +
                                 ": cluster_selection must be min|max");
        } else bad_key();
      } else if (section == "platoon") {
        PlatoonParams& p = sc.platoon;
        if (e.key == "T_intra_s") p.t_intra = to_double(e, origin);
        else if (e.key == "T_inter_s") p.t_inter = to_double(e, origin);
        else if (e.key == "dsrc_range_m") p.dsrc_range = to_double(e, origin);
        else if (e.key == "min_size") p.min_size = static_cast<int>(to_long(e, origin));
        else if (e.key == "max_size") p.max_size = static_cast<int>(to_long(e, origin));
        else if (e.key == "fallback_loss_threshold") p.fallback_loss_threshold = static_cast<int>(to_long(e, origin));
        else if (e.key == "rejoin_hold_s") p.rejoin_hold = to_double(e, origin);
        else if (e.key == "join_gap_tol") p.join_gap_tol = to_double(e, origin);
        else if (e.key == "join_speed_tol_ms") p.join_speed_tol = to_double(e, origin);
        else if (e.key == "catchup_boost_ms") p.catchup_speed_boost = to_double(e, origin);
        else bad_key();
      } else if (section == "comms") {
        ChannelModel& m = sc.channel;
        if (e.key == "model") {
          if (e.value == "ideal") m.kind = ChannelKind::Ideal;
          else if (e.value == "parametric") m.kind = ChannelKind::Parametric;
          else if (e.value == "table") m.kind = ChannelKind::Table;
          else throw ConfigError(origin + ":" + std::to_string(e.line) +
                                 ": model must be ideal|parametric|table");
        } else if (e.key == "max_range_m") m.max_range = to_double(e, origin);
        else if (e.key == "load") m.load = to_double(e, origin);
        else if (e.key == "midpoint_m") m.midpoint = to_double(e, origin);
        else if (e.key == "steepness") m.steepness = to_double(e, origin);
        else if (e.key == "table") {
          ChannelModel loaded = load_table_channel(e.value, m.max_range);
          m.table = loaded.table;
          m.kind = ChannelKind::Table;
        } else bad_key();
      } else {
        throw ConfigError(origin + ": unknown section [" + section + "]");
      }
    }
  }
  cfg.scenario.finalize();
  return cfg;
}

LoadedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::vector<std::string> validate_config_file(const std::string& path) {
  std::vector<std::string> issues;
  LoadedConfig cfg;
  try {
    cfg = load_config_file(path);
  } catch (const std::exception& e) {
    issues.push_back(e.what());
    return issues;
  }
  auto v = validate_scenario(cfg.scenario);
  issues.insert(issues.end(), v.begin(), v.end());
  if (cfg.matrix.strategies.empty()) issues.push_back("run: empty strategy list");
  if (cfg.matrix.mp_values.empty()) issues.push_back("run: empty MP list");
  for (double mp : cfg.matrix.mp_values) {
    if (mp < 0.0 || mp > 1.0) issues.push_back("run: MP outside [0,1]");
  }
  if (cfg.matrix.replications < 1) issues.push_back("run: replications must be >= 1");
  return issues;
}

}  // namespace mlsim

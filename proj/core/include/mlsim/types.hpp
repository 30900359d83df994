#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mlsim {

using VehicleId = std::uint32_t;
inline constexpr VehicleId kNoVehicle = 0;

using PlatoonId = std::uint32_t;
inline constexpr PlatoonId kNoPlatoon = 0;

enum class VehClass : std::uint8_t { GP = 0, HOV = 1, CACC = 2 };

enum class ControlMode : std::uint8_t { ADS = 0, FallbackHuman = 1 };

/// Managed-lane strategy. The leftmost lane (index lanes-1) is the managed lane.
enum class Strategy : std::uint8_t { BASE = 0, UML = 1, MML = 2, DL = 3, DLA = 4 };

inline constexpr Strategy kAllStrategies[] = {Strategy::BASE, Strategy::UML, Strategy::MML,
                                              Strategy::DL, Strategy::DLA};

std::string_view to_string(VehClass c);
std::string_view to_string(Strategy s);
std::string_view to_string(ControlMode m);
std::optional<Strategy> strategy_from_string(std::string_view s);
std::optional<VehClass> veh_class_from_string(std::string_view s);

constexpr double kmh_to_ms(double kmh) { return kmh / 3.6; }
constexpr double ms_to_kmh(double ms) { return ms * 3.6; }

/// Hard fault raised when the model reaches an unphysical state (e.g. same-lane
/// overlap after integration). Carries a diagnostic dump in what().
class SimulationFault : public std::runtime_error {
public:
  explicit SimulationFault(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised on malformed configuration input.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mlsim

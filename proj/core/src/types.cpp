#include "mlsim/types.hpp"

namespace mlsim {

std::string_view to_string(VehClass c) {
  switch (c) {
    case VehClass::GP: return "GP";
    case VehClass::HOV: return "HOV";
    case VehClass::CACC: return "CACC";
  }
  return "?";
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::BASE: return "BASE";
    case Strategy::UML: return "UML";
    case Strategy::MML: return "MML";
    case Strategy::DL: return "DL";
    case Strategy::DLA: return "DLA";
  }
  return "?";
}

std::string_view to_string(ControlMode m) {
  return m == ControlMode::ADS ? "ADS" : "FALLBACK_HUMAN";
}

std::optional<Strategy> strategy_from_string(std::string_view s) {
  for (Strategy st : kAllStrategies) {
    if (s == to_string(st)) return st;
  }
  return std::nullopt;
}

std::optional<VehClass> veh_class_from_string(std::string_view s) {
  if (s == "GP") return VehClass::GP;
  if (s == "HOV") return VehClass::HOV;
  if (s == "CACC") return VehClass::CACC;
  return std::nullopt;
}

}  // namespace mlsim

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lipext/energy.hpp"
#include "lipext/extension.hpp"
#include "lipext/metric.hpp"
#include "lipext/verification.hpp"

namespace lipext::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kExtensionSchema = "lipext.extension/1";
inline constexpr const char* kVerificationSchema = "lipext.verification/1";
inline constexpr const char* kEnergySchema = "lipext.energy/1";
inline constexpr const char* kDemoSchema = "lipext.demo/1";

/// A validated instance file. Masses, when present, are checked against C.
struct LoadedInstance {
  MetricInstance instance;
  std::optional<std::vector<double>> masses;
};

/// Parses and validates an instance document. Structural problems surface as
/// InvalidInstance naming the field.
LoadedInstance parse_instance(const Json& doc);
LoadedInstance load_instance(const std::string& path);

Json to_json(const ScaleSchedule& schedule);
Json to_json(const ExtensionField& field);
Json to_json(const CheckResult& check);
Json to_json(const VerificationReport& report);
Json to_json(const EnergyReport& report);
Json to_json(const RadiusProfile& profile);

/// {"error": {...}} for any exception escaping a command.
Json error_json(const std::exception& e);

void write_json(const std::string& path, const Json& doc);

}  // namespace lipext::cli

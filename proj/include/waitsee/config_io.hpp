#pragma once

// JSON documents: the system configuration and the optional "sim" block.

#include <json.hpp>

#include <string>

#include "waitsee/distributions.hpp"
#include "waitsee/model.hpp"
#include "waitsee/simulator.hpp"

namespace waitsee {

/// Parses {"stations":[...], "switchovers":[...]}. Missing "T" means 0;
/// "r2" may be replaced by "deterministic": true. Throws Parse on shape errors.
Config config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const Config& cfg);

DistributionSpec distribution_from_json(const nlohmann::json& doc);
nlohmann::json distribution_to_json(const DistributionSpec& d);

/// Reads the optional "sim" object; absent keys keep their defaults.
SimConfig sim_config_from_json(const nlohmann::json& doc);

/// Throws Io when the file cannot be read, Parse when it is not JSON.
nlohmann::json load_json_file(const std::string& path);

}  // namespace waitsee

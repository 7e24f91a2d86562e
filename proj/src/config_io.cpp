#include "waitsee/config_io.hpp"

#include <fstream>
#include <sstream>
#include <type_traits>
#include <variant>

namespace waitsee {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw PollingError(ErrorKind::Parse, what); }

double number(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) bad(std::string("missing field '") + key + "'");
  if (!it->is_number()) bad(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

double number_or(const json& obj, const char* key, double fallback) {
  return obj.contains(key) ? number(obj, key) : fallback;
}

std::uint64_t count(const json& obj, const char* key, std::uint64_t fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned()) bad(std::string("field '") + key + "' must be a nonnegative integer");
  return it->get<std::uint64_t>();
}

const json& array(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) bad(std::string("'") + key + "' must be an array");
  return *it;
}

}  // namespace

Config config_from_json(const json& doc) {
  if (!doc.is_object()) bad("configuration must be a JSON object");
  Config cfg;
  for (const auto& s : array(doc, "stations")) {
    if (!s.is_object()) bad("station entries must be objects");
    cfg.stations.push_back({number(s, "lambda"), number(s, "b"), number(s, "b2"), number_or(s, "T", 0.0)});
  }
  for (const auto& w : array(doc, "switchovers")) {
    if (!w.is_object()) bad("switchover entries must be objects");
    const double r = number(w, "r");
    const bool det = w.value("deterministic", false);
    if (w.contains("r2")) {
      auto m = SwitchoverMoments<double>::from_moments(r, number(w, "r2"));
      if (det) m.deterministic = true;
      cfg.switchovers.push_back(m);
    } else if (det) {
      cfg.switchovers.push_back(SwitchoverMoments<double>::fixed(r));
    } else {
      bad("switchover needs 'r2' or \"deterministic\": true");
    }
  }
  return cfg;
}

json config_to_json(const Config& cfg) {
  json doc;
  doc["stations"] = json::array();
  for (const auto& s : cfg.stations) doc["stations"].push_back({{"lambda", s.lambda}, {"b", s.b}, {"b2", s.b2}, {"T", s.T}});
  doc["switchovers"] = json::array();
  for (const auto& w : cfg.switchovers) {
    json e{{"r", w.r}, {"r2", w.r2}};
    if (w.deterministic) e["deterministic"] = true;
    doc["switchovers"].push_back(e);
  }
  return doc;
}

DistributionSpec distribution_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string()) bad("distribution needs a 'kind' string");
  const auto kind = doc["kind"].get<std::string>();
  DistributionSpec d;
  if (kind == "deterministic") {
    d = Deterministic{number(doc, "value")};
  } else if (kind == "exponential") {
    d = Exponential{number(doc, "rate")};
  } else if (kind == "erlang") {
    const double k = number(doc, "k");
    if (k != static_cast<int>(k)) bad("erlang 'k' must be an integer");
    d = Erlang{static_cast<int>(k), number(doc, "rate")};
  } else if (kind == "hyperexponential2") {
    d = HyperExponential2{number(doc, "p"), number(doc, "mu1"), number(doc, "mu2")};
  } else if (kind == "gamma") {
    d = Gamma{number(doc, "shape"), number(doc, "scale")};
  } else {
    bad("unknown distribution kind '" + kind + "'");
  }
  check_parameters(d);
  return d;
}

json distribution_to_json(const DistributionSpec& d) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Deterministic>) return {{"kind", "deterministic"}, {"value", x.value}};
        else if constexpr (std::is_same_v<T, Exponential>) return {{"kind", "exponential"}, {"rate", x.rate}};
        else if constexpr (std::is_same_v<T, Erlang>) return {{"kind", "erlang"}, {"k", x.k}, {"rate", x.rate}};
        else if constexpr (std::is_same_v<T, HyperExponential2>)
          return {{"kind", "hyperexponential2"}, {"p", x.p}, {"mu1", x.mu1}, {"mu2", x.mu2}};
        else return {{"kind", "gamma"}, {"shape", x.shape}, {"scale", x.scale}};
      },
      d);
}

SimConfig sim_config_from_json(const json& doc) {
  SimConfig sim;
  if (!doc.is_object() || !doc.contains("sim")) return sim;
  const auto& s = doc["sim"];
  if (!s.is_object()) bad("'sim' must be an object");
  if (s.contains("strategy")) {
    if (!s["strategy"].is_string()) bad("'strategy' must be a string");
    sim.strategy = strategy_from_string(s["strategy"].get<std::string>());
  }
  sim.seed = count(s, "seed", sim.seed);
  sim.warmup_arrivals = count(s, "warmup", sim.warmup_arrivals);
  sim.measured_arrivals = count(s, "arrivals", sim.measured_arrivals);
  sim.batches = static_cast<int>(count(s, "batches", static_cast<std::uint64_t>(sim.batches)));
  if (s.contains("service_dists"))
    for (const auto& d : array(s, "service_dists")) sim.service.push_back(distribution_from_json(d));
  if (s.contains("switchover_dists"))
    for (const auto& d : array(s, "switchover_dists")) sim.switchover.push_back(distribution_from_json(d));
  sim.boxma_all_stations = s.value("boxma_all_stations", false);
  return sim;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PollingError(ErrorKind::Io, "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw PollingError(ErrorKind::Parse, path + ": " + e.what());
  }
}

}  // namespace waitsee

#pragma once

// JSON experiment configuration.
//
// {
//   "experiment_id": "fig2",
//   "window": {"side_length": 60, "resolution": 1200},
//   "tiers": [
//     {"power_dbm": 53, "density": 1, "path_loss_exponent": 3.5,
//      "fading": {"kind": "lognormal", "sigma": 2}},
//     {"power_dbm": 33, "density": 5, "path_loss_exponent": 3.5,
//      "fading": {"kind": "lognormal", "sigma": 4}}
//   ],
//   "strategy": "max_power",            // max_power | max_sir | nearest
//   "gain_mode": "per_ap",              // per_ap | per_evaluation_point
//   "replications": 20,
//   "master_seed": 1,
//   "significance": 0.01,
//   "confidence": 0.95,
//   "threads": 0,
//   "output": {"dir": "out", "raw_cells": false, "raster": false, "raster_replications": 1},
//   "sweep": {"parameter": "density", "tier": 2, "values": [1, 2, 5, 10]}
// }
//
// Powers are in dBm and converted with P = 10^((dBm - 30) / 10) W. Tier
// numbers in "sweep" are 1-based, as in the CSV outputs. Fading kinds:
// deterministic, lognormal (sigma: natural-log std. dev.), exponential (scale).

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hetcell/association.hpp"
#include "hetcell/error.hpp"
#include "hetcell/fading.hpp"
#include "hetcell/geometry.hpp"
#include "hetcell/stats.hpp"
#include "hetcell/tier.hpp"

namespace hetcell {

// Configuration problem; line() is 0 when no source position is known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0, std::string path = {})
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line),
        path_(std::move(path)) {}

  int line() const noexcept { return line_; }
  const std::string& path() const noexcept { return path_; }

 private:
  int line_;
  std::string path_;
};

struct TierSpec {
  double power_dbm = 30.0;
  double density = 1.0;
  double path_loss_exponent = 4.0;
  FadingModel fading;

  friend bool operator==(const TierSpec&, const TierSpec&) = default;
};

enum class SweepParameter { kDensity, kSigma, kPathLossExponent };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::kDensity;
  std::size_t tier = 0;  // zero-based
  std::vector<double> values;

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct OutputOptions {
  std::string dir = ".";
  bool raw_cells = false;
  bool raster = false;
  std::size_t raster_replications = 1;

  friend bool operator==(const OutputOptions&, const OutputOptions&) = default;
};

struct SimulationConfig {
  std::string experiment_id = "experiment";
  double side_length = 30.0;
  std::size_t resolution = 1500;
  std::vector<TierSpec> tiers;
  AssociationStrategy strategy = AssociationStrategy::kMaxPower;
  GainFieldMode gain_mode = GainFieldMode::kPerAP;
  std::size_t replications = 20;
  Seed master_seed = 1;
  double significance = 0.01;
  double confidence = 0.95;
  unsigned threads = 0;
  OutputOptions output;
  std::optional<SweepSpec> sweep;

  friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

inline std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::kDensity: return "density";
    case SweepParameter::kSigma: return "sigma";
    case SweepParameter::kPathLossExponent: return "path_loss_exponent";
  }
  return "?";
}

inline std::vector<TierConfig> linear_tiers(const SimulationConfig& config) {
  std::vector<TierConfig> out;
  for (const auto& t : config.tiers) {
    out.push_back({t.density, dbm_to_watt(t.power_dbm), t.path_loss_exponent, t.fading});
  }
  return out;
}

inline ExperimentSetup to_setup(const SimulationConfig& config) {
  ExperimentSetup s;
  s.window = Window(config.side_length, config.resolution);
  s.tiers = linear_tiers(config);
  s.strategy = config.strategy;
  s.gain_mode = config.gain_mode;
  s.replications = config.replications;
  s.master_seed = config.master_seed;
  s.significance = config.significance;
  s.confidence = config.confidence;
  s.keep_raw_cells = config.output.raw_cells;
  s.threads = config.threads;
  return s;
}

inline AreaStatistics run_experiment(const SimulationConfig& config) { return run_experiment(to_setup(config)); }

namespace detail {

// Maps JSON pointers ("/tiers/0/density") to the 1-based line where each
// value starts. Assumes `text` is already known to be valid JSON.
inline std::map<std::string, int> json_value_lines(const std::string& text) {
  struct Frame {
    bool is_object;
    std::size_t index;
    std::string key;
  };
  std::map<std::string, int> lines;
  std::vector<Frame> stack;
  int line = 1;
  bool expecting_key = false;

  auto pointer = [&stack] {
    std::string p;
    for (const auto& f : stack) p += "/" + (f.is_object ? f.key : std::to_string(f.index));
    return p;
  };
  auto begin_value = [&] {
    if (!stack.empty() || lines.empty()) lines.emplace(pointer(), line);
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\') ++i;
        if (i < text.size()) s += text[i];
      }
      if (expecting_key) {
        stack.back().key = s;
        expecting_key = false;
      } else {
        begin_value();
      }
    } else if (c == '{' || c == '[') {
      begin_value();
      stack.push_back({c == '{', 0, {}});
      expecting_key = c == '{';
    } else if (c == '}' || c == ']') {
      stack.pop_back();
      expecting_key = false;
    } else if (c == ',') {
      if (!stack.empty()) {
        ++stack.back().index;
        expecting_key = stack.back().is_object;
      }
    } else if (c != ':' && c != ' ' && c != '\t' && c != '\r') {
      begin_value();
      while (i + 1 < text.size() && std::string_view(",}] \t\r\n").find(text[i + 1]) == std::string_view::npos) ++i;
    }
  }
  return lines;
}

class ConfigReader {
 public:
  explicit ConfigReader(const std::string& text) : lines_(json_value_lines(text)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    int line = 0;
    for (std::string p = path; !p.empty(); p = p.substr(0, p.rfind('/'))) {
      if (auto it = lines_.find(p); it != lines_.end()) {
        line = it->second;
        break;
      }
    }
    throw ConfigError((path.empty() ? std::string("/") : path) + ": " + message, line, path);
  }

  const nlohmann::json& require(const nlohmann::json& obj, const std::string& path, const char* key) const {
    if (!obj.is_object() || !obj.contains(key)) fail(path, std::string("missing required field \"") + key + "\"");
    return obj.at(key);
  }

  double number(const nlohmann::json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  std::uint64_t unsigned_integer(const nlohmann::json& v, const std::string& path) const {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      if (!v.is_number_unsigned()) fail(path, "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const nlohmann::json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  bool boolean(const nlohmann::json& v, const std::string& path) const {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }

 private:
  std::map<std::string, int> lines_;
};

inline FadingModel parse_fading(const ConfigReader& rd, const nlohmann::json& j, const std::string& path) {
  const std::string kind = rd.string(rd.require(j, path, "kind"), path + "/kind");
  if (kind == "deterministic" || kind == "none") return FadingModel::deterministic();
  if (kind == "lognormal") {
    const double sigma = rd.number(rd.require(j, path, "sigma"), path + "/sigma");
    if (!(sigma >= 0.0)) rd.fail(path + "/sigma", "lognormal sigma must be >= 0");
    return FadingModel::lognormal(sigma);
  }
  if (kind == "exponential") {
    const double scale = j.contains("scale") ? rd.number(j.at("scale"), path + "/scale") : 1.0;
    if (!(scale > 0.0)) rd.fail(path + "/scale", "exponential scale must be > 0");
    return FadingModel::exponential(scale);
  }
  rd.fail(path + "/kind", "unknown fading kind \"" + kind + "\" (deterministic, lognormal, exponential)");
}

}  // namespace detail

inline SimulationConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) line += text[i] == '\n';
    throw ConfigError(std::string("malformed JSON: ") + e.what(), line);
  }
  const detail::ConfigReader rd(text);
  if (!j.is_object()) rd.fail("", "configuration must be a JSON object");

  SimulationConfig c;
  if (j.contains("experiment_id")) c.experiment_id = rd.string(j["experiment_id"], "/experiment_id");

  const auto& win = rd.require(j, "", "window");
  c.side_length = rd.number(rd.require(win, "/window", "side_length"), "/window/side_length");
  if (!(c.side_length > 0.0)) rd.fail("/window/side_length", "side length must be positive");
  c.resolution = rd.unsigned_integer(rd.require(win, "/window", "resolution"), "/window/resolution");
  if (c.resolution < 2) rd.fail("/window/resolution", "resolution must be at least 2");

  const auto& tiers = rd.require(j, "", "tiers");
  if (!tiers.is_array()) rd.fail("/tiers", "expected an array of tiers");
  if (tiers.empty()) rd.fail("/tiers", "at least one tier is required");
  for (std::size_t k = 0; k < tiers.size(); ++k) {
    const std::string p = "/tiers/" + std::to_string(k);
    const auto& t = tiers[k];
    TierSpec spec;
    spec.power_dbm = rd.number(rd.require(t, p, "power_dbm"), p + "/power_dbm");
    spec.density = rd.number(rd.require(t, p, "density"), p + "/density");
    if (!(spec.density > 0.0)) rd.fail(p + "/density", "density must be positive");
    spec.path_loss_exponent = rd.number(rd.require(t, p, "path_loss_exponent"), p + "/path_loss_exponent");
    if (!(spec.path_loss_exponent > 2.0)) rd.fail(p + "/path_loss_exponent", "path-loss exponent must exceed 2");
    spec.fading = t.contains("fading") ? detail::parse_fading(rd, t["fading"], p + "/fading")
                                       : FadingModel::deterministic();
    c.tiers.push_back(spec);
  }

  if (j.contains("strategy")) {
    const std::string s = rd.string(j["strategy"], "/strategy");
    if (s == "max_power") c.strategy = AssociationStrategy::kMaxPower;
    else if (s == "max_sir") c.strategy = AssociationStrategy::kMaxSIR;
    else if (s == "nearest") c.strategy = AssociationStrategy::kNearest;
    else rd.fail("/strategy", "unknown strategy \"" + s + "\" (max_power, max_sir, nearest)");
  }
  if (j.contains("gain_mode")) {
    const std::string s = rd.string(j["gain_mode"], "/gain_mode");
    if (s == "per_ap") c.gain_mode = GainFieldMode::kPerAP;
    else if (s == "per_evaluation_point") c.gain_mode = GainFieldMode::kPerEvaluationPoint;
    else rd.fail("/gain_mode", "unknown gain mode \"" + s + "\" (per_ap, per_evaluation_point)");
  }
  if (j.contains("replications")) {
    c.replications = rd.unsigned_integer(j["replications"], "/replications");
    if (c.replications < 2) rd.fail("/replications", "at least 2 replications are required");
  }
  if (j.contains("master_seed")) c.master_seed = rd.unsigned_integer(j["master_seed"], "/master_seed");
  if (j.contains("significance")) {
    c.significance = rd.number(j["significance"], "/significance");
    if (!(c.significance > 0.0 && c.significance < 1.0)) rd.fail("/significance", "must lie in (0, 1)");
  }
  if (j.contains("confidence")) {
    c.confidence = rd.number(j["confidence"], "/confidence");
    if (!(c.confidence > 0.0 && c.confidence < 1.0)) rd.fail("/confidence", "must lie in (0, 1)");
  }
  if (j.contains("threads")) c.threads = static_cast<unsigned>(rd.unsigned_integer(j["threads"], "/threads"));

  if (j.contains("output")) {
    const auto& o = j["output"];
    if (!o.is_object()) rd.fail("/output", "expected an object");
    if (o.contains("dir")) c.output.dir = rd.string(o["dir"], "/output/dir");
    if (o.contains("raw_cells")) c.output.raw_cells = rd.boolean(o["raw_cells"], "/output/raw_cells");
    if (o.contains("raster")) c.output.raster = rd.boolean(o["raster"], "/output/raster");
    if (o.contains("raster_replications")) {
      c.output.raster_replications = rd.unsigned_integer(o["raster_replications"], "/output/raster_replications");
    }
  }

  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    SweepSpec sweep;
    const std::string param = rd.string(rd.require(s, "/sweep", "parameter"), "/sweep/parameter");
    if (param == "density") sweep.parameter = SweepParameter::kDensity;
    else if (param == "sigma") sweep.parameter = SweepParameter::kSigma;
    else if (param == "path_loss_exponent") sweep.parameter = SweepParameter::kPathLossExponent;
    else rd.fail("/sweep/parameter", "sweep parameter must be density, sigma or path_loss_exponent");
    const auto tier = rd.unsigned_integer(rd.require(s, "/sweep", "tier"), "/sweep/tier");
    if (tier < 1 || tier > c.tiers.size()) rd.fail("/sweep/tier", "tier number out of range (tiers are 1-based)");
    sweep.tier = tier - 1;
    const auto& values = rd.require(s, "/sweep", "values");
    if (!values.is_array() || values.empty()) rd.fail("/sweep/values", "expected a nonempty array of numbers");
    for (std::size_t v = 0; v < values.size(); ++v) {
      sweep.values.push_back(rd.number(values[v], "/sweep/values/" + std::to_string(v)));
    }
    c.sweep = sweep;
  }

  try {
    validate(std::span<const TierConfig>(linear_tiers(c)));
  } catch (const InvalidArgument& e) {
    rd.fail("/tiers", e.what());
  }
  return c;
}

inline nlohmann::json to_json(const FadingModel& f) {
  nlohmann::json j{{"kind", std::string(to_string(f.kind))}};
  if (f.kind == FadingKind::kLogNormal) j["sigma"] = f.sigma;
  if (f.kind == FadingKind::kExponential) j["scale"] = f.scale;
  return j;
}

inline nlohmann::json to_json(const SimulationConfig& c) {
  nlohmann::json tiers = nlohmann::json::array();
  for (const auto& t : c.tiers) {
    tiers.push_back({{"power_dbm", t.power_dbm},
                     {"density", t.density},
                     {"path_loss_exponent", t.path_loss_exponent},
                     {"fading", to_json(t.fading)}});
  }
  nlohmann::json j{{"experiment_id", c.experiment_id},
                   {"window", {{"side_length", c.side_length}, {"resolution", c.resolution}}},
                   {"tiers", tiers},
                   {"strategy", std::string(to_string(c.strategy))},
                   {"gain_mode", std::string(to_string(c.gain_mode))},
                   {"replications", c.replications},
                   {"master_seed", c.master_seed},
                   {"significance", c.significance},
                   {"confidence", c.confidence},
                   {"threads", c.threads},
                   {"output",
                    {{"dir", c.output.dir},
                     {"raw_cells", c.output.raw_cells},
                     {"raster", c.output.raster},
                     {"raster_replications", c.output.raster_replications}}}};
  if (c.sweep) {
    j["sweep"] = {{"parameter", std::string(to_string(c.sweep->parameter))},
                  {"tier", c.sweep->tier + 1},
                  {"values", c.sweep->values}};
  }
  return j;
}

inline std::string dump_config(const SimulationConfig& c) { return to_json(c).dump(2) + "\n"; }

// FNV-1a of the canonical (sorted-key, compact) JSON form.
inline std::uint64_t config_hash(const SimulationConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string provenance_line(const SimulationConfig& c) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(c)));
  return "# experiment=" + c.experiment_id + " seed=" + std::to_string(c.master_seed) + " config_hash=" + hash;
}

}  // namespace hetcell

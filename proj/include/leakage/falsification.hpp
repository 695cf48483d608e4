#pragma once

// Strict falsification: a model is falsified only by an observed event to
// which it assigned probability exactly zero. Probability zero is read off
// the family's support, so an event with mass 1e-300 does not falsify.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "leakage/evidence.hpp"
#include "leakage/predictive.hpp"

namespace leakage {

struct Observation {
  double value = 0.0;
  std::optional<double> resolution;  // measurement step of the recording device
};

enum class ObservationMode { point_event, interval_event };

inline const char* to_string(ObservationMode m) {
  return m == ObservationMode::point_event ? "point_event" : "interval_event";
}

inline ObservationMode parse_observation_mode(std::string_view s) {
  if (s == "point" || s == "point_event") return ObservationMode::point_event;
  if (s == "interval" || s == "interval_event") return ObservationMode::interval_event;
  throw std::invalid_argument("unknown observation mode '" + std::string(s) + "'");
}

struct FalsificationVerdict {
  bool falsified = false;
  std::optional<Observation> witness;
  ObservationMode mode = ObservationMode::point_event;
};

/// Probability of the observed event is zero. In interval mode the event is
/// the reading's cell [value - r/2, value + r/2), so adjacent readings tile the line.
inline bool is_impossible(const PredictiveDistribution& d, const Observation& obs, ObservationMode mode) {
  if (!std::isfinite(obs.value)) throw std::invalid_argument("observation value must be finite");
  if (mode == ObservationMode::point_event) return !has_atom(d, obs.value);
  if (!obs.resolution) throw std::invalid_argument("interval_event mode requires a resolution for every observation");
  const double r = *obs.resolution;
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("resolution must be a positive finite number");
  return !has_mass_in(d, obs.value - 0.5 * r, obs.value + 0.5 * r);
}

inline FalsificationVerdict is_falsified(const PredictiveDistribution& d, const std::vector<Observation>& obs,
                                         ObservationMode mode = ObservationMode::point_event) {
  if (obs.empty()) throw std::invalid_argument("is_falsified: no observations");
  FalsificationVerdict v;
  v.mode = mode;
  for (const auto& o : obs) {
    if (is_impossible(d, o, mode)) {
      v.falsified = true;
      v.witness = o;
      break;
    }
  }
  // Validate the remaining observations even after a witness is found.
  for (const auto& o : obs) {
    if (!std::isfinite(o.value)) throw std::invalid_argument("observation value must be finite");
    if (mode == ObservationMode::interval_event && !o.resolution)
      throw std::invalid_argument("interval_event mode requires a resolution for every observation");
  }
  return v;
}

/// True when no value the evidence allows can ever falsify the model
/// under point-event observation.
inline bool never_falsifiable(const PredictiveDistribution& d, const Evidence& e) {
  if (e.is_continuous()) throw std::invalid_argument("never_falsifiable: enumerate only finite supports");
  auto values = e.enumerate();
  if (!values) throw std::invalid_argument("never_falsifiable: enumerate only finite supports");
  if (d.kind() == Kind::continuous) return false;
  for (double y : *values)
    if (!has_atom(d, y)) return false;
  return true;
}

inline void to_json(nlohmann::json& j, const Observation& o) {
  j = {{"value", o.value}};
  if (o.resolution) j["resolution"] = *o.resolution;
}

inline void to_json(nlohmann::json& j, const FalsificationVerdict& v) {
  j = {{"falsified", v.falsified}, {"mode", to_string(v.mode)}};
  j["witness"] = v.witness ? nlohmann::json(*v.witness) : nlohmann::json(nullptr);
}

}  // namespace leakage

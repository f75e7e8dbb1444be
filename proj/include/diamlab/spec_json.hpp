#pragma once

#include <json.hpp>

#include "diamlab/sampler.hpp"

namespace diamlab {

/// Builds a DistributionSpec from an object such as
///   {"family": "sector", "d": 3, "cap_center": [0, 0, 1], "cap_angle": 0.5,
///    "base": {"family": "uniform-sphere", "d": 3}}
/// Recognised keys: family, d, alpha, atom, cap_center, cap_angle, base,
/// directions, probs, density = {kind, params}. Unknown keys and malformed
/// values raise ConfigError.
DistributionSpec spec_from_json(const nlohmann::json& j);

/// Canonical JSON form; spec_from_json(spec_to_json(s)) describes the same law.
nlohmann::json spec_to_json(const DistributionSpec& spec);

}  // namespace diamlab

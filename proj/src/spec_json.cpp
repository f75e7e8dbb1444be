#include "diamlab/spec_json.hpp"

#include <set>
#include <string>

#include "diamlab/errors.hpp"

namespace diamlab {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown distribution field '" + key + "'");
  }
}

template <typename T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing distribution field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("malformed distribution field '") + key + "'");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> from_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::string canonical_family(std::string name) {
  if (name == "ball") return "uniform-ball";
  if (name == "sphere") return "uniform-sphere";
  if (name == "circle") return "circle-density";
  return name;
}

AngularDensity density_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("density must be an object");
  reject_unknown(j, {"kind", "params"});
  const auto kind = get<std::string>(j, "kind");
  if (kind == "uniform") return AngularDensity::uniform();
  if (kind == "cosine_mix") return AngularDensity::cosine_mix(get<std::vector<double>>(j, "params"));
  throw ConfigError("unknown density kind '" + kind + "'");
}

json spherical_to_json(const SphericalFamily& f) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformBall>) {
          return {{"family", "uniform-ball"}, {"d", s.d}};
        } else if constexpr (std::is_same_v<T, UniformSphere>) {
          return {{"family", "uniform-sphere"}, {"d", s.d}};
        } else {
          return {{"family", "radial-power"}, {"d", s.d}, {"alpha", s.alpha}, {"atom", s.atom}};
        }
      },
      f);
}

}  // namespace

DistributionSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("distribution must be a JSON object");
  const std::string family = canonical_family(get<std::string>(j, "family"));

  if (family == "uniform-ball") {
    reject_unknown(j, {"family", "d"});
    return DistributionSpec::uniform_ball(get<int>(j, "d"));
  }
  if (family == "uniform-sphere") {
    reject_unknown(j, {"family", "d"});
    return DistributionSpec::uniform_sphere(get<int>(j, "d"));
  }
  if (family == "radial-power") {
    reject_unknown(j, {"family", "d", "alpha", "atom"});
    return DistributionSpec::radial_power(get<int>(j, "d"), get_or<double>(j, "alpha", 0.0),
                                          get_or<double>(j, "atom", 0.0));
  }
  if (family == "sector") {
    reject_unknown(j, {"family", "d", "cap_center", "cap_angle", "base"});
    const int d = get<int>(j, "d");
    const DistributionSpec base = j.contains("base") ? spec_from_json(j.at("base"))
                                                     : DistributionSpec::uniform_ball(d);
    if (base.dim() != d) throw ConfigError("sector base dimension differs from d");
    return DistributionSpec::sector(base, to_vector(get<std::vector<double>>(j, "cap_center")),
                                    get<double>(j, "cap_angle"));
  }
  if (family == "segments") {
    reject_unknown(j, {"family", "d", "directions", "probs"});
    std::vector<Eigen::VectorXd> dirs;
    for (const auto& row : get<std::vector<std::vector<double>>>(j, "directions")) {
      dirs.push_back(to_vector(row));
    }
    auto spec = DistributionSpec::segments(std::move(dirs), get<std::vector<double>>(j, "probs"));
    if (j.contains("d") && get<int>(j, "d") != spec.dim()) {
      throw ConfigError("segment directions do not match d");
    }
    return spec;
  }
  if (family == "circle-density") {
    reject_unknown(j, {"family", "d", "density"});
    if (j.contains("d") && get<int>(j, "d") != 2) throw ConfigError("circle density requires d = 2");
    return DistributionSpec::circle(j.contains("density") ? density_from_json(j.at("density"))
                                                          : AngularDensity::uniform());
  }
  throw ConfigError("unknown distribution family '" + family + "'");
}

json spec_to_json(const DistributionSpec& spec) {
  return std::visit(
      [&](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sector>) {
          return {{"family", "sector"},
                  {"d", spec.dim()},
                  {"cap_center", from_vector(s.cap_center)},
                  {"cap_angle", s.cap_angle},
                  {"base", spherical_to_json(s.base)}};
        } else if constexpr (std::is_same_v<T, SegmentMixture>) {
          json dirs = json::array();
          for (const auto& x : s.directions) dirs.push_back(from_vector(x));
          return {{"family", "segments"}, {"d", spec.dim()}, {"directions", dirs}, {"probs", s.probs}};
        } else if constexpr (std::is_same_v<T, CircleDensity>) {
          return {{"family", "circle-density"},
                  {"d", 2},
                  {"density", {{"kind", s.density.kind_name()}, {"params", s.density.params()}}}};
        } else {
          return spherical_to_json(SphericalFamily{s});
        }
      },
      spec.variant());
}

}  // namespace diamlab

#include "diamlab/angular_density.hpp"

#include <cmath>
#include <utility>

#include "diamlab/errors.hpp"
#include "diamlab/limits.hpp"

namespace diamlab {

AngularDensity::AngularDensity(Kind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)) {
  double amp = 0;
  for (std::size_t k = 0; k < params_.size(); k += 2) amp += std::abs(params_[k]);
  sup_bound_ = (1.0 + amp) / (2.0 * kPi);
}

AngularDensity AngularDensity::uniform() { return AngularDensity(Kind::Uniform, {}); }

AngularDensity AngularDensity::cosine_mix(std::vector<double> params) {
  if (params.size() % 2 != 0) {
    throw ConfigError("cosine_mix params must be (amplitude, phase) pairs");
  }
  for (double p : params) {
    if (!std::isfinite(p)) throw ConfigError("cosine_mix params must be finite");
  }
  AngularDensity f(Kind::CosineMix, std::move(params));

  constexpr int kNodes = 4096;
  const double h = 2.0 * kPi / kNodes;
  double mass = 0;
  for (int i = 0; i < kNodes; ++i) {
    const double v = f(i * h);
    if (v < -1e-15) throw ConfigError("angular density is negative");
    mass += v * h;
  }
  if (std::abs(mass - 1.0) > 1e-8) throw ConfigError("angular density does not integrate to 1");
  return f;
}

std::string AngularDensity::kind_name() const {
  return kind_ == Kind::Uniform ? "uniform" : "cosine_mix";
}

double AngularDensity::operator()(double u) const {
  double s = 1.0;
  for (std::size_t k = 0; k < params_.size(); k += 2) {
    const double harmonic = static_cast<double>(k / 2 + 1);
    s += params_[k] * std::cos(harmonic * (u - params_[k + 1]));
  }
  return s / (2.0 * kPi);
}

}  // namespace diamlab

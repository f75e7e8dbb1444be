#pragma once

#include <string>
#include <vector>

namespace diamlab {

/// Probability density of an angle on [0, 2pi), describing a law on the unit
/// circle.
///
/// Kinds:
///   uniform     f(u) = 1 / (2 pi)
///   cosine_mix  f(u) = (1 + sum_k a_k cos(k (u - phi_k))) / (2 pi), k = 1, 2, ...
///               with params = {a_1, phi_1, a_2, phi_2, ...}
class AngularDensity {
 public:
  enum class Kind { Uniform, CosineMix };

  static AngularDensity uniform();
  // Throws ConfigError when params has odd length or the density goes
  // negative / fails to integrate to 1 on the 4096-node check grid.
  static AngularDensity cosine_mix(std::vector<double> params);

  Kind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  std::string kind_name() const;

  double operator()(double u) const;

  // An upper bound for the density, used by rejection sampling.
  double sup_bound() const { return sup_bound_; }

 private:
  AngularDensity(Kind kind, std::vector<double> params);

  Kind kind_;
  std::vector<double> params_;
  double sup_bound_;
};

}  // namespace diamlab

#pragma once

// Point laws on the unit ball and the binomial / Poisson processes built from
// them.

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "diamlab/angular_density.hpp"
#include "diamlab/geom.hpp"
#include "diamlab/rng.hpp"

namespace diamlab {

struct UniformBall {
  int d;
};

struct UniformSphere {
  int d;
};

/// Spherically symmetric law whose radial deficit eta = 1 - |xi| is 0 with
/// probability `atom` and otherwise has CDF s^alpha on [0, 1].
struct RadialPower {
  int d;
  double alpha;
  double atom;
};

using SphericalFamily = std::variant<UniformBall, UniformSphere, RadialPower>;

/// A spherical law conditioned on the double cone {t x : x in A or -A, t in [0, 1]},
/// A the cap of half-angle cap_angle around cap_center.
struct Sector {
  SphericalFamily base;
  Eigen::VectorXd cap_center;
  double cap_angle;
  double acceptance;  // probability that a base draw lands in the cone
};

/// Uniform points on diameters [-x_i, x_i], segment i chosen with probability p_i.
struct SegmentMixture {
  std::vector<Eigen::VectorXd> directions;
  std::vector<double> probs;
};

/// Points on the unit circle with angular density f.
struct CircleDensity {
  AngularDensity density;
};

/// Validated description of one point law. Build through the factories.
class DistributionSpec {
 public:
  using Variant = std::variant<UniformBall, UniformSphere, RadialPower, Sector, SegmentMixture, CircleDensity>;

  static DistributionSpec uniform_ball(int d);
  static DistributionSpec uniform_sphere(int d);
  static DistributionSpec radial_power(int d, double alpha, double atom = 0.0);
  static DistributionSpec sector(const DistributionSpec& base, Eigen::VectorXd cap_center, double cap_angle);
  static DistributionSpec segments(std::vector<Eigen::VectorXd> directions, std::vector<double> probs);
  static DistributionSpec circle(AngularDensity density);

  const Variant& variant() const { return v_; }
  int dim() const;
  std::string family() const;
  bool spherically_symmetric() const;

 private:
  explicit DistributionSpec(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

struct SampledPoint {
  Eigen::VectorXd coords;
  double radial_deficit;  // 1 - |coords|, exact where the law knows it
};

/// One point from the law.
SampledPoint sample_point(const DistributionSpec& spec, Rng& rng);

/// Exactly n i.i.d. points.
PointCloudd sample_binomial_process(const DistributionSpec& spec, std::size_t n, Rng& rng);

/// Poisson(mean) many i.i.d. points; the cloud may be empty.
PointCloudd sample_poisson_process(const DistributionSpec& spec, double mean, Rng& rng);

}  // namespace diamlab

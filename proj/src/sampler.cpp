#include "diamlab/sampler.hpp"

#include <cmath>
#include <numeric>

#include "diamlab/errors.hpp"
#include "diamlab/limits.hpp"

namespace diamlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(int d, int min_d) {
  if (d < min_d) throw ConfigError("dimension must be >= " + std::to_string(min_d));
}

// Uniform direction: normalised standard Gaussian vector.
void uniform_direction(Rng& rng, int d, double* out) {
  for (;;) {
    double s = 0;
    for (int k = 0; k < d; ++k) {
      out[k] = rng.normal();
      s += out[k] * out[k];
    }
    if (s > 0) {
      const double inv = 1.0 / std::sqrt(s);
      for (int k = 0; k < d; ++k) out[k] *= inv;
      return;
    }
  }
}

// Radial deficit of the spherical families.
double radial_deficit(const UniformBall& b, Rng& rng) {
  // |xi| = U^{1/d}; 1 - U^{1/d} via expm1 keeps precision near the boundary
  return -std::expm1(std::log(rng.uniform_open()) / b.d);
}

double radial_deficit(const UniformSphere&, Rng&) { return 0.0; }

double radial_deficit(const RadialPower& r, Rng& rng) {
  if (r.atom >= 1.0) return 0.0;
  if (r.atom > 0.0 && rng.uniform() < r.atom) return 0.0;
  return std::pow(rng.uniform(), 1.0 / r.alpha);
}

void sample_spherical(const SphericalFamily& family, Rng& rng, double* out, double& eta) {
  std::visit(
      [&](const auto& f) {
        uniform_direction(rng, f.d, out);
        eta = radial_deficit(f, rng);
        const double radius = 1.0 - eta;
        for (int k = 0; k < f.d; ++k) out[k] *= radius;
      },
      family);
}

int family_dim(const SphericalFamily& f) {
  return std::visit([](const auto& x) { return x.d; }, f);
}

void sample_into(const DistributionSpec& spec, Rng& rng, double* out, double& eta) {
  std::visit(
      Overloaded{
          [&](const UniformBall& s) { sample_spherical(s, rng, out, eta); },
          [&](const UniformSphere& s) { sample_spherical(s, rng, out, eta); },
          [&](const RadialPower& s) { sample_spherical(s, rng, out, eta); },
          [&](const Sector& s) {
            const int d = static_cast<int>(s.cap_center.size());
            const double cos_angle = std::cos(s.cap_angle);
            for (;;) {
              sample_spherical(s.base, rng, out, eta);
              if (s.cap_angle >= 0.5 * kPi) return;
              double dot = 0;
              for (int k = 0; k < d; ++k) dot += out[k] * s.cap_center[k];
              if (std::abs(dot) >= cos_angle * (1.0 - eta)) return;
            }
          },
          [&](const SegmentMixture& s) {
            const double u = rng.uniform();
            std::size_t i = 0;
            double cum = s.probs[0];
            while (u >= cum && i + 1 < s.probs.size()) cum += s.probs[++i];
            const double t = 2.0 * rng.uniform() - 1.0;
            const Eigen::VectorXd& x = s.directions[i];
            for (Eigen::Index k = 0; k < x.size(); ++k) out[k] = t * x[k];
            eta = 1.0 - std::abs(t);
          },
          [&](const CircleDensity& s) {
            const double bound = s.density.sup_bound();
            double theta;
            do {
              theta = 2.0 * kPi * rng.uniform();
            } while (rng.uniform() * bound > s.density(theta));
            out[0] = std::cos(theta);
            out[1] = std::sin(theta);
            eta = 0.0;
          },
      },
      spec.variant());
}

PointCloudd sample_cloud(const DistributionSpec& spec, std::size_t n, Rng& rng) {
  const int d = spec.dim();
  PointCloudd::Matrix points(d, static_cast<Eigen::Index>(n));
  PointCloudd::Vector eta(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    sample_into(spec, rng, points.col(col).data(), eta[col]);
  }
  if (n == 0) return PointCloudd(d);
  return PointCloudd(std::move(points), std::move(eta));
}

}  // namespace

DistributionSpec DistributionSpec::uniform_ball(int d) {
  require_dim(d, 2);
  return DistributionSpec(UniformBall{d});
}

DistributionSpec DistributionSpec::uniform_sphere(int d) {
  require_dim(d, 2);
  return DistributionSpec(UniformSphere{d});
}

DistributionSpec DistributionSpec::radial_power(int d, double alpha, double atom) {
  require_dim(d, 2);
  if (!(atom >= 0.0 && atom <= 1.0)) throw ConfigError("atom must lie in [0, 1]");
  if (!std::isfinite(alpha) || alpha < 0.0) throw ConfigError("alpha must be finite and >= 0");
  if (atom < 1.0 && !(alpha > 0.0)) {
    throw ConfigError("alpha must be > 0 unless the whole mass sits on the sphere (atom = 1)");
  }
  return DistributionSpec(RadialPower{d, alpha, atom});
}

DistributionSpec DistributionSpec::sector(const DistributionSpec& base, Eigen::VectorXd cap_center,
                                          double cap_angle) {
  SphericalFamily family;
  if (const auto* b = std::get_if<UniformBall>(&base.v_)) {
    family = *b;
  } else if (const auto* s = std::get_if<UniformSphere>(&base.v_)) {
    family = *s;
  } else if (const auto* r = std::get_if<RadialPower>(&base.v_)) {
    family = *r;
  } else {
    throw ConfigError("sector base must be a spherically symmetric family");
  }
  const int d = base.dim();
  if (cap_center.size() != d) throw ConfigError("cap_center dimension does not match base");
  const double len = cap_center.norm();
  if (!(len > 0) || !std::isfinite(len)) throw ConfigError("cap_center must be a nonzero vector");
  cap_center /= len;
  if (!(cap_angle > 0.0 && cap_angle <= kPi)) throw ConfigError("cap_angle must lie in (0, pi]");
  const double acceptance = std::min(1.0, 2.0 * cap_area_fraction(d, cap_angle));
  if (acceptance < 1e-6) throw ConfigError("sector too thin for rejection sampling");
  return DistributionSpec(Sector{family, std::move(cap_center), cap_angle, acceptance});
}

DistributionSpec DistributionSpec::segments(std::vector<Eigen::VectorXd> directions,
                                            std::vector<double> probs) {
  if (directions.empty()) throw ConfigError("segment mixture needs at least one direction");
  if (directions.size() != probs.size()) throw ConfigError("directions and probs differ in length");
  const Eigen::Index d = directions.front().size();
  if (d < 1) throw ConfigError("segment directions must have dimension >= 1");
  for (auto& x : directions) {
    if (x.size() != d) throw ConfigError("segment directions differ in dimension");
    const double len = x.norm();
    if (!(len > 0) || !std::isfinite(len)) throw ConfigError("segment direction must be nonzero");
    x /= len;
  }
  double total = 0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ConfigError("segment probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("segment probabilities must sum to 1");
  return DistributionSpec(SegmentMixture{std::move(directions), std::move(probs)});
}

DistributionSpec DistributionSpec::circle(AngularDensity density) {
  return DistributionSpec(CircleDensity{std::move(density)});
}

int DistributionSpec::dim() const {
  return std::visit(Overloaded{
                        [](const Sector& s) { return family_dim(s.base); },
                        [](const SegmentMixture& s) { return static_cast<int>(s.directions.front().size()); },
                        [](const CircleDensity&) { return 2; },
                        [](const auto& s) { return s.d; },
                    },
                    v_);
}

std::string DistributionSpec::family() const {
  return std::visit(Overloaded{
                        [](const UniformBall&) { return std::string("uniform-ball"); },
                        [](const UniformSphere&) { return std::string("uniform-sphere"); },
                        [](const RadialPower&) { return std::string("radial-power"); },
                        [](const Sector&) { return std::string("sector"); },
                        [](const SegmentMixture&) { return std::string("segments"); },
                        [](const CircleDensity&) { return std::string("circle-density"); },
                    },
                    v_);
}

bool DistributionSpec::spherically_symmetric() const {
  return std::holds_alternative<UniformBall>(v_) || std::holds_alternative<UniformSphere>(v_) ||
         std::holds_alternative<RadialPower>(v_);
}

SampledPoint sample_point(const DistributionSpec& spec, Rng& rng) {
  SampledPoint p{Eigen::VectorXd(spec.dim()), 0.0};
  sample_into(spec, rng, p.coords.data(), p.radial_deficit);
  return p;
}

PointCloudd sample_binomial_process(const DistributionSpec& spec, std::size_t n, Rng& rng) {
  if (n < 1) throw ConfigError("binomial process needs n >= 1");
  return sample_cloud(spec, n, rng);
}

PointCloudd sample_poisson_process(const DistributionSpec& spec, double mean, Rng& rng) {
  if (!(mean > 0) || !std::isfinite(mean)) throw ConfigError("Poisson mean must be > 0");
  return sample_cloud(spec, static_cast<std::size_t>(rng.poisson(mean)), rng);
}

}  // namespace diamlab

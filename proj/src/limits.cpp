#include "diamlab/limits.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "diamlab/errors.hpp"

namespace diamlab {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge");
}

void require_dimension(int d) {
  if (d < 2) throw DomainError("dimension must be >= 2");
}

double log1p_half_product(const std::vector<double>& probs, double t) {
  double s = 0;
  for (double p : probs) s += std::log1p(0.5 * t * p);
  return s;
}

// log(sinh(x) / x) for x >= 0.
double log_sinhc(double x) {
  if (x < 1e-4) {
    const double x2 = x * x;
    return std::log1p(x2 / 6.0 + x2 * x2 / 120.0);
  }
  if (x < 1.0) return std::log(std::sinh(x) / x);
  return x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0 * x);
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0) || !std::isfinite(x)) throw DomainError("log_gamma requires x > 0");
  if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
  const double z = x - 1.0;
  double series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) series += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * (std::log(t) - 1.0) - kLanczosG + std::log(series);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw DomainError("incomplete beta requires a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete beta requires x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double cap_area_fraction(int d, double angle) {
  require_dimension(d);
  if (!(angle >= 0.0 && angle <= kPi)) throw DomainError("cap angle must lie in [0, pi]");
  const double s = std::sin(angle);
  const double half = 0.5 * regularized_incomplete_beta(0.5 * (d - 1), 0.5, s * s);
  return angle <= 0.5 * kPi ? half : 1.0 - half;
}

double gamma_exponent(int d, double alpha) {
  require_dimension(d);
  if (!(alpha >= 0)) throw DomainError("alpha must be >= 0");
  return 0.5 * (d - 1) + 2.0 * alpha;
}

double zeta_tail_constant(int d) {
  require_dimension(d);
  return std::exp((d - 1) * std::log(2.0) + log_gamma(0.5 * d) - std::log(d - 1.0) -
                  0.5 * std::log(kPi) - log_gamma(0.5 * (d - 1)));
}

double uniform_ball_constant(int d) {
  require_dimension(d);
  return std::pow(2.0, d + 1) * d * std::tgamma(0.5 * d + 1.0) /
         (std::sqrt(kPi) * (d + 1) * (d + 3) * std::tgamma(0.5 * (d + 1)));
}

double uniform_sphere_constant(int d) {
  require_dimension(d);
  return std::pow(2.0, d - 1) * std::tgamma(0.5 * d) /
         ((d - 1) * std::sqrt(kPi) * std::tgamma(0.5 * (d - 1)));
}

double sigma0_spherical(int d, double alpha, double a, bool boundary_atom) {
  require_dimension(d);
  if (!(a > 0) || !std::isfinite(a)) throw DomainError("radial constant a must be > 0");
  if (boundary_atom) return a * a * zeta_tail_constant(d);
  if (!(alpha > 0) || !std::isfinite(alpha)) {
    throw DomainError("alpha must be > 0 without a boundary atom");
  }
  // One exponential of the whole log sum: c and the shape factor share no
  // intermediate rounding.
  const double h = 0.5 * (d + 1);
  const double log_c = (d - 1) * std::log(2.0) + log_gamma(0.5 * d) - std::log(d - 1.0) - 0.5 * std::log(kPi) -
                       log_gamma(0.5 * (d - 1));
  const double log_shape = 2.0 * std::log(alpha) + 2.0 * log_gamma(alpha) + log_gamma(h) - log_gamma(2.0 * alpha + h);
  return a * a * std::exp(log_c + log_shape);
}

double sector_sigma0_factor(int d, double cap_angle) {
  if (!(cap_angle > 0.0 && cap_angle <= kPi)) throw DomainError("cap angle must lie in (0, pi]");
  const double covered = std::min(1.0, 2.0 * cap_area_fraction(d, cap_angle));
  return 1.0 / covered;
}

double sigma0_sector(int d, double alpha, double a, double cap_angle) {
  return sigma0_spherical(d, alpha, a, alpha == 0.0) * sector_sigma0_factor(d, cap_angle);
}

double sigma0_circle_density(const std::function<double(double)>& density, int nodes) {
  if (nodes < 2 || nodes % 2 != 0) throw DomainError("quadrature needs an even node count");
  const double h = 2.0 * kPi / nodes;
  std::vector<double> f(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) {
    f[i] = density(i * h);
    if (!(f[i] >= 0.0)) throw DomainError("angular density is negative at a quadrature node");
  }
  double s = 0;
  const int half = nodes / 2;
  for (int i = 0; i < nodes; ++i) s += f[i] * f[(i + half) % nodes];
  return 4.0 * h * s;
}

double sigma0_circle_density(const AngularDensity& density) {
  return sigma0_circle_density([&](double u) { return density(u); });
}

SegmentsLaw zeta_segments(std::size_t terms) {
  SegmentsLaw law;
  law.probs.resize(terms);
  for (std::size_t i = 0; i < terms; ++i) {
    const double k = static_cast<double>(i + 1);
    law.probs[i] = 1.0 / (kZeta2 * k * k);
  }
  return law;
}

double zeta_segments_tail_mass(std::size_t terms) {
  // sum_{i <= K} 1/i^2 accumulated from the small end for accuracy
  double head = 0;
  for (std::size_t i = terms; i >= 1; --i) {
    const double k = static_cast<double>(i);
    head += 1.0 / (k * k);
  }
  return std::max(0.0, 1.0 - head / kZeta2);
}

double law_gamma(const LimitLaw& law) {
  if (const auto* c = std::get_if<ContinuousLaw>(&law)) return c->gamma;
  return 2.0;
}

double limit_cdf(const LimitLaw& law, double t) {
  if (!(t >= 0.0)) throw DomainError("limit CDF requires t >= 0");
  if (const auto* c = std::get_if<ContinuousLaw>(&law)) {
    if (!(c->gamma > 0) || !(c->sigma0 > 0)) throw DomainError("continuous law needs gamma, sigma0 > 0");
    return -std::expm1(-0.5 * c->sigma0 * std::pow(t, c->gamma));
  }
  if (const auto* s = std::get_if<SegmentsLaw>(&law)) {
    double total = 0;
    for (double p : s->probs) {
      if (!(p >= 0.0)) throw DomainError("segment weights must be nonnegative");
      total += p;
    }
    if (s->probs.empty() || total > 1.0 + 1e-12) throw DomainError("segment weights must sum to at most 1");
    return -std::expm1(-0.5 * t + log1p_half_product(s->probs, t));
  }
  if (t == 0.0) return 0.0;
  // p_i = 1/(zeta(2) i^2): prod (1 + x^2/i^2) = sinh(pi x)/(pi x), x^2 = t/(2 zeta(2))
  const double x = kPi * std::sqrt(t / (2.0 * kZeta2));
  return -std::expm1(-0.5 * t + log_sinhc(x));
}

std::string describe(const LimitLaw& law) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* c = std::get_if<ContinuousLaw>(&law)) {
    os << "continuous(gamma=" << c->gamma << ";sigma0=" << c->sigma0 << ")";
  } else if (const auto* s = std::get_if<SegmentsLaw>(&law)) {
    os << "segments(m=" << s->probs.size() << ")";
  } else {
    os << "segments-zeta";
  }
  return os.str();
}

Envelope aprs_envelope(double t) {
  if (!(t >= 0.0)) throw DomainError("envelope requires t >= 0");
  const double t52 = std::pow(t, 2.5);
  return {-std::expm1(-4.0 * t52 / (std::pow(3.0, 2.5) * kPi)), -std::expm1(-4.0 * t52 / kPi)};
}

}  // namespace diamlab

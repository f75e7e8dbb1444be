#pragma once

// Closed-form limit laws for the scaled diameter deficit n^{2/gamma}(2 - diam)
// and the constants that parameterise them.

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "diamlab/angular_density.hpp"

namespace diamlab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kZeta2 = kPi * kPi / 6.0;

// --- special functions -----------------------------------------------------

/// ln Gamma(x) for x > 0 (Lanczos, g = 7, 9 terms).
double log_gamma(double x);

/// Regularized incomplete beta function I_x(a, b), a, b > 0, x in [0, 1].
double regularized_incomplete_beta(double a, double b, double x);

/// Fraction of the surface of S^{d-1} lying within angle `angle` of a fixed
/// point, angle in [0, pi].
double cap_area_fraction(int d, double angle);

// --- exponents and constants -----------------------------------------------

/// gamma = (d - 1)/2 + 2 alpha.
double gamma_exponent(int d, double alpha);

/// lim P(|xi1 - xi2| >= 2 - s) / E[(s - eta1 - eta2)^{(d-1)/2}; eta1 + eta2 <= s]
/// = 2^{d-1} Gamma(d/2) / ((d - 1) sqrt(pi) Gamma((d - 1)/2)).
double zeta_tail_constant(int d);

/// Limit constant for uniform points in the ball, written out directly:
/// 2^{d+1} d Gamma(d/2 + 1) / (sqrt(pi) (d + 1)(d + 3) Gamma((d + 1)/2)).
double uniform_ball_constant(int d);

/// Limit constant for uniform points on the sphere, written out directly:
/// 2^{d-1} Gamma(d/2) / ((d - 1) sqrt(pi) Gamma((d - 1)/2)).
double uniform_sphere_constant(int d);

/// sigma_0 of a spherically symmetric law whose radial deficit eta = 1 - |xi|
/// has P(eta <= s) ~ a s^alpha at 0.
///
/// boundary_atom: P(eta = 0) = a > 0 (alpha = 0 branch), sigma_0 = a^2 c.
/// otherwise:     sigma_0 = a^2 c alpha^2 Gamma(alpha)^2 Gamma((d+1)/2) / Gamma(2 alpha + (d+1)/2).
double sigma0_spherical(int d, double alpha, double a, bool boundary_atom);

/// Factor by which conditioning a spherically symmetric law on the double
/// cone over a cap (and its antipode) of half-angle cap_angle multiplies
/// sigma_0: 1 / min(1, 2 * cap_area_fraction(d, cap_angle)).
double sector_sigma0_factor(int d, double cap_angle);

/// sigma_0 of the sector law built on the radial family (d, alpha, a);
/// alpha == 0 selects the boundary-atom branch.
double sigma0_sector(int d, double alpha, double a, double cap_angle);

/// 4 * integral_0^{2pi} f(u) f(u + pi) du by the periodic trapezoid rule on
/// `nodes` points (nodes even).
double sigma0_circle_density(const std::function<double(double)>& density, int nodes = 4096);
double sigma0_circle_density(const AngularDensity& density);

// --- limit laws --------------------------------------------------------------

/// F(t) = 1 - exp(-sigma0 t^gamma / 2).
struct ContinuousLaw {
  double gamma;
  double sigma0;
};

/// Points on finitely many diameters with weights p_i (normalisation n):
/// F(t) = 1 - e^{-t/2} prod_i (1 + t p_i / 2).
struct SegmentsLaw {
  std::vector<double> probs;
};

/// Infinitely many diameters with p_i = 1 / (zeta(2) i^2):
/// F(t) = 1 - e^{-t/2} sinh(sqrt(3t)) / sqrt(3t).
struct SegmentsZetaLaw {};

using LimitLaw = std::variant<ContinuousLaw, SegmentsLaw, SegmentsZetaLaw>;

/// The first `terms` weights p_i = 1 / (zeta(2) i^2) of the infinite family.
SegmentsLaw zeta_segments(std::size_t terms);

/// Mass sum_{i > terms} p_i dropped by zeta_segments(terms).
double zeta_segments_tail_mass(std::size_t terms);

/// Normalisation exponent: n^{2/gamma} scales the deficit.
double law_gamma(const LimitLaw& law);

/// Limit CDF at t >= 0; throws DomainError for t < 0 or invalid parameters.
double limit_cdf(const LimitLaw& law, double t);

std::string describe(const LimitLaw& law);

/// Bounds bracketing the planar uniform-disk law:
/// (1 - exp(-4 t^{5/2} / (3^{5/2} pi)), 1 - exp(-4 t^{5/2} / pi)).
struct Envelope {
  double lower;
  double upper;
};
Envelope aprs_envelope(double t);

}  // namespace diamlab

#include "diamlab/rng.hpp"

#include <cmath>

#include "diamlab/errors.hpp"
#include "diamlab/limits.hpp"

namespace diamlab {

std::uint64_t Rng::poisson(double mean) {
  if (!(mean > 0) || !std::isfinite(mean)) throw DomainError("Poisson mean must be > 0");

  if (mean < 10.0) {
    // inversion by sequential search
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform_open();
    while (prod > limit) {
      ++k;
      prod *= uniform_open();
    }
    return k;
  }

  // Hormann's transformed rejection with squeeze (PTRS).
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform_open();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - log_gamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace diamlab

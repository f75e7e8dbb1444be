#include "diamlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <numeric>
#include <thread>

#include "diamlab/errors.hpp"
#include "diamlab/geom.hpp"

namespace diamlab {

namespace {

// Replication seeds hang off the master seed; comparison runs use a second
// level so their streams never coincide with a plain run of the same seed.
constexpr std::uint64_t kPoissonStream = 0x506f6973736f6eULL;
constexpr std::uint64_t kBinomialStream = 0x42696e6f6d69616cULL;

ReplicationResult run_one(const ExperimentConfig& config, std::size_t r, double scale) {
  Rng rng(derive_seed(config.seed, r));
  const PointCloudd cloud =
      config.process == ProcessKind::Poisson
          ? sample_poisson_process(config.spec, config.n, rng)
          : sample_binomial_process(config.spec, static_cast<std::size_t>(config.n), rng);

  ReplicationResult out;
  out.index = r;
  out.n_points = static_cast<std::size_t>(cloud.size());
  if (cloud.size() < 2) {
    out.degenerate = true;
    out.diameter = 0;
    out.scaled_deficit = 2.0 * scale;
    return out;
  }
  const DiameterDeficit<double> top = diameter_with_deficit(cloud);
  out.diameter = std::sqrt(top.pair.squared_distance);
  if (out.diameter > 2.0 + 1e-9) throw DomainError("diameter exceeds 2: points outside the unit ball");
  out.scaled_deficit = scale * std::max(0.0, top.deficit);
  if (!std::isfinite(out.scaled_deficit)) throw NumericalError("non-finite scaled deficit");
  return out;
}

unsigned resolve_threads(unsigned requested, std::size_t jobs) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(jobs, 1)));
}

std::vector<double> merged_segment_weights(const SegmentMixture& s) {
  std::vector<Eigen::VectorXd> lines;
  std::vector<double> weights;
  for (std::size_t i = 0; i < s.directions.size(); ++i) {
    bool merged = false;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      if (std::abs(lines[k].dot(s.directions[i])) > 1.0 - 1e-12) {
        weights[k] += s.probs[i];
        merged = true;
        break;
      }
    }
    if (!merged) {
      lines.push_back(s.directions[i]);
      weights.push_back(s.probs[i]);
    }
  }
  return weights;
}

ContinuousLaw spherical_law(const SphericalFamily& family) {
  return std::visit(
      [](const auto& f) -> ContinuousLaw {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, UniformBall>) {
          // P(eta <= s) = 1 - (1 - s)^d ~ d s
          return {gamma_exponent(f.d, 1.0), sigma0_spherical(f.d, 1.0, f.d, false)};
        } else if constexpr (std::is_same_v<T, UniformSphere>) {
          return {gamma_exponent(f.d, 0.0), sigma0_spherical(f.d, 0.0, 1.0, true)};
        } else if (f.atom > 0.0) {
          return {gamma_exponent(f.d, 0.0), sigma0_spherical(f.d, 0.0, f.atom, true)};
        } else {
          return {gamma_exponent(f.d, f.alpha), sigma0_spherical(f.d, f.alpha, 1.0, false)};
        }
      },
      family);
}

}  // namespace

const char* process_name(ProcessKind p) { return p == ProcessKind::Poisson ? "poisson" : "binomial"; }

void ExperimentConfig::validate() const {
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (!(gamma > 0) || !std::isfinite(gamma)) throw ConfigError("gamma must be > 0");
  if (!(n > 0) || !std::isfinite(n)) throw ConfigError("n must be > 0");
  if (process == ProcessKind::Binomial && (n < 2 || n != std::floor(n))) {
    throw ConfigError("binomial process needs an integer n >= 2");
  }
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples, std::size_t degenerate)
    : samples_(std::move(samples)), degenerate_(degenerate) {
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalCdf::mean() const {
  if (samples_.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(samples_.begin(), samples_.end(), 0.0) / static_cast<double>(samples_.size());
}

double EmpiricalCdf::operator()(double t) const {
  if (samples_.empty()) return 0.0;
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), t);
  return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

std::vector<ReplicationResult> run_replications(const ExperimentConfig& config) {
  config.validate();
  const double scale = deficit_scale(config.n, config.gamma);
  std::vector<ReplicationResult> results(config.replications);

  const unsigned workers = resolve_threads(config.threads, config.replications);
  if (workers == 1) {
    for (std::size_t r = 0; r < config.replications; ++r) results[r] = run_one(config, r, scale);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (std::size_t r = next++; r < config.replications; r = next++) {
        results[r] = run_one(config, r, scale);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = config.replications;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

EmpiricalCdf run_experiment(const ExperimentConfig& config) {
  const auto results = run_replications(config);
  std::vector<double> deficits;
  deficits.reserve(results.size());
  std::size_t degenerate = 0;
  for (const auto& r : results) {
    deficits.push_back(r.scaled_deficit);
    degenerate += r.degenerate ? 1 : 0;
  }
  if (degenerate == results.size()) throw NumericalError("no replication produced two or more points");
  return EmpiricalCdf(std::move(deficits), degenerate);
}

double ks_distance(const EmpiricalCdf& ecdf, const std::function<double(double)>& cdf) {
  if (ecdf.empty()) throw DomainError("KS distance of an empty sample");
  const auto& x = ecdf.samples();
  const double n = static_cast<double>(x.size());
  double d = 0;
  std::size_t i = 0;
  while (i < x.size()) {
    std::size_t j = i;
    while (j + 1 < x.size() && x[j + 1] == x[i]) ++j;
    const double f = cdf(x[i]);
    d = std::max({d, std::abs(static_cast<double>(j + 1) / n - f), std::abs(f - static_cast<double>(i) / n)});
    i = j + 1;
  }
  return d;
}

double ks_distance(const EmpiricalCdf& ecdf, const LimitLaw& law) {
  return ks_distance(ecdf, [&](double t) { return limit_cdf(law, std::max(0.0, t)); });
}

double ks_two_sample(const EmpiricalCdf& a, const EmpiricalCdf& b) {
  if (a.empty() || b.empty()) throw DomainError("KS distance of an empty sample");
  const auto& x = a.samples();
  const auto& y = b.samples();
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

std::optional<LimitLaw> limit_law_for(const DistributionSpec& spec) {
  const auto& v = spec.variant();
  if (const auto* b = std::get_if<UniformBall>(&v)) return spherical_law(*b);
  if (const auto* s = std::get_if<UniformSphere>(&v)) return spherical_law(*s);
  if (const auto* r = std::get_if<RadialPower>(&v)) return spherical_law(*r);
  if (const auto* sec = std::get_if<Sector>(&v)) {
    ContinuousLaw law = spherical_law(sec->base);
    law.sigma0 *= sector_sigma0_factor(spec.dim(), sec->cap_angle);
    return law;
  }
  if (const auto* seg = std::get_if<SegmentMixture>(&v)) return SegmentsLaw{merged_segment_weights(*seg)};
  const auto& circle = std::get<CircleDensity>(v);
  const double sigma0 = sigma0_circle_density(circle.density);
  if (!(sigma0 > 1e-12)) return std::nullopt;
  return ContinuousLaw{0.5, sigma0};
}

std::vector<ConvergenceRow> convergence_table(const ExperimentConfig& config,
                                              const std::vector<double>& n_list) {
  if (n_list.size() < 2) throw ConfigError("convergence table needs at least two values of n");
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    if (!(n_list[k] > n_list[k - 1])) throw ConfigError("n list must be increasing");
  }
  const auto law = limit_law_for(config.spec);
  if (!law) throw ConfigError("no limit law is known for family " + config.spec.family());
  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    ExperimentConfig row = config;
    row.n = n_list[k];
    row.seed = derive_seed(config.seed, k);
    rows.push_back({n_list[k], ks_distance(run_experiment(row), *law)});
  }
  return rows;
}

DepoissonisationResult depoissonisation_compare(const DistributionSpec& spec, double n, double gamma,
                                                std::size_t replications, std::uint64_t seed,
                                                unsigned threads) {
  ExperimentConfig poisson{spec, n, ProcessKind::Poisson, replications, derive_seed(seed, kPoissonStream),
                           gamma, threads};
  ExperimentConfig binomial = poisson;
  binomial.process = ProcessKind::Binomial;
  binomial.seed = derive_seed(seed, kBinomialStream);
  binomial.validate();

  const EmpiricalCdf ep = run_experiment(poisson);
  const EmpiricalCdf eb = run_experiment(binomial);
  DepoissonisationResult out;
  out.ks_cross = ks_two_sample(ep, eb);
  if (const auto law = limit_law_for(spec)) {
    out.ks_poisson = ks_distance(ep, *law);
    out.ks_binomial = ks_distance(eb, *law);
  } else {
    out.ks_poisson = out.ks_binomial = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double single_segment_exact_cdf(std::size_t n, double t) {
  if (n < 2) throw DomainError("range distribution needs n >= 2");
  if (!(t >= 0)) throw DomainError("t must be >= 0");
  const double nn = static_cast<double>(n);
  if (t >= 2.0 * nn) return 1.0;
  // range of n uniforms on [0, 1] is below r with probability n r^{n-1} - (n-1) r^n
  const double r = 1.0 - t / (2.0 * nn);
  const double r_pow = std::exp((nn - 1.0) * std::log1p(-t / (2.0 * nn)));
  return 1.0 - r_pow * (nn - (nn - 1.0) * r);
}

}  // namespace diamlab

namespace diamlab {

DistributionSpec random_oracle_spec(Rng& rng) {
  constexpr int kDims[] = {2, 3, 5};
  const int family = static_cast<int>(rng.next_u64() % 6);
  const int d = family == 5 ? 2 : kDims[rng.next_u64() % 3];
  auto random_unit = [&](int dim) {
    Eigen::VectorXd v(dim);
    for (int k = 0; k < dim; ++k) v[k] = rng.normal();
    return Eigen::VectorXd(v / v.norm());
  };
  switch (family) {
    case 0:
      return DistributionSpec::uniform_ball(d);
    case 1:
      return DistributionSpec::uniform_sphere(d);
    case 2:
      return DistributionSpec::radial_power(d, 0.2 + 2.8 * rng.uniform(), rng.uniform() < 0.5 ? 0.0 : 0.3);
    case 3: {
      const auto base = rng.uniform() < 0.5 ? DistributionSpec::uniform_ball(d) : DistributionSpec::uniform_sphere(d);
      return DistributionSpec::sector(base, random_unit(d), 0.3 + (kPi - 0.3) * rng.uniform());
    }
    case 4: {
      const std::size_t m = 1 + rng.next_u64() % 4;
      std::vector<Eigen::VectorXd> dirs;
      std::vector<double> probs;
      double total = 0;
      for (std::size_t i = 0; i < m; ++i) {
        dirs.push_back(random_unit(d));
        probs.push_back(0.1 + rng.uniform());
        total += probs.back();
      }
      for (auto& p : probs) p /= total;
      probs.back() = 1.0 - std::accumulate(probs.begin(), probs.end() - 1, 0.0);
      return DistributionSpec::segments(std::move(dirs), std::move(probs));
    }
    default:
      return DistributionSpec::circle(rng.uniform() < 0.5 ? AngularDensity::uniform()
                                                          : AngularDensity::cosine_mix({0.5, 2 * kPi * rng.uniform()}));
  }
}

DiameterOracleReport diameter_oracle(std::size_t cases, std::uint64_t seed, std::size_t max_points) {
  DiameterOracleReport report;
  for (std::size_t k = 0; k < cases; ++k) {
    Rng rng(derive_seed(seed, k));
    const DistributionSpec spec = random_oracle_spec(rng);
    const std::size_t n = 1 + rng.next_u64() % max_points;
    const PointCloudd cloud = sample_binomial_process(spec, n, rng);
    const double pruned = diameter_pruned(cloud);
    const double brute = diameter_bruteforce(cloud);
    ++report.cases;
    if (pruned == brute) {
      ++report.passed;
    } else {
      std::ostringstream os;
      os.precision(17);
      os << "case " << k << ": " << spec.family() << " d=" << spec.dim() << " n=" << n << " pruned=" << pruned
         << " brute=" << brute;
      report.failures.push_back(os.str());
    }
  }
  return report;
}

SegmentOracleReport segment_oracle(std::size_t n, std::size_t replications, std::uint64_t seed,
                                   unsigned threads) {
  const auto spec = DistributionSpec::segments({Eigen::VectorXd::Unit(2, 0)}, {1.0});
  ExperimentConfig config{spec, static_cast<double>(n), ProcessKind::Binomial, replications, seed, 2.0, threads};
  const EmpiricalCdf ecdf = run_experiment(config);
  SegmentOracleReport report;
  report.ks = ks_distance(ecdf, [n](double t) { return single_segment_exact_cdf(n, std::max(0.0, t)); });
  report.bound = 1.63 / std::sqrt(static_cast<double>(replications));
  report.passed = report.ks < report.bound;
  return report;
}

}  // namespace diamlab

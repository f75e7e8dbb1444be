#pragma once

// Monte Carlo experiments on the scaled diameter deficit and goodness-of-fit
// against the limit laws.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "diamlab/limits.hpp"
#include "diamlab/sampler.hpp"

namespace diamlab {

enum class ProcessKind { Poisson, Binomial };

const char* process_name(ProcessKind p);

struct ExperimentConfig {
  DistributionSpec spec;
  double n = 0;  // Poisson mean, or integer point count for Binomial
  ProcessKind process = ProcessKind::Binomial;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  double gamma = 0;      // deficits are scaled by n^{2/gamma}
  unsigned threads = 1;  // results do not depend on this

  // Throws ConfigError when the invariants do not hold.
  void validate() const;
};

struct ReplicationResult {
  std::size_t index = 0;
  std::size_t n_points = 0;
  double diameter = 0;
  double scaled_deficit = 0;
  bool degenerate = false;  // fewer than two points; deficit recorded as 2 n^{2/gamma}
};

/// Sorted sample of scaled deficits with right-continuous step CDF.
class EmpiricalCdf {
 public:
  EmpiricalCdf() = default;
  explicit EmpiricalCdf(std::vector<double> samples, std::size_t degenerate = 0);

  const std::vector<double>& samples() const { return samples_; }
  std::size_t count() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::size_t degenerate_count() const { return degenerate_; }
  double mean() const;

  /// #{samples <= t} / count.
  double operator()(double t) const;

  friend bool operator==(const EmpiricalCdf&, const EmpiricalCdf&) = default;

 private:
  std::vector<double> samples_;
  std::size_t degenerate_ = 0;
};

/// Per-replication records, in replication order.
std::vector<ReplicationResult> run_replications(const ExperimentConfig& config);

EmpiricalCdf run_experiment(const ExperimentConfig& config);

/// One-sample Kolmogorov-Smirnov statistic.
double ks_distance(const EmpiricalCdf& ecdf, const LimitLaw& law);
double ks_distance(const EmpiricalCdf& ecdf, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(const EmpiricalCdf& a, const EmpiricalCdf& b);

/// The limit law predicted for a family, when one is known.
std::optional<LimitLaw> limit_law_for(const DistributionSpec& spec);

struct ConvergenceRow {
  double n;
  double ks;
};

/// KS distance to limit_law_for(config.spec) for each n (row k seeded with
/// derive_seed(config.seed, k)).
std::vector<ConvergenceRow> convergence_table(const ExperimentConfig& config,
                                              const std::vector<double>& n_list);

struct DepoissonisationResult {
  double ks_poisson = 0;
  double ks_binomial = 0;
  double ks_cross = 0;
};

/// Poisson and binomial runs of the same law with independent derived seeds.
/// The first two entries are NaN when the family has no known limit law.
DepoissonisationResult depoissonisation_compare(const DistributionSpec& spec, double n, double gamma,
                                                std::size_t replications, std::uint64_t seed,
                                                unsigned threads = 1);

/// Exact P(n (2 - diam) <= t) for n i.i.d. uniform points on one diameter of
/// the ball, i.e. the range of n uniforms on [-1, 1].
double single_segment_exact_cdf(std::size_t n, double t);

/// A random law from any family: d in {2, 3, 5} (2 for the circle), random
/// shape parameters. Used to drive the kernel equivalence oracle.
DistributionSpec random_oracle_spec(Rng& rng);

struct DiameterOracleReport {
  std::size_t cases = 0;
  std::size_t passed = 0;
  std::vector<std::string> failures;  // description of each mismatch
};

/// diameter_pruned vs diameter_bruteforce (exact equality) on `cases` random
/// binomial clouds with n uniform in [1, max_points].
DiameterOracleReport diameter_oracle(std::size_t cases, std::uint64_t seed, std::size_t max_points = 2000);

struct SegmentOracleReport {
  double ks = 0;     // ECDF vs single_segment_exact_cdf
  double bound = 0;  // 1.63 / sqrt(R), the 99% Kolmogorov band
  bool passed = false;
};

/// Binomial(n) on one diameter, R replications, against the exact finite-n CDF.
SegmentOracleReport segment_oracle(std::size_t n, std::size_t replications, std::uint64_t seed,
                                   unsigned threads = 1);

}  // namespace diamlab

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "diamlab/errors.hpp"
#include "diamlab/harness.hpp"
#include "diamlab/limits.hpp"
#include "diamlab/spec_json.hpp"

namespace diamlab::cli {

namespace {

using nlohmann::json;
using Cell = std::variant<std::uint64_t, double, std::string>;

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("malformed number in ") + what + ": '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(std::string("empty list for ") + what);
  return out;
}

std::vector<std::vector<double>> parse_rows(const std::string& text, const char* what) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) rows.push_back(parse_list(row, what));
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Distribution selection shared by every experiment subcommand.
struct DistributionFlags {
  std::string family;
  std::string spec_file;
  std::optional<int> d;
  std::optional<double> alpha;
  std::optional<double> atom;
  std::string cap_center;
  std::optional<double> cap_angle;
  std::string base_family;
  std::string dirs;
  std::string probs;
  std::string density;
  std::string density_params;

  void add(CLI::App* app) {
    app->add_option("--family", family,
                    "uniform-ball | uniform-sphere | radial-power | sector | segments | circle-density");
    app->add_option("--spec", spec_file, "JSON file describing the distribution (instead of --family)");
    app->add_option("--d", d, "dimension");
    app->add_option("--alpha", alpha, "radial-power exponent");
    app->add_option("--atom", atom, "radial-power mass on the sphere");
    app->add_option("--cap-center", cap_center, "sector axis, comma separated");
    app->add_option("--cap-angle", cap_angle, "sector half-angle in radians");
    app->add_option("--base-family", base_family, "sector base family (default uniform-ball)");
    app->add_option("--dirs", dirs, "segment directions, e.g. \"1,0;0,1\"");
    app->add_option("--probs", probs, "segment probabilities, e.g. \"0.5,0.5\"");
    app->add_option("--density", density, "circle density kind: uniform | cosine_mix");
    app->add_option("--density-params", density_params, "cosine_mix amplitude,phase pairs");
  }

  DistributionSpec build() const {
    if (!spec_file.empty()) {
      if (!family.empty()) throw ConfigError("--spec and --family are mutually exclusive");
      std::ifstream in(spec_file);
      if (!in) throw ConfigError("cannot read " + spec_file);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON in ") + spec_file + ": " + e.what());
      }
      return spec_from_json(j);
    }
    if (family.empty()) throw ConfigError("--family (or --spec) is required");
    const bool is_circle = family == "circle-density" || family == "circle";
    if (!d && !is_circle) throw ConfigError("--d is required");

    json j = {{"family", family}, {"d", d.value_or(2)}};
    json radial = json::object();
    if (alpha) radial["alpha"] = *alpha;
    if (atom) radial["atom"] = *atom;
    const bool is_sector = family == "sector";
    if (is_sector) {
      json base = {{"family", base_family.empty() ? std::string("uniform-ball") : base_family}, {"d", *d}};
      base.update(radial);
      j["base"] = base;
    } else {
      if (!base_family.empty()) j["base_family"] = base_family;  // rejected below
      j.update(radial);
    }
    if (!cap_center.empty()) j["cap_center"] = parse_list(cap_center, "--cap-center");
    if (cap_angle) j["cap_angle"] = *cap_angle;
    if (!dirs.empty()) j["directions"] = parse_rows(dirs, "--dirs");
    if (!probs.empty()) j["probs"] = parse_list(probs, "--probs");
    if (!density.empty() || !density_params.empty()) {
      json dens = {{"kind", density.empty() ? std::string("cosine_mix") : density}};
      if (!density_params.empty()) dens["params"] = parse_list(density_params, "--density-params");
      j["density"] = dens;
    }
    return spec_from_json(j);
  }
};

struct OutputFlags {
  std::string format = "csv";
  std::string output;

  void add(CLI::App* app) {
    app->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--output", output, "output file (default: standard output)");
  }
};

struct Table {
  std::string command;
  json config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  json summary = json::object();
};

json cell_json(const Cell& c) {
  return std::visit([](const auto& v) -> json { return v; }, c);
}

std::string cell_csv(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* u = std::get_if<std::uint64_t>(&c)) return std::to_string(*u);
  return std::get<std::string>(c);
}

void write_table(const Table& t, const OutputFlags& fmt, std::ostream& default_out) {
  std::ostringstream os;
  if (fmt.format == "json") {
    json rows = json::array();
    for (const auto& r : t.rows) {
      json row = json::object();
      for (std::size_t k = 0; k < t.columns.size(); ++k) row[t.columns[k]] = cell_json(r[k]);
      rows.push_back(row);
    }
    json doc = {{"command", t.command}, {"config", t.config}, {"columns", t.columns}, {"rows", rows},
                {"summary", t.summary}};
    os << doc.dump(2) << '\n';
  } else {
    os << "# diamlab " << t.command << '\n';
    os << "# config: " << t.config.dump() << '\n';
    for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
    os << '\n';
    for (const auto& r : t.rows) {
      for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << cell_csv(r[k]);
      os << '\n';
    }
    if (!t.summary.empty()) os << "# summary: " << t.summary.dump() << '\n';
  }
  if (fmt.output.empty()) {
    default_out << os.str();
    return;
  }
  std::ofstream file(fmt.output, std::ios::binary);
  if (!file) throw ConfigError("cannot write " + fmt.output);
  file << os.str();
}

unsigned default_threads() {
  if (const char* env = std::getenv("DIAMLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) throw ConfigError("DIAMLAB_THREADS must be a nonnegative integer");
    return static_cast<unsigned>(v);
  }
  return 0;  // all cores
}

ProcessKind parse_process(const std::string& name) {
  if (name == "poisson") return ProcessKind::Poisson;
  if (name == "binomial") return ProcessKind::Binomial;
  throw ConfigError("--process must be poisson or binomial");
}

double resolve_gamma(const std::optional<double>& flag, const std::optional<LimitLaw>& law) {
  if (flag) return *flag;
  if (law) return law_gamma(*law);
  throw ConfigError("no limit law is known for this family; pass --gamma");
}

json law_json(const std::optional<LimitLaw>& law) {
  if (!law) return nullptr;
  return describe(*law);
}

// --- subcommands -------------------------------------------------------------

struct ExperimentFlags {
  DistributionFlags dist;
  OutputFlags out;
  double n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::string process = "binomial";
  std::optional<double> gamma;
  unsigned threads = 0;

  void add(CLI::App* app, bool with_n, std::size_t default_reps) {
    dist.add(app);
    out.add(app);
    if (with_n) app->add_option("--n", n, "intensity (Poisson mean or binomial count)")->required();
    reps = default_reps;
    app->add_option("--reps", reps, "replications")->required(default_reps == 0);
    app->add_option("--seed", seed, "master seed")->required();
    app->add_option("--gamma", gamma, "normalisation exponent (default: from the limit law)");
    threads = default_threads();
    app->add_option("--threads", threads, "worker threads (0 = all cores)");
  }
};

int cmd_simulate(ExperimentFlags& f, std::ostream& out) {
  const DistributionSpec spec = f.dist.build();
  const auto law = limit_law_for(spec);
  ExperimentConfig config{spec, f.n, parse_process(f.process), f.reps, f.seed, resolve_gamma(f.gamma, law), f.threads};
  const auto results = run_replications(config);

  Table t;
  t.command = "simulate";
  t.config = {{"distribution", spec_to_json(spec)}, {"n", f.n},         {"process", f.process},
              {"replications", f.reps},            {"seed", f.seed},   {"gamma", config.gamma},
              {"law", law_json(law)}};
  t.columns = {"replication", "n_points", "diameter", "scaled_deficit"};
  std::vector<double> deficits;
  std::size_t degenerate = 0;
  for (const auto& r : results) {
    t.rows.push_back({Cell(std::uint64_t{r.index}), Cell(std::uint64_t{r.n_points}), Cell(r.diameter),
                      Cell(r.scaled_deficit)});
    deficits.push_back(r.scaled_deficit);
    degenerate += r.degenerate ? 1 : 0;
  }
  if (degenerate == results.size()) throw NumericalError("no replication produced two or more points");
  const EmpiricalCdf ecdf(std::move(deficits), degenerate);
  t.summary = {{"replications", f.reps}, {"degenerate", degenerate}, {"mean_scaled_deficit", ecdf.mean()}};
  t.summary["ks"] = law ? json(ks_distance(ecdf, *law)) : json(nullptr);
  write_table(t, f.out, out);
  return kExitOk;
}

struct LimitFlags {
  DistributionFlags dist;
  OutputFlags out;
  std::string law;
  std::optional<double> gamma;
  std::optional<double> sigma0;
  double t_min = 0;
  double t_max = 5;
  int t_steps = 50;

  void add(CLI::App* app) {
    dist.add(app);
    out.add(app);
    app->add_option("--law", law, "continuous | segments | segments-zeta (instead of --family)");
    app->add_option("--gamma", gamma, "continuous law exponent");
    app->add_option("--sigma0", sigma0, "continuous law scale");
    app->add_option("--t-min", t_min, "first t");
    app->add_option("--t-max", t_max, "last t");
    app->add_option("--t-steps", t_steps, "number of grid intervals");
  }
};

int cmd_limit(LimitFlags& f, std::ostream& out) {
  LimitLaw law;
  json law_source;
  bool envelope = false;
  if (!f.law.empty()) {
    if (!f.dist.family.empty() || !f.dist.spec_file.empty()) throw ConfigError("--law and --family are mutually exclusive");
    if (f.law == "continuous") {
      if (!f.gamma || !f.sigma0) throw ConfigError("continuous law needs --gamma and --sigma0");
      if (!(*f.gamma > 0) || !(*f.sigma0 > 0)) throw ConfigError("--gamma and --sigma0 must be > 0");
      law = ContinuousLaw{*f.gamma, *f.sigma0};
    } else if (f.law == "segments") {
      if (f.dist.probs.empty()) throw ConfigError("segments law needs --probs");
      law = SegmentsLaw{parse_list(f.dist.probs, "--probs")};
      limit_cdf(law, 1.0);  // validates the weights
    } else if (f.law == "segments-zeta") {
      law = SegmentsZetaLaw{};
    } else {
      throw ConfigError("unknown --law '" + f.law + "'");
    }
    law_source = f.law;
  } else {
    if (f.gamma || f.sigma0) throw ConfigError("--gamma/--sigma0 only apply with --law continuous");
    const DistributionSpec spec = f.dist.build();
    const auto found = limit_law_for(spec);
    if (!found) throw ConfigError("no limit law is known for this family");
    law = *found;
    law_source = spec_to_json(spec);
    envelope = std::holds_alternative<UniformBall>(spec.variant()) && spec.dim() == 2;
  }
  if (!(f.t_min >= 0) || !(f.t_max >= f.t_min) || f.t_steps < 1) {
    throw ConfigError("t grid needs 0 <= t-min <= t-max and t-steps >= 1");
  }

  Table t;
  t.command = "limit";
  t.config = {{"law_source", law_source}, {"law", describe(law)},        {"t_min", f.t_min},
              {"t_max", f.t_max},         {"t_steps", f.t_steps}};
  t.columns = {"t", "cdf"};
  if (envelope) {
    t.columns.push_back("envelope_lower");
    t.columns.push_back("envelope_upper");
  }
  for (int k = 0; k <= f.t_steps; ++k) {
    const double x = f.t_min + (f.t_max - f.t_min) * k / f.t_steps;
    std::vector<Cell> row = {Cell(x), Cell(limit_cdf(law, x))};
    if (envelope) {
      const Envelope e = aprs_envelope(x);
      row.push_back(Cell(e.lower));
      row.push_back(Cell(e.upper));
    }
    t.rows.push_back(std::move(row));
  }
  write_table(t, f.out, out);
  return kExitOk;
}

int cmd_compare(ExperimentFlags& f, std::ostream& out) {
  const DistributionSpec spec = f.dist.build();
  const auto law = limit_law_for(spec);
  const double gamma = resolve_gamma(f.gamma, law);
  const auto r = depoissonisation_compare(spec, f.n, gamma, f.reps, f.seed, f.threads);

  Table t;
  t.command = "compare";
  t.config = {{"distribution", spec_to_json(spec)}, {"n", f.n},     {"replications", f.reps},
              {"seed", f.seed},                      {"gamma", gamma}, {"law", law_json(law)}};
  t.columns = {"ks_poisson", "ks_binomial", "ks_cross"};
  t.rows.push_back({Cell(r.ks_poisson), Cell(r.ks_binomial), Cell(r.ks_cross)});
  t.summary = {{"ks_cross", r.ks_cross},
               {"two_sample_95_bound", 1.36 * std::sqrt(2.0 / static_cast<double>(f.reps))}};
  if (!law) t.summary["note"] = "no limit law known; ks_poisson and ks_binomial are undefined";
  write_table(t, f.out, out);
  return kExitOk;
}

int cmd_table(ExperimentFlags& f, const std::string& n_list_text, std::ostream& out) {
  const DistributionSpec spec = f.dist.build();
  const auto law = limit_law_for(spec);
  if (!law) throw ConfigError("no limit law is known for this family");
  const std::vector<double> n_list = parse_list(n_list_text, "--n-list");
  ExperimentConfig config{spec, n_list.front(), parse_process(f.process), f.reps, f.seed, resolve_gamma(f.gamma, law),
                          f.threads};
  const auto rows = convergence_table(config, n_list);

  Table t;
  t.command = "table";
  t.config = {{"distribution", spec_to_json(spec)}, {"n_list", n_list},       {"process", f.process},
              {"replications", f.reps},            {"seed", f.seed},         {"gamma", config.gamma},
              {"law", law_json(law)}};
  t.columns = {"n", "ks"};
  for (const auto& r : rows) t.rows.push_back({Cell(r.n), Cell(r.ks)});
  t.summary = {{"last_smaller_than_first", rows.back().ks < rows.front().ks}};
  write_table(t, f.out, out);
  return kExitOk;
}

struct OracleFlags {
  OutputFlags out;
  std::size_t cases = 1000;
  std::uint64_t seed = 0;
  std::size_t max_points = 2000;
  std::size_t segment_n = 1000;
  std::size_t segment_reps = 2000;
  unsigned threads = 0;

  void add(CLI::App* app) {
    out.add(app);
    app->add_option("--cases", cases, "random kernel equivalence instances");
    app->add_option("--seed", seed, "master seed")->required();
    app->add_option("--max-points", max_points, "largest instance size");
    app->add_option("--segment-n", segment_n, "points per segment-oracle replication");
    app->add_option("--segment-reps", segment_reps, "segment-oracle replications");
    threads = default_threads();
    app->add_option("--threads", threads, "worker threads (0 = all cores)");
  }
};

int cmd_oracle(OracleFlags& f, std::ostream& out, std::ostream& err) {
  if (f.cases < 1 || f.max_points < 1 || f.segment_n < 2 || f.segment_reps < 1) {
    throw ConfigError("oracle sizes must be positive (segment-n >= 2)");
  }
  const auto kernel = diameter_oracle(f.cases, derive_seed(f.seed, 0), f.max_points);
  const auto segment = segment_oracle(f.segment_n, f.segment_reps, derive_seed(f.seed, 1), f.threads);

  Table t;
  t.command = "oracle";
  t.config = {{"cases", f.cases},         {"seed", f.seed},
              {"max_points", f.max_points}, {"segment_n", f.segment_n},
              {"segment_reps", f.segment_reps}};
  t.columns = {"check", "cases", "passed"};
  t.rows.push_back({Cell(std::string("diameter_pruned_vs_bruteforce")), Cell(std::uint64_t{kernel.cases}),
                    Cell(std::uint64_t{kernel.passed})});
  t.rows.push_back({Cell(std::string("single_segment_exact_cdf")), Cell(std::uint64_t{1}),
                    Cell(std::uint64_t{segment.passed ? 1u : 0u})});
  const std::string verdict = std::to_string(kernel.passed) + "/" + std::to_string(kernel.cases) + " passed";
  t.summary = {{"result", verdict},
               {"segment_ks", segment.ks},
               {"segment_bound", segment.bound},
               {"failures", kernel.failures}};
  write_table(t, f.out, out);

  err << "diameter kernels: " << verdict << '\n';
  err << "segment exact CDF: KS " << format_double(segment.ks) << " vs band " << format_double(segment.bound)
      << (segment.passed ? " passed" : " FAILED") << '\n';
  for (const auto& m : kernel.failures) err << "  mismatch " << m << '\n';
  return kernel.passed == kernel.cases && segment.passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diameter of random point sets in the unit ball: simulation and limit laws", "diamlab"};
  app.require_subcommand(1);

  ExperimentFlags sim, cmp, tab;
  LimitFlags lim;
  OracleFlags orc;
  std::string n_list;

  auto* simulate = app.add_subcommand("simulate", "replicate a point process and report scaled deficits");
  sim.add(simulate, true, 0);
  simulate->add_option("--process", sim.process, "poisson | binomial")->check(CLI::IsMember({"poisson", "binomial"}));

  auto* limit = app.add_subcommand("limit", "tabulate a limit CDF on a t grid");
  lim.add(limit);

  auto* compare = app.add_subcommand("compare", "Poisson vs binomial de-Poissonisation check");
  cmp.add(compare, true, 0);

  auto* table = app.add_subcommand("table", "KS distance to the limit law for increasing n");
  tab.add(table, false, 1000);
  table->add_option("--n-list", n_list, "increasing n values, comma separated")->required();
  table->add_option("--process", tab.process, "poisson | binomial")->check(CLI::IsMember({"poisson", "binomial"}));

  auto* oracle = app.add_subcommand("oracle", "kernel equivalence and exact finite-n oracles");
  orc.add(oracle);

  std::ostringstream cli_out, cli_err;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, cli_out, cli_err);
    out << cli_out.str();
    err << cli_err.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (limit->parsed()) return cmd_limit(lim, out);
    if (compare->parsed()) return cmd_compare(cmp, out);
    if (table->parsed()) return cmd_table(tab, n_list, out);
    return cmd_oracle(orc, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace diamlab::cli

// Command-line front end: hypothesis tests on point files, moment and efficacy curves,
// and seeded Monte Carlo experiments.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pcd/pcd.hpp"

namespace {

using Json = nlohmann::ordered_json;
using pcd::io::format_double;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kDegenerate = 3 };

// Usage errors raised while interpreting arguments (as opposed to data files).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json r_json(pcd::RFactor r) { return r.is_infinite() ? Json("inf") : Json(r.value()); }

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pcd::DataError("cannot open '" + path + "'");
  return in;
}

std::vector<pcd::Point> load_points(const std::string& path) {
  auto in = open_input(path);
  return pcd::io::read_points(in, path);
}

std::vector<double> load_weights(const std::string& path) {
  auto in = open_input(path);
  auto w = pcd::io::read_numbers(in, path);
  try {
    pcd::detail::weight_sums(w);
  } catch (const pcd::DomainError& e) {
    throw pcd::DataError(path + ": " + e.what());
  }
  return w;
}

std::vector<pcd::RFactor> parse_r_list(const std::string& text) {
  std::vector<pcd::RFactor> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (pcd::io::trim(item).empty()) continue;
    out.push_back(pcd::io::parse_r(item));
  }
  if (out.empty()) throw UsageError("--r needs at least one value");
  return out;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------- test

struct TestArgs {
  std::string y, x, r, outside = "reject", format = "json";
  double alpha = 0.05;
};

int run_test(const TestArgs& a) {
  const pcd::RFactor r = pcd::io::parse_r(a.r);
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  const auto policy = a.outside == "drop" ? pcd::OutsidePolicy::drop : pcd::OutsidePolicy::reject;
  const auto y = load_points(a.y);
  if (y.size() < 3) throw pcd::DataError(a.y + ": need at least 3 anchor points");
  const auto x = load_points(a.x);
  const auto tr = pcd::triangulate(y);
  const auto d = pcd::build_digraph(tr, x, r, policy);
  if (d.dropped > 0) std::cerr << "warning: dropped " << d.dropped << " point(s) outside the convex hull\n";
  if (d.n < 2) throw pcd::DataError("need at least 2 data points inside the convex hull");
  const double rho = pcd::relative_density(d);
  const auto t = pcd::test(rho, d.n, r, tr.weights);

  if (a.format == "csv") {
    std::cout << "r,n,J,arcs,rho,mu,nu,z,p_segregation,p_association,degenerate\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    std::cout << pcd::io::format_r(r) << ',' << d.n << ',' << tr.size() << ',' << d.total_arcs << ','
              << format_double(t.rho) << ',' << format_double(t.mean) << ',' << format_double(t.avar) << ','
              << opt(t.z) << ',' << opt(t.p_segregation) << ',' << opt(t.p_association) << ','
              << (t.degenerate ? "true" : "false") << '\n';
  } else {
    Json cells = Json::array();
    for (const auto& c : d.cells) cells.push_back({{"points", c.points}, {"arcs", c.arcs}});
    Json doc;
    doc["inputs"] = {{"r", r_json(r)},        {"n", d.n},          {"J", tr.size()},
                     {"weights", tr.weights}, {"alpha", a.alpha},  {"outside", a.outside},
                     {"dropped", d.dropped},  {"y_file", a.y},     {"x_file", a.x}};
    doc["statistic"] = {{"rho", t.rho},
                        {"arcs", d.total_arcs},
                        {"mu", t.mean},
                        {"nu", t.avar},
                        {"z", optional_number(t.z)},
                        {"p_segregation", optional_number(t.p_segregation)},
                        {"p_association", optional_number(t.p_association)},
                        {"reject_segregation", t.p_segregation ? Json(*t.p_segregation < a.alpha) : Json(nullptr)},
                        {"reject_association", t.p_association ? Json(*t.p_association < a.alpha) : Json(nullptr)},
                        {"degenerate", t.degenerate},
                        {"cells", cells}};
    doc["provenance"] = {{"version", pcd::kVersion}, {"timestamp", utc_timestamp()}};
    std::cout << doc.dump(2) << '\n';
  }
  if (t.degenerate) {
    std::cerr << "error: the null variance is zero at r = " << pcd::io::format_r(r)
              << "; the statistic is degenerate and no z-score exists\n";
    return kDegenerate;
  }
  return kOk;
}

// ---------------------------------------------------------------- curves

struct CurvesArgs {
  std::string quantity, r_min = "1", r_max = "5", eps, alt, weights, variance = "auto";
  std::size_t steps = 101;
  std::optional<std::size_t> n;
  double alpha = 0.05;
  std::size_t triples = 200000;
  std::uint64_t seed = 1;
};

bool near(double a, double b) { return std::abs(a - b) <= 1e-12; }

int run_curves(const CurvesArgs& a) {
  const std::string& q = a.quantity;
  const bool needs_eps = q == "power" || q == "hlae-seg" || q == "hlae-assoc";
  if (needs_eps && a.eps.empty()) throw UsageError("--quantity " + q + " needs --eps");
  if (q == "power" && !a.n) throw UsageError("--quantity power needs --n");
  if (q == "power" && a.alt.empty()) throw UsageError("--quantity power needs --alt seg|assoc");
  if (!needs_eps && !a.eps.empty()) throw UsageError("--eps does not apply to --quantity " + q);
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");

  const double lo = pcd::io::parse_ratio(a.r_min).value_or(-1.0);
  const double hi = pcd::io::parse_ratio(a.r_max).value_or(-1.0);
  std::optional<pcd::AltSpec> spec;
  if (needs_eps) {
    pcd::AltKind kind = pcd::AltKind::segregation;
    if (q == "hlae-assoc" || (q == "power" && a.alt == "assoc")) kind = pcd::AltKind::association;
    spec = pcd::AltSpec{kind, pcd::io::parse_eps(a.eps)};
    pcd::validate(*spec);
  }
  std::vector<double> weights{1.0};
  if (!a.weights.empty()) weights = load_weights(a.weights);
  const bool multi = weights.size() > 1;
  if (multi && q == "power") throw UsageError("--weights is not supported for --quantity power");

  const auto grid = pcd::curve_grid(lo, hi, a.steps, pcd::curve_breakpoints(spec, lo, hi));
  const pcd::MonteCarloVariance mc{a.triples, a.seed};

  // Closed-form alternative variances exist only at two eps values and not on the whole r range.
  auto source = [&](pcd::RFactor r) {
    if (a.variance == "mc") return pcd::VarianceSource::monte_carlo;
    const bool seg = spec->kind == pcd::AltKind::segregation;
    const bool closed = seg ? near(spec->eps, pcd::kSqrt3 / 4) && !(r.value() >= 1.5 && r.value() < 2.0)
                            : near(spec->eps, pcd::kSqrt3 / 12);
    if (a.variance == "closed") {
      if (!closed) throw UsageError("no closed-form alternative variance for these arguments; use --variance mc");
      return pcd::VarianceSource::closed_form;
    }
    return closed ? pcd::VarianceSource::closed_form : pcd::VarianceSource::monte_carlo;
  };

  std::ostringstream out;
  out << "r,value\n";
  for (double rv : grid) {
    const pcd::RFactor r(rv);
    double value = 0.0;
    if (q == "mu") {
      value = pcd::mu_null_multi(r, weights);
    } else if (q == "nu") {
      value = pcd::nu_null_multi(r, weights);
    } else if (q == "pae-seg" || q == "pae-assoc") {
      const auto kind = q == "pae-seg" ? pcd::AltKind::segregation : pcd::AltKind::association;
      value = multi ? pcd::pae_multi(r, kind, weights) : pcd::pae(r, kind);
    } else if (q == "hlae-seg" || q == "hlae-assoc") {
      value = (multi ? pcd::hlae_multi(r, *spec, weights, source(r), mc) : pcd::hlae(r, *spec, source(r), mc)).value;
    } else if (q == "power") {
      value = pcd::power_asymptotic(r, *a.n, *spec, a.alpha, source(r), mc).value;
    } else {
      throw UsageError("unknown quantity '" + q + "'");
    }
    out << format_double(rv) << ',' << format_double(value) << '\n';
  }
  std::cout << out.str();
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string mode, eps, r, y, emit_samples, format = "json";
  std::size_t n = 0, reps = 0;
  std::optional<std::uint64_t> seed;
  double alpha = 0.05;
  unsigned workers = 0;
  bool empirical_critical = false;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("PCD_SEED")) {
    const std::string_view s = pcd::io::trim(env);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      throw UsageError("PCD_SEED is not an unsigned 64-bit integer");
    return v;
  }
  throw UsageError("a seed is required: pass --seed or set PCD_SEED");
}

int run_simulate(const SimulateArgs& a) {
  pcd::ExperimentConfig cfg;
  if (a.mode == "null") {
    if (!a.eps.empty()) throw UsageError("--eps does not apply to --mode null");
  } else {
    if (a.eps.empty()) throw UsageError("--mode " + a.mode + " needs --eps");
    cfg.hypothesis = {a.mode == "seg" ? pcd::Mode::segregation : pcd::Mode::association, pcd::io::parse_eps(a.eps)};
  }
  cfg.n = a.n;
  cfg.reps = a.reps;
  cfg.r_grid = parse_r_list(a.r);
  cfg.alpha = a.alpha;
  cfg.seed = resolve_seed(a.seed);
  cfg.workers = a.workers ? a.workers : std::max(1u, std::thread::hardware_concurrency());
  cfg.keep_samples = !a.emit_samples.empty();
  cfg.empirical_critical = a.empirical_critical;
  if (!a.y.empty()) cfg.anchors = load_points(a.y);

  const auto res = pcd::run_experiment(cfg);
  const pcd::Mode mode = cfg.hypothesis.mode;
  auto power_of = [&](const std::optional<double>& up, const std::optional<double>& down) {
    return mode == pcd::Mode::association ? down : up;
  };

  if (a.format == "csv") {
    std::ostringstream out;
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    out << "r,mean,variance,se_mean,se_variance,n_var,mu,nu,power,reject_upper,reject_lower,"
           "critical_upper,critical_lower,empirical_power,identity_violations\n";
    for (const auto& s : res.per_r) {
      out << pcd::io::format_r(s.r) << ',' << format_double(s.stats.mean) << ',' << format_double(s.stats.variance)
          << ',' << format_double(s.stats.se_mean) << ',' << format_double(s.stats.se_variance) << ','
          << format_double(static_cast<double>(cfg.n) * s.stats.variance) << ','
          << format_double(s.null_moments.mean) << ',' << format_double(s.null_moments.avar) << ','
          << opt(power_of(s.reject_upper, s.reject_lower)) << ',' << opt(s.reject_upper) << ','
          << opt(s.reject_lower) << ',' << opt(s.critical_upper) << ',' << opt(s.critical_lower) << ','
          << opt(power_of(s.empirical_reject_upper, s.empirical_reject_lower)) << ',' << s.identity_violations
          << '\n';
    }
    std::cout << out.str();
  } else {
    Json per_r = Json::array();
    for (const auto& s : res.per_r) {
      per_r.push_back({{"r", r_json(s.r)},
                       {"mean", s.stats.mean},
                       {"variance", s.stats.variance},
                       {"se_mean", s.stats.se_mean},
                       {"se_variance", s.stats.se_variance},
                       {"n_var", static_cast<double>(cfg.n) * s.stats.variance},
                       {"mu", s.null_moments.mean},
                       {"nu", s.null_moments.avar},
                       {"power", optional_number(power_of(s.reject_upper, s.reject_lower))},
                       {"reject_upper", optional_number(s.reject_upper)},
                       {"reject_lower", optional_number(s.reject_lower)},
                       {"critical_upper", optional_number(s.critical_upper)},
                       {"critical_lower", optional_number(s.critical_lower)},
                       {"empirical_power", optional_number(power_of(s.empirical_reject_upper, s.empirical_reject_lower))},
                       {"identity_violations", s.identity_violations}});
    }
    Json r_list = Json::array();
    for (auto r : cfg.r_grid) r_list.push_back(r_json(r));
    Json doc;
    doc["inputs"] = {{"mode", pcd::to_string(mode)},
                     {"eps", mode == pcd::Mode::null ? Json(nullptr) : Json(cfg.hypothesis.eps)},
                     {"n", cfg.n},
                     {"reps", cfg.reps},
                     {"r", r_list},
                     {"alpha", cfg.alpha},
                     {"seed", cfg.seed},
                     {"J", res.cells},
                     {"weights", res.weights},
                     {"empirical_critical", cfg.empirical_critical}};
    doc["results"] = per_r;
    doc["provenance"] = {{"version", pcd::kVersion}, {"rng", "mt19937_64, splitmix64 stream seeds"}};
    std::cout << doc.dump(2) << '\n';
  }

  if (!a.emit_samples.empty()) {
    std::ofstream f(a.emit_samples);
    if (!f) throw pcd::DataError("cannot write '" + a.emit_samples + "'");
    f << "r,replicate,rho\n";
    for (const auto& s : res.per_r)
      for (std::size_t i = 0; i < s.samples.size(); ++i)
        f << pcd::io::format_r(s.r) << ',' << i << ',' << format_double(s.samples[i]) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximity catch digraph relative density tests for spatial segregation and association"};
  app.set_version_flag("--version", std::string(pcd::kVersion));
  app.require_subcommand(1);

  TestArgs ta;
  auto* test = app.add_subcommand("test", "Test a point file against complete spatial randomness");
  test->add_option("--y", ta.y, "CSV of anchor points (x,y)")->required();
  test->add_option("--x", ta.x, "CSV of data points (x,y)")->required();
  test->add_option("--r", ta.r, "Expansion factor r >= 1, a fraction such as 11/10, or inf")->required();
  test->add_option("--outside", ta.outside, "Points outside the convex hull")->check(CLI::IsMember({"reject", "drop"}));
  test->add_option("--alpha", ta.alpha, "Significance level");
  test->add_option("--format", ta.format)->check(CLI::IsMember({"json", "csv"}));

  CurvesArgs ca;
  auto* curves = app.add_subcommand("curves", "Evaluate moments, efficacies or power over an r grid (CSV)");
  curves->add_option("--quantity", ca.quantity)
      ->required()
      ->check(CLI::IsMember({"mu", "nu", "pae-seg", "pae-assoc", "power", "hlae-seg", "hlae-assoc"}));
  curves->add_option("--r-min", ca.r_min, "Grid start (decimal or fraction)");
  curves->add_option("--r-max", ca.r_max, "Grid end (decimal or fraction)");
  curves->add_option("--steps", ca.steps, "Evenly spaced points; breakpoints are added");
  curves->add_option("--eps", ca.eps, "Alternative depth: decimal, fraction or [k]sqrt3[/d]");
  curves->add_option("--alt", ca.alt, "Alternative for power")->check(CLI::IsMember({"seg", "assoc"}));
  curves->add_option("--n", ca.n, "Sample size for power");
  curves->add_option("--alpha", ca.alpha, "Significance level for power");
  curves->add_option("--weights", ca.weights, "File of triangle area weights (multi-triangle moments)");
  curves->add_option("--variance", ca.variance, "Alternative variance source")
      ->check(CLI::IsMember({"auto", "closed", "mc"}));
  curves->add_option("--triples", ca.triples, "Monte Carlo triples per variance estimate");
  curves->add_option("--seed", ca.seed, "Seed for Monte Carlo variance estimates");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Seeded Monte Carlo experiment");
  simulate->add_option("--mode", sa.mode)->required()->check(CLI::IsMember({"null", "seg", "assoc"}));
  simulate->add_option("--eps", sa.eps, "Alternative depth: decimal, fraction or [k]sqrt3[/d]");
  simulate->add_option("--n", sa.n, "Points per replicate")->required();
  simulate->add_option("--reps", sa.reps, "Replicates")->required();
  simulate->add_option("--r", sa.r, "Comma-separated r values")->required();
  simulate->add_option("--seed", sa.seed, "64-bit seed (falls back to PCD_SEED)");
  simulate->add_option("--y", sa.y, "CSV of anchor points; default is the standard triangle");
  simulate->add_option("--alpha", sa.alpha, "Significance level");
  simulate->add_option("--workers", sa.workers, "Threads (default: all cores); output does not depend on it");
  simulate->add_option("--emit-samples", sa.emit_samples, "Write every replicate's rho to this CSV");
  simulate->add_option("--format", sa.format)->check(CLI::IsMember({"json", "csv"}));
  simulate->add_flag("--empirical-critical", sa.empirical_critical,
                     "Also run a paired null experiment for empirical critical values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*test) return run_test(ta);
    if (*curves) return run_curves(ca);
    return run_simulate(sa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const pcd::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const pcd::ClosedFormUnavailable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const pcd::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const pcd::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
}

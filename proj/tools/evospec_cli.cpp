// evospec: command-line front end for the multitaper evolutionary spectrum
// estimator and the PSR / RS stationarity tests.
//
//   evospec dpss     --N 57 --nw 6 [--K 5]
//   evospec estimate --input series.csv | --model b
//   evospec test     --input series.csv --method rs --transform logdiff
//   evospec simulate --model h --T 512 --seed 3
//   evospec mc       --model a,b,g --M 1000 --T 512 --seed 7
//   evospec tradeoff --a 200 --Ns 64:4096
//
// Results go to stdout unless --out is given; files are written atomically.
// Any rejected input exits nonzero with a one-line diagnostic on stderr.

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "evospec/estimator.hpp"
#include "evospec/io.hpp"
#include "evospec/montecarlo.hpp"
#include "evospec/simulate.hpp"
#include "evospec/stattest.hpp"
#include "evospec/taper.hpp"
#include "evospec/tradeoff.hpp"
#include "json.hpp"

using namespace evospec;

namespace {

constexpr std::uint64_t kDefaultSeed = 7;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::optional<std::string>& out, const std::string& content) {
  if (out) {
    write_file_atomic(*out, content);
  } else {
    std::cout << content;
    std::cout.flush();
  }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("EVOSPEC_SEED"); env && *env) {
    std::uint64_t v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc() || ptr != end) throw UsageError(std::string("EVOSPEC_SEED is not an unsigned integer: ") + env);
    return v;
  }
  return kDefaultSeed;
}

Study parse_study(const std::string& s) { return s == "power" ? Study::power : Study::size; }

// Options shared by the commands that take a series.
struct SourceOptions {
  std::optional<std::string> input;
  std::optional<std::string> model;
  std::size_t T = 512;
  std::optional<std::uint64_t> seed;
  std::string study = "size";
  int envelope_sign = +1;
  std::string transform = "none";

  void add(CLI::App* cmd) {
    auto* in = cmd->add_option("--input", input, "CSV file: one value per line or index,value");
    auto* mo = cmd->add_option("--model", model, "Simulate catalog model a..h instead of reading a file")
                   ->check(CLI::IsMember({"a", "b", "c", "d", "e", "f", "g", "h"}));
    in->excludes(mo);
    mo->excludes(in);
    cmd->add_option("--T", T, "Simulated length")->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    cmd->add_option("--seed", seed, "Simulation seed (default: $EVOSPEC_SEED, then 7)");
    cmd->add_option("--study", study, "Catalog flavor for --model")->check(CLI::IsMember({"size", "power"}));
    cmd->add_option("--envelope-sign", envelope_sign, "Sign of the bump exponent for modulated models")
        ->check(CLI::IsMember({-1, 1}));
    cmd->add_option("--transform", transform, "Preprocessing applied to the series")
        ->check(CLI::IsMember({"none", "logdiff"}));
  }

  TimeSeries load() const {
    if (!input && !model) throw UsageError("exactly one of --input or --model is required");
    TimeSeries x = input ? load_csv(*input)
                         : simulate(model_catalog((*model)[0], parse_study(study), envelope_sign), T, resolve_seed(seed));
    if (transform == "logdiff") x = log_diff(x);
    return x;
  }
};

struct GridFlags {
  int K = 5;
  std::optional<int> blocks;
  double buffer_frac = 0.7;

  void add(CLI::App* cmd) {
    cmd->add_option("--K", K, "Number of tapers")->check(CLI::PositiveNumber);
    cmd->add_option("--blocks", blocks, "Override the block count I (default max(2, floor(log2 T)))");
    cmd->add_option("--buffer-frac", buffer_frac, "Frequency buffer as a fraction of the spacing B")
        ->check(CLI::Range(0.5, 1.0));
  }
  GridOptions options() const { return GridOptions{K, blocks, buffer_frac}; }
};

// ------------------------------------------------------------------ dpss

struct DpssCmd {
  int N = 0;
  std::optional<double> W;
  std::optional<double> nw;
  std::optional<int> K;
  std::string format = "json";
  std::optional<std::string> out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("dpss", "Slepian tapers, concentration eigenvalues and spectral-window distance");
    cmd->add_option("--N", N, "Taper length (odd)")->required();
    auto* w = cmd->add_option("--W", W, "Half-bandwidth in radians");
    auto* n = cmd->add_option("--nw", nw, "Half-bandwidth as a multiple of pi/N");
    w->excludes(n);
    n->excludes(w);
    cmd->add_option("--K", K, "Number of tapers (default floor(N W / pi))");
    cmd->add_option("--format", format, "json: everything; csv: one column per taper")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", out, "Output file");
    cmd->callback([this] { run(); });
  }

  void run() const {
    if (!W && !nw) throw UsageError("dpss: one of --W or --nw is required");
    TaperSpec spec{N, W ? *W : *nw * std::numbers::pi / N, 0};
    spec.K = K ? *K : spec.max_tapers();
    spec.validate();
    const TaperSet ts = compute_dpss(spec);
    const int h = ts.half_length();
    if (format == "csv") {
      std::ostringstream os;
      os.precision(std::numeric_limits<double>::max_digits10);
      os << "lag";
      for (int k = 0; k < ts.K(); ++k) os << ",g" << k;
      os << '\n';
      for (int u = -h; u <= h; ++u) {
        os << u;
        for (int k = 0; k < ts.K(); ++k) os << ',' << ts.at(k, u);
        os << '\n';
      }
      emit(out, os.str());
      return;
    }
    nlohmann::ordered_json j;
    j["N"] = ts.N();
    j["W"] = ts.W();
    j["K"] = ts.K();
    j["eigenvalues"] = ts.eigenvalues();
    j["widths"] = ts.widths();
    j["l1_concentration"] = l1_concentration(ts);
    j["lags"] = {-h, h};
    auto& tapers = j["tapers"] = nlohmann::ordered_json::array();
    for (int k = 0; k < ts.K(); ++k) tapers.push_back(std::vector<double>(ts.taper(k).begin(), ts.taper(k).end()));
    emit(out, j.dump(2) + "\n");
  }
};

// ------------------------------------------------------------------ estimate

struct EstimateCmd {
  SourceOptions src;
  GridFlags grid;
  std::optional<std::string> out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("estimate", "Multitaper evolutionary spectrum on the default time-frequency grid");
    src.add(cmd);
    grid.add(cmd);
    cmd->add_option("--out", out, "Output CSV file");
    cmd->callback([this] { run(); });
  }

  void run() const {
    const TimeSeries x = src.load();
    const TFGrid g = build_grid(x.size(), grid.options());
    emit(out, spectral_estimate_csv(estimate_grid(x, g, compute_dpss(grid_taper_spec(g)))));
  }
};

// ------------------------------------------------------------------ test

std::string text_line(const PsrReport& r) {
  std::ostringstream os;
  os << "psr: S_T/sigma2=" << r.S_T / r.sigma2 << " (threshold " << r.threshold_T << ", df " << r.df_T
     << ") S_IR/sigma2=" << r.S_IR / r.sigma2 << " (threshold " << r.threshold_IR << ", df " << r.df_IR << ") -> "
     << to_string(r.decision) << '\n';
  return os.str();
}

std::string text_line(const RsReport& r) {
  std::ostringstream os;
  os << "rs: t_R=" << r.t_R << " (threshold " << r.threshold << ", df " << r.df << ") -> " << to_string(r.decision)
     << '\n';
  return os.str();
}

struct TestCmd {
  SourceOptions src;
  GridFlags grid;
  std::string method = "both";
  double alpha = 0.05;
  std::string format = "json";
  std::optional<std::string> out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("test", "PSR and/or RS stationarity test");
    src.add(cmd);
    grid.add(cmd);
    cmd->add_option("--method", method, "Which test to run")->check(CLI::IsMember({"psr", "rs", "both"}));
    cmd->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
    cmd->add_option("--out", out, "Output file");
    cmd->callback([this] { run(); });
  }

  void run() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie strictly between 0 and 1");
    const TimeSeries x = src.load();
    const TFGrid g = build_grid(x.size(), grid.options());
    const LogSpectraTable table = log_table(estimate_grid(x, g, compute_dpss(grid_taper_spec(g))));
    for (const auto& w : table.warnings) std::cerr << "evospec: warning: " << w << '\n';
    std::string doc;
    if (method == "psr") {
      const auto r = psr_test(table, alpha);
      doc = format == "json" ? report_json(r, g) : text_line(r);
    } else if (method == "rs") {
      const auto r = rs_test(table, alpha);
      doc = format == "json" ? report_json(r, g) : text_line(r);
    } else {
      const auto p = psr_test(table, alpha);
      const auto r = rs_test(table, alpha);
      doc = format == "json" ? report_json(p, r, g) : text_line(p) + text_line(r);
    }
    emit(out, doc);
  }
};

// ------------------------------------------------------------------ simulate

struct SimulateCmd {
  std::string model;
  std::size_t T = 512;
  std::optional<std::uint64_t> seed;
  std::string study = "size";
  int envelope_sign = +1;
  std::optional<std::string> out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("simulate", "Sample path of a catalog model as a one-column CSV");
    cmd->add_option("--model", model, "Catalog model a..h")
        ->required()
        ->check(CLI::IsMember({"a", "b", "c", "d", "e", "f", "g", "h"}));
    cmd->add_option("--T", T, "Length")->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    cmd->add_option("--seed", seed, "Seed (default: $EVOSPEC_SEED, then 7)");
    cmd->add_option("--study", study, "size: unmodulated; power: bump-modulated")->check(CLI::IsMember({"size", "power"}));
    cmd->add_option("--envelope-sign", envelope_sign, "Sign of the bump exponent")->check(CLI::IsMember({-1, 1}));
    cmd->add_option("--out", out, "Output CSV file");
    cmd->callback([this] { run(); });
  }

  void run() const {
    emit(out, series_csv(simulate(model_catalog(model[0], parse_study(study), envelope_sign), T, resolve_seed(seed))));
  }
};

// ------------------------------------------------------------------ mc

std::vector<char> parse_models(const std::string& list) {
  if (list == "all") return {'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h'};
  std::vector<char> ids;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.size() != 1 || item[0] < 'a' || item[0] > 'h') {
      throw UsageError("--model expects a comma-separated list of a..h or 'all', got '" + item + "'");
    }
    ids.push_back(item[0]);
  }
  if (ids.empty()) throw UsageError("--model list is empty");
  return ids;
}

struct McCmd {
  std::string models;
  int M = 1000;
  std::size_t T = 512;
  double alpha = 0.05;
  std::optional<std::uint64_t> seed;
  std::string study = "size";
  int envelope_sign = +1;
  unsigned threads = 0;
  GridFlags grid;
  std::optional<std::string> out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("mc", "Monte Carlo rejection rates of both tests (size or power study)");
    cmd->add_option("--model", models, "Models, e.g. 'a,b,g' or 'all'")->required();
    cmd->add_option("--M", M, "Replicates per model")->check(CLI::PositiveNumber);
    cmd->add_option("--T", T, "Series length")->check(CLI::Range(std::size_t{32}, std::size_t{100000000}));
    cmd->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--seed", seed, "Base seed (default: $EVOSPEC_SEED, then 7)");
    cmd->add_option("--study", study, "size: unmodulated (a)-(g); power: modulated")
        ->check(CLI::IsMember({"size", "power"}));
    cmd->add_option("--envelope-sign", envelope_sign, "Sign of the bump exponent")->check(CLI::IsMember({-1, 1}));
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
    grid.add(cmd);
    cmd->add_option("--out", out, "Output JSON file");
    cmd->callback([this] { run(); });
  }

  void run() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie strictly between 0 and 1");
    McOptions o;
    o.M = M;
    o.T = T;
    o.alpha = alpha;
    o.seed = resolve_seed(seed);
    o.grid = grid.options();
    o.threads = threads;
    std::string doc = "[\n";
    bool first = true;
    for (char id : parse_models(models)) {
      const McSummary s = mc_study(model_catalog(id, parse_study(study), envelope_sign), o);
      if (s.exclusions) std::cerr << "evospec: warning: model " << id << ": " << s.exclusions << " replicates excluded\n";
      if (!first) doc += ",\n";
      doc += mc_summary_json(s);
      first = false;
    }
    emit(out, doc + "]\n");
  }
};

// ------------------------------------------------------------------ tradeoff

// "lo:hi:step" is an arithmetic range, "lo:hi" a log-spaced range of
// `points` distinct integers, and "a,b,c" an explicit list.
std::vector<int> parse_Ns(const std::string& spec, int points) {
  auto to_int = [&](const std::string& s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("--Ns: cannot parse '" + s + "'");
    return v;
  };
  std::vector<std::string> parts;
  const char sep = spec.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  std::vector<int> Ns;
  if (sep == ',') {
    for (const auto& p : parts) Ns.push_back(to_int(p));
  } else if (parts.size() == 2 || parts.size() == 3) {
    const int lo = to_int(parts[0]), hi = to_int(parts[1]);
    if (lo < 3 || hi < lo) throw UsageError("--Ns: need 3 <= lo <= hi");
    if (parts.size() == 3) {
      const int step = to_int(parts[2]);
      if (step < 1) throw UsageError("--Ns: step must be positive");
      for (int N = lo; N <= hi; N += step) Ns.push_back(N);
    } else {
      if (points < 2) throw UsageError("--points must be >= 2");
      std::set<int> grid;
      for (int i = 0; i < points; ++i) {
        grid.insert(static_cast<int>(std::lround(lo * std::pow(double(hi) / lo, double(i) / (points - 1)))));
      }
      Ns.assign(grid.begin(), grid.end());
    }
  } else {
    throw UsageError("--Ns expects lo:hi, lo:hi:step or a comma-separated list");
  }
  for (int N : Ns) {
    if (N < 3) throw UsageError("--Ns: every N must be >= 3");
  }
  return Ns;
}

std::string curve_csv(const std::vector<TradeoffPoint>& pts, Formula f) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << "N,K_opt,W,mse,term1,term2,term3,term4\n";
  for (const auto& p : pts) {
    os << p.N << ',' << p.K << ',' << p.W << ',' << (f == Formula::with_modulation ? p.mse18 : p.mse19) << ','
       << p.log_term << ',' << p.resolution_term << ',' << p.variance_term << ',' << p.nonstationary_term << '\n';
  }
  return os.str();
}

std::string profile_csv(const std::vector<TradeoffPoint>& pts, int chosen) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << "N,K,W,mse18,penalty,objective,term1,term2,term3,term4,selected\n";
  for (const auto& p : pts) {
    os << p.N << ',' << p.K << ',' << p.W << ',' << p.mse18 << ',' << p.penalty << ',' << p.objective << ','
       << p.log_term << ',' << p.resolution_term << ',' << p.variance_term << ',' << p.nonstationary_term << ','
       << (p.K == chosen ? 1 : 0) << '\n';
  }
  return os.str();
}

struct TradeoffCmd {
  double a = 200.0;
  std::string Ns = "5:301:2";
  int points = 25;
  int formula = 18;
  std::optional<int> profile_N;
  double penalty_weight = 1.0;
  std::string coupling = "k";
  std::string log_base = "2";
  std::optional<std::string> out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("tradeoff", "Bias/variance/non-stationarity tradeoff curves for choosing K");
    cmd->add_option("--a", a, "Bump envelope width; B_FY = a sqrt(pi/2)")->check(CLI::PositiveNumber);
    cmd->add_option("--Ns", Ns, "lo:hi (log-spaced), lo:hi:step, or a list a,b,c");
    cmd->add_option("--points", points, "Number of N values for a log-spaced lo:hi range");
    cmd->add_option("--formula", formula, "18: with the non-stationarity term; 19: without")
        ->check(CLI::IsMember({18, 19}));
    cmd->add_option("--profile", profile_N, "Instead of a curve, the penalized profile over K at this N");
    cmd->add_option("--penalty-weight", penalty_weight, "Weight of the K penalty in the profile")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--coupling", coupling, "k: W = K pi/N; k+1: W = (K+1) pi/N")->check(CLI::IsMember({"k", "k+1"}));
    cmd->add_option("--log-base", log_base, "Base of the log N bias term")->check(CLI::IsMember({"2", "e"}));
    cmd->add_option("--out", out, "Output CSV file");
    cmd->callback([this] { run(); });
  }

  void run() const {
    TradeoffConfig cfg;
    cfg.coupling = coupling == "k" ? Coupling::k_over_n : Coupling::k_plus_one;
    cfg.log_base = log_base == "2" ? LogBase::two : LogBase::natural;
    const double B_FY = bump_characteristic_width(a);
    if (profile_N) {
      const auto pick = penalized_K(*profile_N, B_FY, penalty_weight, cfg);
      emit(out, profile_csv(penalized_profile(*profile_N, B_FY, penalty_weight, cfg), pick.K));
      return;
    }
    const Formula f = formula == 18 ? Formula::with_modulation : Formula::stationary;
    const auto curve = optimal_curve(parse_Ns(Ns, points), f,
                                     f == Formula::with_modulation ? std::optional<double>(B_FY) : std::nullopt, cfg);
    emit(out, curve_csv(curve, f));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multitaper evolutionary spectra and stationarity tests"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "evospec 0.1.0");

  DpssCmd dpss;
  EstimateCmd estimate;
  TestCmd test;
  SimulateCmd sim;
  McCmd mc;
  TradeoffCmd tradeoff;
  dpss.add(app);
  estimate.add(app);
  test.add(app);
  sim.add(app);
  mc.add(app);
  tradeoff.add(app);

  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    std::cerr << "evospec: error: unknown command '" << argv[1]
              << "' (expected dpss, estimate, test, simulate, mc or tradeoff)\n"
              << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "evospec: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "ccg_cli/cli.hpp"

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ccg/csv.hpp"
#include "ccg/errors.hpp"
#include "ccg/harness.hpp"
#include "ccg/oracles.hpp"

namespace ccg::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Shared {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string log_level = "info";
  bool no_timing = false;
  std::optional<std::size_t> workers;
};

void add_shared(CLI::App& sub, Shared& shared, bool with_workers) {
  sub.add_option("--seed", shared.seed, "Random seed (overrides the scenario)");
  sub.add_option("--out", shared.out, "Output file or directory");
  sub.add_option("--log-level", shared.log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  sub.add_flag("--no-timing", shared.no_timing,
               "Write wall-clock and memory columns as 0/empty for reproducible files");
  if (with_workers) {
    sub.add_option("--workers", shared.workers, "Worker threads (env CCG_WORKERS)")
        ->check(CLI::PositiveNumber);
  }
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err, const std::string& level) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_st>(err, true);
  auto log = std::make_shared<spdlog::logger>("ccg", sink);
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::from_str(level));
  return log;
}

double parse_number(std::string_view token) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("not a number: '" + std::string(token) + "'");
  }
  return v;
}

// A theta argument is either a file (one row or one value per line, an
// optional non-numeric header line) or an inline comma-separated list.
std::vector<double> parse_theta(const std::string& arg) {
  std::string text = arg;
  if (fs::exists(arg)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  std::vector<double> out;
  std::istringstream lines(text);
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream tokens(line);
    std::vector<std::string> fields{std::istream_iterator<std::string>(tokens), {}};
    if (fields.empty()) continue;
    const bool numeric = std::all_of(fields.begin(), fields.end(), [](const std::string& f) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      return ec == std::errc() && ptr == f.data() + f.size();
    });
    if (!numeric && first) {
      first = false;
      continue;
    }
    first = false;
    for (const auto& f : fields) out.push_back(parse_number(f));
  }
  if (out.empty()) throw ValidationError("--theta: no values in '" + arg + "'");
  return out;
}

std::string join(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

Variant& pick_variant(ScenarioConfig& config, const std::string& name) {
  if (name.empty()) return config.variants.front();
  for (auto& v : config.variants) {
    if (v.name == name) return v;
  }
  throw ValidationError("scenario '" + config.name + "' has no variant '" + name + "'");
}

json describe_inner(const InnerSettings& inner) {
  return {{"T", inner.T},
          {"lmo", std::string(to_string(inner.lmo))},
          {"scheme", std::string(to_string(inner.scheme))},
          {"m", inner.m},
          {"gap_every", inner.gap_every}};
}

json describe_zo(const ZoConfig& zo) {
  return {{"K", zo.K},
          {"B", zo.B},
          {"rho", zo.rho},
          {"eta", zo.eta},
          {"directions", std::string(to_string(zo.directions))},
          {"interiorize", zo.interiorize},
          {"seed", zo.seed},
          {"workers", zo.workers}};
}

FamilySpec make_family(const std::string& kind, std::optional<NodeId> s, std::optional<NodeId> t,
                       const std::vector<NodeId>& terminals) {
  FamilySpec spec;
  if (kind == "st_paths" || kind == "hamiltonian_st_paths") {
    if (!s || !t) throw ValidationError("--family " + kind + " needs --s and --t");
    if (kind == "st_paths") {
      spec = StPaths{*s, *t};
    } else {
      spec = HamiltonianStPaths{*s, *t};
    }
  } else {
    spec = SteinerCycles{terminals};
  }
  validate(spec);
  return spec;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  auto out = open_output(path);
  body(out);
  if (!out) throw Error("failed writing " + path.string());
}

// Subcommands ---------------------------------------------------------------

struct BuildZddArgs {
  std::string net;
  std::string coords;
  std::string family = "st_paths";
  std::optional<NodeId> s;
  std::optional<NodeId> t;
  std::vector<NodeId> terminals;
  std::vector<NodeId> subgraph;
  bool euclidean = false;
};

int build_zdd(const BuildZddArgs& a, const Shared& shared, spdlog::logger& log, std::ostream& out) {
  if (shared.out.empty()) throw ValidationError("build-zdd needs --out");
  NetworkSource src;
  src.tntp = a.net;
  if (!a.coords.empty()) src.coords = a.coords;
  src.subgraph_nodes = a.subgraph;
  src.euclidean = a.euclidean;
  const auto spec = make_family(a.family, a.s, a.t, a.terminals);
  log.info("resolved config: {}", json{{"command", "build-zdd"},
                                       {"net", a.net},
                                       {"coords", a.coords},
                                       {"family", to_string(spec)},
                                       {"subgraph_nodes", a.subgraph},
                                       {"euclidean", a.euclidean},
                                       {"out", shared.out}}
                                      .dump());
  const Network net = load_network(src, fs::current_path());
  const auto order = identity_order(net.edge_count());
  const Zdd zdd = build_family(net, spec, order);
  write_zdd(shared.out, zdd, zdd_cache_key(net, spec, order));
  const auto c = count(zdd);
  out << "edges=" << net.edge_count() << " nodes=" << zdd.node_count() << " members="
      << (c.exact ? std::to_string(*c.exact) : "exp(" + format_double(c.log_count) + ")") << '\n';
  return kExitOk;
}

struct EquilibriumArgs {
  std::string scenario;
  std::string variant;
  std::string theta;
  std::optional<std::size_t> T;
  std::optional<std::string> lmo;
  std::optional<std::string> scheme;
  std::optional<std::size_t> m;
  std::optional<std::size_t> gap_every;
};

void apply_inner(InnerSettings& inner, const EquilibriumArgs& a) {
  if (a.T) inner.T = *a.T;
  if (a.lmo) inner.lmo = parse_lmo_kind(*a.lmo);
  if (a.scheme) inner.scheme = parse_scheme(*a.scheme);
  if (a.m) inner.m = *a.m;
  if (a.gap_every) inner.gap_every = *a.gap_every;
}

int equilibrium(const EquilibriumArgs& a, const Shared& shared, spdlog::logger& log,
                std::ostream& out) {
  auto config = load_scenario(a.scenario);
  Variant& v = pick_variant(config, a.variant);
  apply_inner(v.inner, a);
  const Instance inst(config);
  const auto theta = a.theta.empty() ? inst.theta0() : parse_theta(a.theta);
  const fs::path path = shared.out.empty() ? config.output / "equilibrium.csv" : fs::path(shared.out);

  FwOptions o;
  o.T = v.inner.T;
  o.gap_every = v.inner.gap_every;
  o.seed = shared.seed.value_or(v.zo.seed);
  log.info("resolved config: {}", json{{"command", "equilibrium"},
                                       {"scenario", config.name},
                                       {"variant", v.name},
                                       {"inner", describe_inner(v.inner)},
                                       {"theta", theta},
                                       {"seed", o.seed},
                                       {"out", path.string()}}
                                      .dump());
  for (const auto& note : inst.notes()) log.warn("{}", note);

  const auto fw = fw_equilibrium(inst.model(), theta, inst.lmo(v.inner), o);
  write_file(path, [&](std::ostream& f) { write_fw_trace(f, fw, !shared.no_timing); });
  log.info("potential={} gap={} lmo_calls={}", format_double(fw.trace.back().potential),
           format_double(fw.final_gap), fw.lmo_calls);
  out << path.string() << '\n';
  return kExitOk;
}

struct OptimizeArgs {
  EquilibriumArgs inner;
  std::optional<std::size_t> K;
  std::optional<std::size_t> B;
  std::optional<double> rho;
  std::optional<double> eta;
  std::optional<std::string> directions;
  std::optional<bool> interiorize;
};

int optimize(const OptimizeArgs& a, const Shared& shared, spdlog::logger& log, std::ostream& out) {
  auto config = load_scenario(a.inner.scenario);
  Variant& v = pick_variant(config, a.inner.variant);
  apply_inner(v.inner, a.inner);
  if (a.K) v.zo.K = *a.K;
  if (a.B) v.zo.B = *a.B;
  if (a.rho) v.zo.rho = *a.rho;
  if (a.eta) v.zo.eta = *a.eta;
  if (a.directions) v.zo.directions = parse_direction_kind(*a.directions);
  if (a.interiorize) v.zo.interiorize = *a.interiorize;
  if (shared.seed) v.zo.seed = *shared.seed;
  v.zo.workers = resolve_workers(shared.workers, config.workers);
  v.zo.validate();

  const Instance inst(config);
  const auto theta0 = a.inner.theta.empty() ? inst.theta0() : parse_theta(a.inner.theta);
  const fs::path path = shared.out.empty() ? config.output / "zo_trace.csv" : fs::path(shared.out);
  log.info("resolved config: {}", json{{"command", "optimize"},
                                       {"scenario", config.name},
                                       {"variant", v.name},
                                       {"inner", describe_inner(v.inner)},
                                       {"zo", describe_zo(v.zo)},
                                       {"theta0", theta0},
                                       {"out", path.string()}}
                                      .dump());
  for (const auto& note : inst.notes()) log.warn("{}", note);

  FwOptions o;
  o.T = v.inner.T;
  o.gap_every = v.inner.gap_every;
  const auto trace = zo_stackelberg(make_phi_oracle(inst.model(), inst.lmo(v.inner), o), theta0, v.zo);
  write_file(path, [&](std::ostream& f) { write_zo_trace(f, trace, !shared.no_timing); });
  log.info("phi: {} -> {}; final theta {}", format_double(trace.rows.front().phi_hat),
           format_double(trace.rows.back().phi_hat), join(trace.final_theta));
  out << path.string() << '\n';
  return kExitOk;
}

struct BenchArgs {
  std::string scenario;
  std::optional<std::size_t> reps;
};

int bench(const BenchArgs& a, const Shared& shared, spdlog::logger& log, std::ostream& out) {
  auto config = load_scenario(a.scenario);
  if (shared.seed) {
    for (auto& v : config.variants) v.zo.seed = *shared.seed;
    if (!a.reps) config.seeds = {*shared.seed};
  }
  RunOptions opt;
  opt.out = shared.out.empty() ? config.output : fs::path(shared.out);
  opt.seeds = resolve_seeds(config, a.reps);
  opt.workers = resolve_workers(shared.workers, config.workers);
  opt.timing = !shared.no_timing;

  json variants = json::array();
  for (const auto& v : config.variants) {
    variants.push_back({{"name", v.name}, {"inner", describe_inner(v.inner)}, {"zo", describe_zo(v.zo)}});
  }
  log.info("resolved config: {}", json{{"command", "bench"},
                                       {"scenario", config.name},
                                       {"variants", variants},
                                       {"seeds", opt.seeds},
                                       {"workers", opt.workers},
                                       {"out", opt.out.string()}}
                                      .dump());
  const Instance inst(config);
  for (const auto& note : inst.notes()) log.warn("{}", note);

  const auto report = run_scenario(config, inst, opt);
  for (const auto& run : report.runs) {
    if (!run.trace) log.error("run {} failed: {}", run.run_id, run.error);
  }
  out << report.summary_file.string() << '\n';
  if (report.failures == report.runs.size()) {
    log.error("every run failed; see {}", (opt.out / "failures.csv").string());
    return kExitRuntime;
  }
  if (report.failures > 0) log.warn("{} of {} runs failed", report.failures, report.runs.size());
  return kExitOk;
}

struct OracleArgs {
  std::string example;
  std::string scenario;
  std::string theta;
  std::size_t n = 5;
  double M = 4.0;
  std::size_t grid = 0;
  std::size_t from = 0;
  std::size_t to = 1;
};

int oracle(const OracleArgs& a, const Shared& shared, spdlog::logger& log, std::ostream& out) {
  if (!a.example.empty()) {
    if (a.theta.empty()) throw ValidationError("oracle --example needs --theta");
    const auto theta = parse_theta(a.theta);
    if (theta.size() != 1) throw ValidationError("oracle --example takes a scalar --theta");
    log.info("resolved config: {}", json{{"command", "oracle"},
                                         {"example", a.example},
                                         {"theta", theta[0]},
                                         {"n", a.n},
                                         {"M", a.M}}
                                        .dump());
    std::vector<double> y;
    if (a.example == "two_link") {
      y = closed_form_equilibrium(TwoLinkExample{theta[0]});
    } else {
      y = closed_form_equilibrium(ParallelKinksExample{a.n, a.M, theta[0]});
    }
    out << join(y) << '\n';
    return kExitOk;
  }

  const auto config = load_scenario(a.scenario);
  const Instance inst(config);
  const auto family = enumerate(inst.zdd(), 50);
  if (a.grid == 0) {
    const auto theta = a.theta.empty() ? inst.theta0() : parse_theta(a.theta);
    log.info("resolved config: {}", json{{"command", "oracle"},
                                         {"scenario", config.name},
                                         {"strategies", family.size()},
                                         {"theta", theta}}
                                        .dump());
    out << join(brute_force_equilibrium(inst.model(), theta, family)) << '\n';
    return kExitOk;
  }

  // Phi along theta0 + s (e_to - e_from), over the whole feasible segment.
  const auto theta0 = inst.theta0();
  const std::size_t k = theta0.size();
  if (a.from >= k || a.to >= k || a.from == a.to) {
    throw ValidationError("--from and --to must be distinct parameter indices below " +
                          std::to_string(k));
  }
  if (a.grid < 2) throw ValidationError("--grid needs at least 2 points");
  ThetaSlice slice;
  slice.origin = theta0;
  slice.axes = {std::vector<double>(k, 0.0)};
  slice.axes[0][a.from] = -1.0;
  slice.axes[0][a.to] = 1.0;
  slice.lo = {-theta0[a.to]};
  slice.hi = {theta0[a.from]};
  slice.points = {a.grid};
  log.info("resolved config: {}", json{{"command", "oracle"},
                                       {"scenario", config.name},
                                       {"strategies", family.size()},
                                       {"grid", a.grid},
                                       {"from", a.from},
                                       {"to", a.to}}
                                      .dump());
  const auto grid = brute_force_phi(exact_phi(inst.model(), family), slice);
  auto emit = [&](std::ostream& f) {
    CsvWriter w(f);
    std::vector<std::string> header{"s", "phi"};
    for (std::size_t i = 0; i < k; ++i) header.push_back("theta" + std::to_string(i));
    w.row(header);
    for (const auto& p : grid.points) {
      std::vector<std::string> row{format_double(p.coords[0]), format_double(p.phi)};
      for (double x : p.theta) row.push_back(format_double(x));
      w.row(row);
    }
  };
  if (shared.out.empty()) {
    emit(out);
  } else {
    write_file(shared.out, emit);
  }
  log.info("grid minimum {} at s={}", format_double(grid.min()),
           format_double(grid.points[grid.argmin].coords[0]));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria and leader optimization for combinatorial congestion games", "ccg"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Shared shared;

  BuildZddArgs zargs;
  auto* zdd_cmd = app.add_subcommand("build-zdd", "Compile a strategy family into a cache file");
  zdd_cmd->add_option("--net", zargs.net, "TNTP network file")->required()->check(CLI::ExistingFile);
  zdd_cmd->add_option("--coords", zargs.coords, "Node coordinate file")->check(CLI::ExistingFile);
  zdd_cmd->add_option("--family", zargs.family, "Family kind")
      ->check(CLI::IsMember({"st_paths", "hamiltonian_st_paths", "steiner_cycles"}));
  zdd_cmd->add_option("--s", zargs.s, "Source node");
  zdd_cmd->add_option("--t", zargs.t, "Target node");
  zdd_cmd->add_option("--terminals", zargs.terminals, "Steiner terminals")->delimiter(',');
  zdd_cmd->add_option("--subgraph", zargs.subgraph, "Keep only these nodes")->delimiter(',');
  zdd_cmd->add_flag("--euclidean", zargs.euclidean, "Weights from coordinates");
  add_shared(*zdd_cmd, shared, false);

  EquilibriumArgs eargs;
  auto add_inner = [](CLI::App& sub, EquilibriumArgs& e) {
    sub.add_option("--scenario", e.scenario, "Scenario JSON file")->required();
    sub.add_option("--variant", e.variant, "Variant name (default: first)");
    sub.add_option("--theta", e.theta, "Theta file or comma-separated values");
    sub.add_option("--T", e.T, "Frank-Wolfe iterations")->check(CLI::PositiveNumber);
    sub.add_option("--lmo", e.lmo, "shortest_path|zdd_exact|zdd_subsampled");
    sub.add_option("--scheme", e.scheme, "Sampling scheme US|UL|HL");
    sub.add_option("--m", e.m, "Samples per subsampled LMO call")->check(CLI::PositiveNumber);
    sub.add_option("--gap-every", e.gap_every, "Exact gap audit cadence (0: only at T)");
  };
  auto* eq_cmd = app.add_subcommand("equilibrium", "Frank-Wolfe equilibrium at a fixed theta");
  add_inner(*eq_cmd, eargs);
  add_shared(*eq_cmd, shared, false);

  OptimizeArgs oargs;
  auto* opt_cmd = app.add_subcommand("optimize", "Zeroth-order leader optimization");
  add_inner(*opt_cmd, oargs.inner);
  opt_cmd->add_option("--K", oargs.K, "Outer iterations");
  opt_cmd->add_option("--B", oargs.B, "Directions per iteration")->check(CLI::PositiveNumber);
  opt_cmd->add_option("--rho", oargs.rho, "Smoothing radius");
  opt_cmd->add_option("--eta", oargs.eta, "Step size");
  opt_cmd->add_option("--directions", oargs.directions, "sphere|rademacher");
  opt_cmd->add_option("--interiorize", oargs.interiorize, "Query from the interiorized set (true|false)");
  add_shared(*opt_cmd, shared, true);

  BenchArgs bargs;
  auto* bench_cmd = app.add_subcommand("bench", "Run every variant and seed, write summary CSVs");
  bench_cmd->add_option("--scenario", bargs.scenario, "Scenario JSON file")->required();
  bench_cmd->add_option("--reps", bargs.reps, "Consecutive seeds per variant")
      ->check(CLI::PositiveNumber);
  add_shared(*bench_cmd, shared, true);

  OracleArgs qargs;
  auto* oracle_cmd = app.add_subcommand("oracle", "Closed-form and brute-force reference answers");
  auto* example = oracle_cmd->add_option("--example", qargs.example, "two_link|parallel_kinks")
                      ->check(CLI::IsMember({"two_link", "parallel_kinks"}));
  auto* scenario = oracle_cmd->add_option("--scenario", qargs.scenario, "Enumerable scenario");
  example->excludes(scenario);
  oracle_cmd->add_option("--theta", qargs.theta, "Theta value(s) or file");
  oracle_cmd->add_option("--n", qargs.n, "parallel_kinks link count");
  oracle_cmd->add_option("--M", qargs.M, "parallel_kinks slope M");
  oracle_cmd->add_option("--grid", qargs.grid, "Tabulate Phi on this many points");
  oracle_cmd->add_option("--from", qargs.from, "Grid moves capacity from this parameter");
  oracle_cmd->add_option("--to", qargs.to, "... to this one");
  add_shared(*oracle_cmd, shared, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const auto log = make_logger(err, shared.log_level);
  try {
    if (zdd_cmd->parsed()) return build_zdd(zargs, shared, *log, out);
    if (eq_cmd->parsed()) return equilibrium(eargs, shared, *log, out);
    if (opt_cmd->parsed()) return optimize(oargs, shared, *log, out);
    if (bench_cmd->parsed()) return bench(bargs, shared, *log, out);
    if (qargs.example.empty() && qargs.scenario.empty()) {
      throw ValidationError("oracle needs --example or --scenario");
    }
    return oracle(qargs, shared, *log, out);
  } catch (const ValidationError& e) {
    log->error("{}", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    return kExitRuntime;
  }
}

}  // namespace ccg::cli

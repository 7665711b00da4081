// stirlab: simulation and numerical analysis of the multispecies stirring
// process; see README.md for the command reference.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stirlab/checks.hpp"
#include "stirlab/empirical.hpp"
#include "stirlab/ensembles.hpp"
#include "stirlab/girsanov.hpp"
#include "stirlab/hydro.hpp"
#include "stirlab/io.hpp"
#include "stirlab/process.hpp"
#include "stirlab/rate.hpp"
#include "stirlab/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stirlab;

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

struct Cli {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  int threads = 0;
  std::string format = "csv";
};

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("STIRLAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  json cfg;
  in >> cfg;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json& section(const json& cfg, const std::string& name) {
  if (!cfg.contains(name))
    throw std::runtime_error("config is missing the \"" + name + "\" block");
  return cfg.at(name);
}

// --- field construction from Fourier term lists ----------------------------

double eval_terms(const json& terms, double u, double t) {
  double acc = 0.0;
  for (const auto& term : terms) {
    double coef = term.at("coef").get<double>();
    int m = term.value("m", 0);
    std::string ut = term.value("u", "cos");
    double su = ut == "sin"   ? std::sin(kTwoPi * m * u)
                : ut == "cos" ? std::cos(kTwoPi * m * u)
                              : 1.0;
    double omega = term.value("omega", 0.0);
    std::string tt = term.value("t", "const");
    double st = tt == "sin"   ? std::sin(omega * t)
                : tt == "cos" ? std::cos(omega * t)
                              : 1.0;
    acc += coef * su * st;
  }
  return acc;
}

ProfileGrid profile_from_config(const json& cfg, int n_species) {
  const json& p = section(cfg, "profile");
  std::string kind = p.value("kind", "constant");
  if (kind == "constant") {
    std::vector<double> levels = p.at("levels").get<std::vector<double>>();
    return ProfileGrid::constant(n_species, levels,
                                 p.value("grid_points", std::size_t{256}));
  }
  if (kind == "fourier") {
    std::size_t m = p.value("grid_points", std::size_t{256});
    const json& species = p.at("species");
    if (species.size() != static_cast<std::size_t>(n_species))
      throw std::runtime_error("profile needs one species block per species");
    ProfileGrid grid(n_species, m);
    for (int a = 1; a <= n_species; ++a) {
      const json& block = species.at(a - 1);
      double base = block.value("base", 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        double u = static_cast<double>(j) / static_cast<double>(m);
        grid.set(a, j, base + eval_terms(block.value("terms", json::array()), u, 0.0));
      }
    }
    grid.validate();
    return grid;
  }
  throw std::runtime_error("unknown profile kind " + kind);
}

PotentialSet potentials_from_config(const json& cfg, int n_species, double t_end) {
  if (!cfg.contains("potentials")) return PotentialSet::zero(n_species, t_end);
  const json& p = cfg.at("potentials");
  std::size_t mu = p.value("space_points", std::size_t{64});
  std::size_t mt = p.value("time_points", std::size_t{1});
  const json& species = p.at("species");
  if (species.size() != static_cast<std::size_t>(n_species))
    throw std::runtime_error("potentials need one species block per species");
  return PotentialSet::sample(n_species, mu, mt, t_end, [&](int a, double u, double t) {
    return eval_terms(species.at(a - 1), u, t);
  });
}

SchemeParams scheme_from_config(const json& block) {
  SchemeParams s;
  s.space_cells = block.value("space_cells", std::size_t{128});
  s.time_slices = block.value("time_slices", std::size_t{129});
  s.t_end = block.value("t_end", 0.1);
  std::string stepper = block.value("stepper", "explicit");
  if (stepper == "imex")
    s.stepper = SchemeParams::Stepper::Imex;
  else if (stepper != "explicit")
    throw std::runtime_error("unknown stepper " + stepper);
  s.cfl_safety = block.value("cfl_safety", 0.4);
  return s;
}

// --- manifest ---------------------------------------------------------------

class Manifest {
 public:
  Manifest(const Cli& cli, const std::string& command)
      : cli_(cli), command_(command), start_(std::chrono::steady_clock::now()) {}

  void add_output(const std::string& path) { outputs_.push_back(path); }

  void write() const {
    auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start_).count();
    json m{{"command", command_},
           {"version", "0.1.0"},
           {"seed", cli_.seed},
           {"threads", resolve_threads(cli_.threads)},
           {"wall_time_s", wall},
           {"outputs", outputs_}};
    if (!cli_.config_path.empty()) {
      char hex[32];
      std::snprintf(hex, sizeof(hex), "%016llx",
                    static_cast<unsigned long long>(fnv1a_hash(slurp(cli_.config_path))));
      m["config"] = cli_.config_path;
      m["config_fnv1a"] = hex;
    }
    std::ofstream out(fs::path(cli_.out_dir) / "manifest.json");
    out << m.dump(2) << "\n";
  }

 private:
  const Cli& cli_;
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
};

void ensure_out(const Cli& cli) { fs::create_directories(cli.out_dir); }

void run_pool(std::size_t items, int threads,
              const std::function<void(std::size_t)>& fn) {
  if (threads <= 1) {
    for (std::size_t i = 0; i < items; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (items + threads - 1) / static_cast<std::size_t>(threads);
  for (int t = 0; t < threads; ++t) {
    std::size_t lo = chunk * static_cast<std::size_t>(t);
    std::size_t hi = std::min(items, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

// --- subcommands ------------------------------------------------------------

int cmd_simulate(const Cli& cli) {
  json cfg = load_config(cli.config_path);
  const json& block = section(cfg, "simulate");
  int n_species = cfg.value("n_species", 2);
  std::size_t n = block.at("n_sites").get<std::size_t>();
  double t_end = block.at("t_end").get<double>();

  ProfileGrid gamma = profile_from_config(cfg, n_species);
  PotentialSet pot = potentials_from_config(cfg, n_species, t_end);

  SimParams sp;
  sp.n_sites = n;
  sp.t_end = t_end;
  sp.seed = block.value("seed", cli.seed);
  sp.thinning_margin = block.value("thinning_margin", 1.05);

  ensure_out(cli);
  Manifest manifest(cli, "simulate");

  Configuration initial = sample_product_multinomial(
      gamma, n, CounterRng::key_for(sp.seed, sp.replica, 0x696e6974ull));
  EventLog log = simulate(initial, pot, sp);

  fs::path out(cli.out_dir);
  write_event_log(log, (out / "events.bin").string());
  manifest.add_output("events.bin");
  if (cli.format == "json") {
    write_event_log_jsonl(log, (out / "events.jsonl").string());
    manifest.add_output("events.jsonl");
  }

  double eps = block.value("smoothing_epsilon", 0.05);
  Configuration final = config_at(initial, log, t_end);
  write_field_csv(smooth(empirical_density(final), eps),
                  (out / "density.csv").string());
  manifest.add_output("density.csv");
  manifest.write();
  std::cout << "simulate: " << log.events.size() << " events, outputs in "
            << cli.out_dir << "\n";
  return 0;
}

int cmd_hydro(const Cli& cli) {
  json cfg = load_config(cli.config_path);
  const json& block = section(cfg, "hydro");
  int n_species = cfg.value("n_species", 2);
  SchemeParams scheme = scheme_from_config(block);

  ProfileGrid gamma = profile_from_config(cfg, n_species);
  PotentialSet pot = potentials_from_config(cfg, n_species, scheme.t_end);

  ensure_out(cli);
  Manifest manifest(cli, "hydro");
  DensityTrajectory rho = solve_hydro(gamma, pot, scheme);

  fs::path out(cli.out_dir);
  write_trajectory_binary(rho, (out / "trajectory.bin").string());
  manifest.add_output("trajectory.bin");
  if (cli.format == "csv") {
    write_trajectory_csv(rho, (out / "trajectory.csv").string());
    manifest.add_output("trajectory.csv");
  }
  manifest.write();
  std::cout << "hydro: M=" << rho.m() << " K=" << rho.k_slices() - 1
            << " outputs in " << cli.out_dir << "\n";
  return 0;
}

int cmd_rate(const Cli& cli) {
  json cfg = load_config(cli.config_path);
  const json& block = section(cfg, "rate");
  int n_species = cfg.value("n_species", 2);

  ensure_out(cli);
  Manifest manifest(cli, "rate");

  DensityTrajectory rho;
  if (block.contains("trajectory")) {
    rho = read_trajectory_binary(block.at("trajectory").get<std::string>());
  } else {
    SchemeParams scheme = scheme_from_config(section(cfg, "hydro"));
    ProfileGrid gamma0 = profile_from_config(cfg, n_species);
    PotentialSet pot = potentials_from_config(cfg, n_species, scheme.t_end);
    rho = solve_hydro(gamma0, pot, scheme);
  }
  ProfileGrid gamma = profile_from_config(cfg, n_species);

  RieszOptions opts;
  opts.delta_clip = block.value("delta_clip", 1e-6);
  RateEvaluation ev = evaluate_rate(rho, gamma, opts);

  std::string report = rate_report_json(ev, "zero-mean", opts.delta_clip, rho.m(),
                                        rho.k_slices() - 1, rho.dt());
  fs::path out(cli.out_dir);
  std::ofstream file(out / "rate_report.json");
  file << report << "\n";
  manifest.add_output("rate_report.json");
  manifest.write();
  std::cout << report << "\n";
  return 0;
}

int cmd_girsanov(const Cli& cli) {
  json cfg = load_config(cli.config_path);
  const json& block = section(cfg, "girsanov");
  int n_species = cfg.value("n_species", 2);
  std::size_t n = block.at("n_sites").get<std::size_t>();
  double t_end = block.at("t_end").get<double>();

  ProfileGrid gamma = profile_from_config(cfg, n_species);
  PotentialSet pot = potentials_from_config(cfg, n_species, t_end);

  ensure_out(cli);
  Manifest manifest(cli, "girsanov");
  std::size_t replicas = block.value("replicas", std::size_t{1});
  bool tilted = block.value("tilted", true);
  PotentialSet zero = PotentialSet::zero(n_species, t_end);

  json reports = json::array();
  for (std::size_t r = 0; r < replicas; ++r) {
    SimParams sp;
    sp.n_sites = n;
    sp.t_end = t_end;
    sp.seed = block.value("seed", cli.seed);
    sp.replica = r;
    sp.thinning_margin = block.value("thinning_margin", 1.05);
    Configuration initial = sample_product_multinomial(
        gamma, n, CounterRng::key_for(sp.seed, r, 0x696e6974ull));
    EventLog log = simulate(initial, tilted ? pot : zero, sp);
    WeightBreakdown w = girsanov_weight(initial, log, pot);
    reports.push_back(json::parse(weight_report_json(w)));
  }
  fs::path out(cli.out_dir);
  std::ofstream rep(out / "weights.json");
  rep << reports.dump(2) << "\n";
  manifest.add_output("weights.json");
  manifest.write();
  std::cout << "girsanov: " << replicas << " weight reports in " << cli.out_dir
            << "\n";
  return 0;
}

LocalObservable observable_from_name(const std::string& name) {
  if (name == "eta1")
    return LocalObservable::from_function(
        2, 1, [](const std::vector<std::uint8_t>& p) { return p[0] == 1 ? 1.0 : 0.0; });
  if (name == "eta1_pair")
    return LocalObservable::from_function(
        2, 2, [](const std::vector<std::uint8_t>& p) {
          return p[0] == 1 && p[1] == 1 ? 1.0 : 0.0;
        });
  if (name == "eta1_eta2")
    return LocalObservable::from_function(
        2, 2, [](const std::vector<std::uint8_t>& p) {
          return p[0] == 1 && p[1] == 2 ? 1.0 : 0.0;
        });
  throw std::runtime_error("unknown observable " + name +
                           " (use eta1, eta1_pair or eta1_eta2)");
}

int cmd_blocks(const Cli& cli) {
  json cfg = load_config(cli.config_path);
  const json& block = section(cfg, "blocks");
  LocalObservable phi = observable_from_name(block.value("phi", "eta1_pair"));

  ensure_out(cli);
  Manifest manifest(cli, "blocks");
  fs::path out(cli.out_dir);

  {
    std::ofstream gaps(out / "equivalence_gap.csv");
    gaps << "N,gap\n";
    for (std::size_t n : block.value("n_values", std::vector<std::size_t>{10, 50, 200})) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", n, equivalence_gap(phi, n));
      gaps << buf;
    }
    manifest.add_output("equivalence_gap.csv");
  }
  {
    std::ofstream gaps(out / "block_gaps.csv");
    gaps << "k,one_block,two_block\n";
    for (int k : block.value("k_values", std::vector<int>{1, 2, 3})) {
      BlockGaps g = block_gap_statistics(phi, k);
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", k, g.one_block, g.two_block);
      gaps << buf;
    }
    manifest.add_output("block_gaps.csv");
  }
  manifest.write();
  std::cout << "blocks: tables written to " << cli.out_dir << "\n";
  return 0;
}

int cmd_sweep(const Cli& cli) {
  json cfg = load_config(cli.config_path);
  const json& block = section(cfg, "sweep");
  int n_species = cfg.value("n_species", 2);
  double t_end = block.at("t_end").get<double>();
  std::vector<std::size_t> sizes = block.at("n_sites").get<std::vector<std::size_t>>();
  std::size_t replicas = block.value("replicas", std::size_t{4});
  double eps = block.value("smoothing_epsilon", 0.05);

  ProfileGrid gamma = profile_from_config(cfg, n_species);
  PotentialSet pot = potentials_from_config(cfg, n_species, t_end);

  ensure_out(cli);
  Manifest manifest(cli, "sweep");
  int threads = resolve_threads(cli.threads);

  struct Point {
    std::size_t n = 0, replica = 0, events = 0;
    std::vector<double> totals;
  };
  std::vector<Point> points(sizes.size() * replicas);
  run_pool(points.size(), threads, [&](std::size_t idx) {
    std::size_t n = sizes[idx / replicas];
    std::size_t r = idx % replicas;
    SimParams sp;
    sp.n_sites = n;
    sp.t_end = t_end;
    sp.seed = block.value("seed", cli.seed);
    sp.replica = r;
    sp.thinning_margin = block.value("thinning_margin", 1.05);
    Configuration initial = sample_product_multinomial(
        gamma, n, CounterRng::key_for(sp.seed, r, n));
    EventLog log = simulate(initial, pot, sp);
    EmpiricalField f = smooth(empirical_density(config_at(initial, log, t_end)), eps);
    Point& p = points[idx];
    p.n = n;
    p.replica = r;
    p.events = log.events.size();
    for (int a = 1; a <= n_species; ++a) p.totals.push_back(f.total_mass(a));
  });

  fs::path out(cli.out_dir);
  std::ofstream summary(out / "summary.csv");
  summary << "n_sites,replica,events";
  for (int a = 1; a <= n_species; ++a) summary << ",mass_" << a;
  summary << "\n";
  for (const Point& p : points) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%zu", p.n, p.replica, p.events);
    summary << buf;
    for (double v : p.totals) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      summary << buf;
    }
    summary << "\n";
  }
  manifest.add_output("summary.csv");
  manifest.write();
  std::cout << "sweep: " << points.size() << " points in " << cli.out_dir << "\n";
  return 0;
}

int cmd_verify(const Cli& cli, const std::string& what) {
  ensure_out(cli);
  Manifest manifest(cli, "verify " + what);
  fs::path out(cli.out_dir);
  int threads = resolve_threads(cli.threads);
  bool ok = false;

  json extra = json::object();
  if (!cli.config_path.empty()) {
    json cfg = load_config(cli.config_path);
    if (cfg.contains("verify") && cfg.at("verify").contains(what))
      extra = cfg.at("verify").at(what);
  }

  if (what == "einstein") {
    auto check = checks::einstein_identity_check(extra.value("grid", 50));
    ok = check.max_residual <= 1e-12;
    std::ofstream csv(out / "verify_einstein.csv");
    csv << "grid,max_residual\n" << check.grid << "," << check.max_residual << "\n";
    manifest.add_output("verify_einstein.csv");
    std::cout << (ok ? "PASS" : "FAIL") << " einstein: max residual "
              << check.max_residual << " on a " << check.grid << "x" << check.grid
              << " interior grid\n";
  } else if (what == "martingale") {
    auto check = checks::martingale_mean_one_check(
        extra.value("n_sites", std::size_t{16}), extra.value("t_end", 0.1),
        extra.value("replicas", std::size_t{2000}), cli.seed, threads);
    ok = check.deviation_sigmas <= 4.0;
    std::ofstream csv(out / "verify_martingale.csv");
    csv << "mean,stddev,replicas,deviation_sigmas\n"
        << check.forward.mean << "," << check.forward.stddev << ","
        << check.forward.replicas << "," << check.deviation_sigmas << "\n";
    manifest.add_output("verify_martingale.csv");
    std::cout << (ok ? "PASS" : "FAIL") << " martingale: E[Z] = "
              << check.forward.mean << " (" << check.deviation_sigmas
              << " sigma from 1)\n";
  } else if (what == "hydro-limit") {
    std::vector<std::size_t> sizes =
        extra.value("n_sites", std::vector<std::size_t>{64, 128, 256});
    auto check = checks::hydro_limit_trend_check(
        sizes, extra.value("replicas", std::size_t{20}), extra.value("t_end", 0.05),
        extra.value("epsilon", 0.1), cli.seed, threads);
    ok = check.strictly_decreasing;
    std::ofstream csv(out / "verify_hydro_limit.csv");
    csv << "n_sites,mean_l1\n";
    for (std::size_t i = 0; i < check.sizes.size(); ++i)
      csv << check.sizes[i] << "," << check.mean_l1[i] << "\n";
    manifest.add_output("verify_hydro_limit.csv");
    std::cout << (ok ? "PASS" : "FAIL") << " hydro-limit: mean L1 distances";
    for (double v : check.mean_l1) std::cout << " " << v;
    std::cout << "\n";
  } else if (what == "equivalence") {
    auto check = checks::equivalence_gap_check();
    ok = std::abs(check.gap10 - check.closed_form10) <= 1e-12 &&
         check.gap200 < check.gap50 && check.gap50 < check.gap10;
    std::ofstream csv(out / "verify_equivalence.csv");
    csv << "N,gap\n10," << check.gap10 << "\n50," << check.gap50 << "\n200,"
        << check.gap200 << "\n";
    manifest.add_output("verify_equivalence.csv");
    std::cout << (ok ? "PASS" : "FAIL") << " equivalence: gap(10) = " << check.gap10
              << " closed form " << check.closed_form10 << ", gap(50) = "
              << check.gap50 << ", gap(200) = " << check.gap200 << "\n";
  } else {
    throw std::runtime_error("unknown verify target " + what);
  }
  manifest.write();
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multispecies stirring process toolkit"};
  app.require_subcommand(1);

  Cli cli;
  app.add_option("--config", cli.config_path, "JSON configuration file");
  app.add_option("--seed", cli.seed, "base RNG seed");
  app.add_option("--out", cli.out_dir, "output directory");
  app.add_option("--threads", cli.threads,
                 "worker threads (default: STIRLAB_THREADS or 1)");
  app.add_option("--format", cli.format, "csv or json artifacts")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* sim = app.add_subcommand("simulate", "run the particle simulation");
  auto* hyd = app.add_subcommand("hydro", "solve the hydrodynamic equations");
  auto* rate = app.add_subcommand("rate", "evaluate the rate functional");
  auto* gir = app.add_subcommand("girsanov", "compute path weights");
  auto* blocks = app.add_subcommand("blocks", "ensemble and block-gap tables");
  auto* sweep = app.add_subcommand("sweep", "batch simulations over lattice sizes");
  auto* verify = app.add_subcommand("verify", "run a named verification");
  std::string verify_what;
  verify->add_option("target", verify_what,
                     "einstein | martingale | hydro-limit | equivalence")
      ->required();

  // global flags may follow the subcommand name
  for (auto* sub : {sim, hyd, rate, gir, blocks, sweep, verify}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(cli);
    if (hyd->parsed()) return cmd_hydro(cli);
    if (rate->parsed()) return cmd_rate(cli);
    if (gir->parsed()) return cmd_girsanov(cli);
    if (blocks->parsed()) return cmd_blocks(cli);
    if (sweep->parsed()) return cmd_sweep(cli);
    if (verify->parsed()) return cmd_verify(cli, verify_what);
  } catch (const std::exception& e) {
    json err{{"error", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  }
  return 0;
}

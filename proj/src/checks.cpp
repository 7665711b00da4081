#include "stirlab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "stirlab/empirical.hpp"
#include "stirlab/ensembles.hpp"
#include "stirlab/rate.hpp"
#include "stirlab/rng.hpp"

namespace stirlab::checks {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

void parallel_chunks(std::size_t items, int threads,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  if (threads <= 1 || items < 2) {
    fn(0, items);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (items + threads - 1) / static_cast<std::size_t>(threads);
  for (int t = 0; t < threads; ++t) {
    std::size_t lo = chunk * static_cast<std::size_t>(t);
    std::size_t hi = std::min(items, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi);
  }
  for (auto& th : pool) th.join();
}

LocalObservable phi_adjacent_ones() {
  // eta_1^0 eta_1^1
  return LocalObservable::from_function(
      2, 2, [](const std::vector<std::uint8_t>& pat) {
        return pat[0] == 1 && pat[1] == 1 ? 1.0 : 0.0;
      });
}

}  // namespace

// Incremental V statistic along a path: block sums and per-center terms are
// patched after each exchange instead of recomputed from scratch.
VTracker::VTracker(const Configuration& config, const LocalObservable& phi,
                   double epsilon)
    : config_(config), phi_(&phi), n_(config.n_sites()),
      k_(static_cast<std::size_t>(static_cast<double>(n_) * epsilon)),
      window_(2 * k_ + 1), inv_w_(1.0 / static_cast<double>(window_)),
      shifted_(n_), sum_phi_(n_), counts_(2 * n_, 0.0), term_(n_),
      dens_(phi.n_species()) {
  if (k_ < 1) throw std::invalid_argument("window half-width must cover a site");
  if (window_ > n_) throw std::invalid_argument("window larger than the torus");
  if (phi.n_species() != 2) throw std::invalid_argument("tracker supports 2 species");
  rebuild();
}

void VTracker::rebuild() {
  for (std::size_t y = 0; y < n_; ++y) shifted_[y] = phi_->shifted(config_, y);
  v_ = 0.0;
  for (std::size_t c = 0; c < n_; ++c) {
    double sp = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t d = 0; d <= 2 * k_; ++d) {
      std::size_t y = (c + n_ - k_ + d) % n_;
      sp += shifted_[y];
      if (config_.label(y) == 1) n1 += 1.0;
      if (config_.label(y) == 2) n2 += 1.0;
    }
    sum_phi_[c] = sp;
    counts_[c] = n1;
    counts_[n_ + c] = n2;
    term_[c] = center_term(c);
    v_ += term_[c];
  }
}

double VTracker::center_term(std::size_t c) {
  dens_[0] = counts_[c] * inv_w_;
  dens_[1] = counts_[n_ + c] * inv_w_;
  return std::abs(sum_phi_[c] * inv_w_ - tilde_phi(*phi_, dens_));
}

void VTracker::apply_event(const Event& e) {
  std::uint8_t a = config_.label(e.bond);
  std::uint8_t b = config_.label(config_.next_site(e.bond));
  config_.exchange(e.bond, e.alpha, e.beta);
  std::size_t site2 = config_.next_site(e.bond);

  // species counts at the two swapped sites
  for (std::size_t site : {static_cast<std::size_t>(e.bond), site2}) {
    std::uint8_t before = site == e.bond ? a : b;
    std::uint8_t after = config_.label(site);
    if (before == after) continue;
    for (std::size_t d = 0; d <= 2 * k_; ++d) {
      std::size_t c = (site + n_ - k_ + d) % n_;
      if (before == 1) counts_[c] -= 1.0;
      if (before == 2) counts_[n_ + c] -= 1.0;
      if (after == 1) counts_[c] += 1.0;
      if (after == 2) counts_[n_ + c] += 1.0;
    }
  }

  // windows of phi touching either swapped site
  auto ell = static_cast<std::size_t>(phi_->support());
  for (std::size_t off = 0; off <= ell; ++off) {
    std::size_t y = (e.bond + n_ - (ell - 1) + off) % n_;
    double fresh = phi_->shifted(config_, y);
    double delta = fresh - shifted_[y];
    if (delta == 0.0) continue;
    shifted_[y] = fresh;
    for (std::size_t d = 0; d <= 2 * k_; ++d)
      sum_phi_[(y + n_ - k_ + d) % n_] += delta;
  }

  // refresh the |.| terms over the touched centers
  std::size_t lo = (e.bond + n_ - (k_ + ell - 1)) % n_;
  std::size_t span = 2 * k_ + ell + 1;
  if (span >= n_) {
    lo = 0;
    span = n_;
  }
  for (std::size_t d = 0; d < span; ++d) {
    std::size_t c = (lo + d) % n_;
    double fresh = center_term(c);
    v_ += fresh - term_[c];
    term_[c] = fresh;
  }

  if (++events_since_rebuild_ >= 8192) {
    events_since_rebuild_ = 0;
    rebuild();
  }
}

ProfileGrid bench_profile(std::size_t grid_points) {
  ProfileGrid gamma(2, grid_points);
  for (std::size_t j = 0; j < grid_points; ++j) {
    double u = static_cast<double>(j) / static_cast<double>(grid_points);
    gamma.set(1, j, 1.0 / 3.0 + 0.1 * std::sin(kTwoPi * u));
    gamma.set(2, j, 1.0 / 3.0 - 0.1 * std::cos(kTwoPi * u));
  }
  return gamma;
}

PotentialSet bench_potential(double t_end, bool time_dependent) {
  std::size_t mt = time_dependent ? 33 : 1;
  return PotentialSet::sample(2, 64, mt, t_end, [&](int a, double u, double t) {
    double tw = time_dependent ? std::cos(kPi * t / t_end) : 1.0;
    if (a == 1) return 0.5 * std::sin(kTwoPi * u) * tw;
    return -0.4 * std::cos(kTwoPi * u) * tw;
  });
}

EinsteinCheck einstein_identity_check(int grid_per_axis) {
  EinsteinCheck out;
  out.grid = grid_per_axis;
  double den = static_cast<double>(grid_per_axis + 1);
  for (int i = 0; i < grid_per_axis; ++i)
    for (int j = 0; j < grid_per_axis; ++j) {
      double a = static_cast<double>(i + 1) / den;
      double b = static_cast<double>(j + 1) / den;
      std::vector<double> rho{a, (1.0 - a) * b};
      out.max_residual = std::max(out.max_residual, einstein_residual(rho));
    }
  return out;
}

PathwiseCheck girsanov_pathwise_check(std::size_t n_sites, double t_end,
                                      std::size_t n_paths, std::uint64_t seed) {
  PathwiseCheck out;
  out.paths = n_paths;
  ProfileGrid gamma = bench_profile(64);
  PotentialSet pot = bench_potential(t_end, true);
  for (std::size_t r = 0; r < n_paths; ++r) {
    SimParams sp;
    sp.n_sites = n_sites;
    sp.t_end = t_end;
    sp.seed = seed;
    sp.replica = r;
    sp.thinning_margin = 1.05;
    Configuration initial = sample_product_multinomial(
        gamma, n_sites, CounterRng::key_for(seed, r, 0x696e6974ull));
    EventLog log = simulate(initial, pot, sp);
    WeightBreakdown w = girsanov_weight(initial, log, pot);
    out.max_gap = std::max(out.max_gap,
                           std::abs(w.log_rn_event - w.log_rn_martingale));
  }
  return out;
}

MeanOneCheck martingale_mean_one_check(std::size_t n_sites, double t_end,
                                       std::size_t replicas, std::uint64_t seed,
                                       int threads) {
  MeanOneCheck out;
  ProfileGrid gamma = bench_profile(64);
  PotentialSet pot = bench_potential(t_end, false);
  SimParams base;
  base.n_sites = n_sites;
  base.t_end = t_end;
  base.seed = seed;
  out.forward = check_mean_one(gamma, pot, base, replicas, false, threads);
  double sigma = out.forward.stddev / std::sqrt(static_cast<double>(replicas));
  out.deviation_sigmas = sigma > 0.0 ? std::abs(out.forward.mean - 1.0) / sigma : 0.0;
  return out;
}

HydroTrendCheck hydro_limit_trend_check(const std::vector<std::size_t>& sizes,
                                        std::size_t replicas, double t_end,
                                        double epsilon, std::uint64_t seed,
                                        int threads) {
  HydroTrendCheck out;
  out.sizes = sizes;
  ProfileGrid gamma = bench_profile(256);
  PotentialSet pot = bench_potential(t_end, false);

  SchemeParams scheme;
  scheme.space_cells = 512;
  scheme.time_slices = 129;
  scheme.t_end = t_end;
  DensityTrajectory ref = solve_hydro(gamma, pot, scheme);
  std::size_t last = ref.k_slices() - 1;

  for (std::size_t n : sizes) {
    std::vector<double> l1(replicas, 0.0);
    parallel_chunks(replicas, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        SimParams sp;
        sp.n_sites = n;
        sp.t_end = t_end;
        sp.seed = seed;
        sp.replica = r;
        Configuration initial = sample_product_multinomial(
            gamma, n, CounterRng::key_for(seed, r, n));
        EventLog log = simulate(initial, pot, sp);
        Configuration final = config_at(initial, log, t_end);
        EmpiricalField smoothed = smooth(empirical_density(final), epsilon);
        double acc = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
          double u = static_cast<double>(x) / static_cast<double>(n);
          double s = u * static_cast<double>(ref.m());
          auto j = static_cast<std::size_t>(s);
          double w = s - static_cast<double>(j);
          std::size_t jp = (j + 1) % ref.m();
          for (int a = 1; a <= 2; ++a) {
            double pde = (1.0 - w) * ref.value(last, a, j) + w * ref.value(last, a, jp);
            acc += std::abs(smoothed.density(a, x) - pde);
          }
        }
        l1[r] = acc / static_cast<double>(n);
      }
    });
    double mean = 0.0;
    for (double v : l1) mean += v;
    out.mean_l1.push_back(mean / static_cast<double>(replicas));
  }

  out.strictly_decreasing = true;
  for (std::size_t i = 1; i < out.mean_l1.size(); ++i)
    if (!(out.mean_l1[i] < out.mean_l1[i - 1])) out.strictly_decreasing = false;
  return out;
}

HeatDecayCheck heat_decay_check(std::size_t m, double t_end) {
  ProfileGrid gamma(2, m);
  for (std::size_t j = 0; j < m; ++j) {
    double u = static_cast<double>(j) / static_cast<double>(m);
    gamma.set(1, j, 1.0 / 3.0 + 0.1 * std::sin(kTwoPi * u));
    gamma.set(2, j, 1.0 / 3.0);
  }
  SchemeParams scheme;
  scheme.space_cells = m;
  scheme.time_slices = 65;
  scheme.t_end = t_end;
  DensityTrajectory rho = solve_hydro(gamma, PotentialSet::zero(2, t_end), scheme);

  std::size_t last = rho.k_slices() - 1;
  double cs = 0.0, cc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double u = static_cast<double>(j) / static_cast<double>(m);
    cs += rho.value(last, 1, j) * std::sin(kTwoPi * u);
    cc += rho.value(last, 1, j) * std::cos(kTwoPi * u);
  }
  double amp = 2.0 * std::hypot(cs, cc) / static_cast<double>(m);
  HeatDecayCheck out;
  out.measured_ratio = amp / 0.1;
  out.exact_ratio = std::exp(-4.0 * kPi * kPi * t_end);
  out.rel_error = std::abs(out.measured_ratio - out.exact_ratio) / out.exact_ratio;
  return out;
}

CollapseSolverCheck single_species_collapse_check(std::size_t m, double t_end) {
  std::size_t slices = 65;
  ProfileGrid gamma2(2, m);
  ProfileGrid gamma1(1, m);
  for (std::size_t j = 0; j < m; ++j) {
    double u = static_cast<double>(j) / static_cast<double>(m);
    double g1 = 0.25 + 0.05 * std::sin(kTwoPi * u);
    double g2 = 0.30 + 0.05 * std::cos(kTwoPi * u);
    gamma2.set(1, j, g1);
    gamma2.set(2, j, g2);
    gamma1.set(1, j, g1 + g2);
  }
  auto h_fun = [t_end](int, double u, double t) {
    return 0.4 * std::sin(kTwoPi * u) * std::cos(kPi * t / t_end);
  };
  PotentialSet pot2 = PotentialSet::sample(2, 64, 33, t_end, h_fun);
  PotentialSet pot1 = PotentialSet::sample(1, 64, 33, t_end, h_fun);

  SchemeParams scheme;
  scheme.space_cells = m;
  scheme.time_slices = slices;
  scheme.t_end = t_end;
  DensityTrajectory rho2 = solve_hydro(gamma2, pot2, scheme);
  DensityTrajectory rho1 = solve_hydro(gamma1, pot1, scheme);

  CollapseSolverCheck out;
  for (std::size_t k = 0; k < slices; ++k)
    for (std::size_t j = 0; j < m; ++j) {
      double s2 = rho2.value(k, 1, j) + rho2.value(k, 2, j);
      out.density_max_diff =
          std::max(out.density_max_diff, std::abs(s2 - rho1.value(k, 1, j)));
    }

  SpaceTimeField h_field = sample_field(1, m, slices, t_end,
                                        [&](int, double u, double t) {
                                          return h_fun(1, u, t);
                                        });
  out.i0_abs_diff = collapse_check(rho2, h_field).abs_diff;
  return out;
}

RateRecoveryCheck rate_recovery_check(std::size_t m_coarse, std::size_t k_coarse,
                                      double t_end) {
  ProfileGrid gamma = bench_profile(512);
  auto h_fun = [t_end](int a, double u, double t) {
    double tw = std::cos(kPi * t / t_end);
    if (a == 1) return 0.35 * std::sin(kTwoPi * u) * tw;
    return -0.25 * std::cos(kTwoPi * u) * tw;
  };
  PotentialSet pot = PotentialSet::sample(2, 256, 65, t_end, h_fun);

  auto run = [&](std::size_t m, std::size_t slices) {
    SchemeParams scheme;
    scheme.space_cells = m;
    scheme.time_slices = slices;
    scheme.t_end = t_end;
    return solve_hydro(gamma, pot, scheme);
  };

  RateRecoveryCheck out;
  DensityTrajectory ref = run(4 * m_coarse, 4 * k_coarse + 1);
  SpaceTimeField h_ref = sample_field(2, 4 * m_coarse, 4 * k_coarse + 1, t_end, h_fun);
  out.target = dynamic_cost(ref, h_ref);

  DensityTrajectory coarse = run(m_coarse, k_coarse + 1);
  RieszResult rz_coarse = riesz_solve(coarse);
  out.i0_coarse = dynamic_cost(coarse, rz_coarse.h);
  out.residual_coarse = rz_coarse.residual;
  out.rel_err_coarse = std::abs(out.i0_coarse - out.target) / out.target;

  auto basis = make_trig_basis(2, m_coarse, k_coarse + 1, coarse.dt(), 2, 1);
  out.lb_minus_i0_coarse =
      variational_lower_bound(coarse, basis).value - out.i0_coarse;

  DensityTrajectory fine = run(2 * m_coarse, 2 * k_coarse + 1);
  RieszResult rz_fine = riesz_solve(fine);
  out.i0_fine = dynamic_cost(fine, rz_fine.h);
  out.rel_err_fine = std::abs(out.i0_fine - out.target) / out.target;
  return out;
}

EquivalenceCheck equivalence_gap_check() {
  LocalObservable phi = phi_adjacent_ones();
  EquivalenceCheck out;
  out.gap10 = equivalence_gap(phi, 10);
  out.gap50 = equivalence_gap(phi, 50);
  out.gap200 = equivalence_gap(phi, 200);
  out.closed_form10 = std::abs(5.0 * 4.0 / (10.0 * 9.0) - 0.25);
  return out;
}

FeynmanKacCheck feynman_kac_check(std::size_t n_sites, double t_end,
                                  std::size_t replicas, std::uint64_t seed,
                                  const std::vector<std::pair<double, double>>& pairs) {
  LocalObservable phi = phi_adjacent_ones();
  double epsilon = 1.0 / 3.0;

  std::size_t states = state_count(n_sites, 2);
  std::vector<double> v_table(states);
  std::vector<std::uint8_t> sites;
  for (std::size_t code = 0; code < states; ++code) {
    decode_state(code, n_sites, 2, sites);
    v_table[code] = v_statistic(Configuration(2, sites), phi, epsilon);
  }

  // integral of V along simulated symmetric paths, one value per replica
  std::vector<double> integrals(replicas, 0.0);
  ProfileGrid third = ProfileGrid::constant(2, {1.0 / 3.0, 1.0 / 3.0}, 1);
  PotentialSet zero = PotentialSet::zero(2, t_end);
  for (std::size_t r = 0; r < replicas; ++r) {
    SimParams sp;
    sp.n_sites = n_sites;
    sp.t_end = t_end;
    sp.seed = seed;
    sp.replica = r;
    Configuration initial = sample_product_multinomial(
        third, n_sites, CounterRng::key_for(seed, r, 0x666bull));
    EventLog log = simulate(initial, zero, sp);
    PathCursor cursor(initial, log);
    double acc = 0.0, t_prev = 0.0;
    while (true) {
      double t_next = cursor.done() ? t_end : cursor.peek().t;
      acc += v_table[encode_state(cursor.config().sites(), 2)] * (t_next - t_prev);
      if (cursor.done()) break;
      cursor.advance();
      t_prev = t_next;
    }
    integrals[r] = acc / static_cast<double>(n_sites);
  }

  FeynmanKacCheck out;
  for (auto [a, delta] : pairs) {
    FeynmanKacEntry e;
    e.a = a;
    e.delta = delta;
    e.lambda_max = feynman_kac_lambda(a, v_table, n_sites, 2);
    std::size_t hits = 0;
    for (double v : integrals)
      if (v >= delta) ++hits;
    e.p_hat = static_cast<double>(hits) / static_cast<double>(replicas);
    e.p_sigma = std::sqrt(std::max(e.p_hat * (1.0 - e.p_hat), 1e-12) /
                          static_cast<double>(replicas));
    double n = static_cast<double>(n_sites);
    e.bound = std::exp(n * ((t_end / n) * e.lambda_max - delta * a));
    out.entries.push_back(e);
  }
  return out;
}

SuperexpTrendCheck superexponential_trend_check(const std::vector<std::size_t>& sizes,
                                                double t_end, double delta,
                                                double epsilon, std::size_t replicas,
                                                std::uint64_t seed, int threads) {
  LocalObservable phi = phi_adjacent_ones();
  ProfileGrid third = ProfileGrid::constant(2, {1.0 / 3.0, 1.0 / 3.0}, 1);

  SuperexpTrendCheck out;
  out.sizes = sizes;
  for (std::size_t n : sizes) {
    PotentialSet zero = PotentialSet::zero(2, t_end);
    std::vector<std::uint8_t> hits(replicas, 0);
    parallel_chunks(replicas, threads, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        SimParams sp;
        sp.n_sites = n;
        sp.t_end = t_end;
        sp.seed = seed;
        sp.replica = r;
        Configuration initial = sample_product_multinomial(
            third, n, CounterRng::key_for(seed, r, n ^ 0x5eedull));
        EventLog log = simulate(initial, zero, sp);
        VTracker tracker(initial, phi, epsilon);
        double acc = 0.0, t_prev = 0.0;
        for (const Event& e : log.events) {
          acc += tracker.value() * (e.t - t_prev);
          tracker.apply_event(e);
          t_prev = e.t;
        }
        acc += tracker.value() * (t_end - t_prev);
        hits[r] = (acc / static_cast<double>(n) >= delta) ? 1 : 0;
      }
    });
    std::size_t total = 0;
    for (std::uint8_t h : hits) total += h;
    double p = std::max(static_cast<double>(total),
                        0.5) /  // keep the log finite when nothing hits
               static_cast<double>(replicas);
    out.p_hat.push_back(p);
    out.log_p_over_n.push_back(std::log(p) / static_cast<double>(n));
  }

  out.non_increasing = true;
  for (std::size_t i = 1; i < out.log_p_over_n.size(); ++i)
    if (out.log_p_over_n[i] > out.log_p_over_n[i - 1] + 1e-12)
      out.non_increasing = false;
  return out;
}

ConservationCheck conservation_check(std::uint64_t seed) {
  ConservationCheck out;
  ProfileGrid gamma = bench_profile(64);
  PotentialSet pot = bench_potential(0.2, false);

  SimParams sp;
  sp.n_sites = 128;
  sp.t_end = 0.2;
  sp.seed = seed;
  Configuration initial = sample_product_multinomial(gamma, sp.n_sites, seed);
  EventLog log = simulate(initial, pot, sp);
  out.counts_constant = true;
  PathCursor cursor(initial, log);
  std::vector<std::int64_t> counts0 = initial.counts();
  while (!cursor.done()) {
    cursor.advance();
    if (cursor.config().counts() != counts0) out.counts_constant = false;
  }
  if (!cursor.config().counts_consistent()) out.counts_constant = false;

  SchemeParams scheme;
  scheme.space_cells = 128;
  scheme.time_slices = 65;
  scheme.t_end = 0.5;
  PotentialSet pot_pde = bench_potential(scheme.t_end, true);
  DensityTrajectory rho = solve_hydro(gamma, pot_pde, scheme);
  double drift = 0.0;
  for (int a = 1; a <= 2; ++a) {
    double m0 = rho.spatial_mean(0, a);
    for (std::size_t k = 1; k < rho.k_slices(); ++k) {
      double t = rho.dt() * static_cast<double>(k);
      drift = std::max(drift, std::abs(rho.spatial_mean(k, a) - m0) / t);
    }
  }
  out.pde_mass_drift_per_unit_time = drift;
  return out;
}

}  // namespace stirlab::checks

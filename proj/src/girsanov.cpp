#include "stirlab/girsanov.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "stirlab/rng.hpp"

namespace stirlab {

namespace {

// composite midpoint with panel tripling; breakpoints isolate the kinks of
// the time interpolation so each segment is smooth
double integrate_adaptive(double t0, double t1, const std::function<double(double)>& f,
                          const PotentialSet& pot, double tol) {
  if (t1 <= t0) return 0.0;
  std::vector<double> edges{t0};
  for (double b : pot.time_breakpoints(t0, t1)) edges.push_back(b);
  edges.push_back(t1);

  double total = 0.0;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    double a = edges[s], b = edges[s + 1];
    double len = b - a;
    if (len <= 0.0) continue;
    std::size_t panels = 1;
    double prev = len * f(0.5 * (a + b));
    for (int round = 0; round < 12; ++round) {
      panels *= 3;
      double w = len / static_cast<double>(panels);
      double acc = 0.0;
      for (std::size_t i = 0; i < panels; ++i)
        acc += f(a + (static_cast<double>(i) + 0.5) * w);
      double cur = acc * w;
      if (std::abs(cur - prev) <= tol * (1.0 + std::abs(cur))) {
        prev = cur;
        break;
      }
      prev = cur;
    }
    total += prev;
  }
  return total;
}

// N <mu(t), H(.,t)> = sum over occupied sites of H_label(x/N, t)
double pairing(const Configuration& config, const PotentialSet& pot, double t) {
  double n = static_cast<double>(config.n_sites());
  double s = 0.0;
  for (std::size_t x = 0; x < config.n_sites(); ++x) {
    std::uint8_t a = config.label(x);
    if (a > 0) s += pot.species(a, static_cast<double>(x) / n, t);
  }
  return s;
}

double pairing_dt(const Configuration& config, const PotentialSet& pot, double t) {
  double n = static_cast<double>(config.n_sites());
  double s = 0.0;
  for (std::size_t x = 0; x < config.n_sites(); ++x) {
    std::uint8_t a = config.label(x);
    if (a > 0) s += pot.species_dt(a, static_cast<double>(x) / n, t);
  }
  return s;
}

double bond_exponent_sum(const Configuration& config, const PotentialSet& pot,
                         double t) {
  double s = 0.0;
  for (std::size_t x = 0; x < config.n_sites(); ++x) {
    std::uint8_t a = config.label(x);
    std::uint8_t b = config.label(config.next_site(x));
    if (a != b) s += std::expm1(pot.pair_grad_n(a, b, x, config.n_sites(), t));
  }
  return s;
}

}  // namespace

double exact_generator_action(const Configuration& config,
                              const PotentialSet& potentials, double t) {
  double n2 = static_cast<double>(config.n_sites()) * static_cast<double>(config.n_sites());
  return n2 * bond_exponent_sum(config, potentials, t);
}

double taylor_generator_action(const Configuration& config,
                               const PotentialSet& potentials, double t) {
  double n2 = static_cast<double>(config.n_sites()) * static_cast<double>(config.n_sites());
  double s = 0.0;
  for (std::size_t x = 0; x < config.n_sites(); ++x) {
    std::uint8_t a = config.label(x);
    std::uint8_t b = config.label(config.next_site(x));
    if (a == b) continue;
    double g = potentials.pair_grad_n(a, b, x, config.n_sites(), t);
    s += g + 0.5 * g * g;
  }
  return n2 * s;
}

WeightBreakdown girsanov_weight(const Configuration& initial, const EventLog& log,
                                const PotentialSet& potentials) {
  const std::size_t n = initial.n_sites();
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  const bool time_const = potentials.time_points() <= 1;

  WeightBreakdown w;
  w.boundary_initial = pairing(initial, potentials, 0.0);

  PathCursor cursor(initial, log);
  double t_prev = 0.0;

  // constant-in-time potentials: the compensator integrand changes only at
  // events, so track the bond sum incrementally
  double bond_sum = time_const ? bond_exponent_sum(initial, potentials, 0.0) : 0.0;
  std::size_t refresh = 0;

  auto bond_term = [&](const Configuration& cfg, std::size_t x, double t) {
    std::uint8_t a = cfg.label(x);
    std::uint8_t b = cfg.label(cfg.next_site(x));
    return a == b ? 0.0 : std::expm1(potentials.pair_grad_n(a, b, x, n, t));
  };

  while (true) {
    double t_next = cursor.done() ? log.t_end : cursor.peek().t;
    const Configuration& cfg = cursor.config();
    if (t_next > t_prev) {
      if (time_const) {
        w.compensator += n2 * bond_sum * (t_next - t_prev);
      } else {
        w.compensator += n2 * integrate_adaptive(
                                  t_prev, t_next,
                                  [&](double s) { return bond_exponent_sum(cfg, potentials, s); },
                                  potentials, 1e-12);
        w.dt_pairing += integrate_adaptive(
            t_prev, t_next, [&](double s) { return pairing_dt(cfg, potentials, s); },
            potentials, 1e-12);
      }
    }
    if (cursor.done()) break;

    const Event& e = cursor.peek();
    w.jump_term +=
        potentials.pair_grad_n(e.alpha, e.beta, e.bond, n, e.t);
    if (time_const) {
      // bonds touching the swapped pair; left and right coincide on N = 2
      std::size_t left = (e.bond + n - 1) % n;
      std::size_t right = (e.bond + 1) % n;
      std::size_t touched[3] = {left, e.bond, right};
      std::size_t n_touched = (left == right) ? 2 : 3;
      for (std::size_t i = 0; i < n_touched; ++i)
        bond_sum -= bond_term(cfg, touched[i], e.t);
      cursor.advance();
      const Configuration& after = cursor.config();
      for (std::size_t i = 0; i < n_touched; ++i)
        bond_sum += bond_term(after, touched[i], e.t);
      if (++refresh % 4096 == 0) bond_sum = bond_exponent_sum(after, potentials, e.t);
    } else {
      cursor.advance();
    }
    t_prev = e.t;
  }

  w.boundary_final = pairing(cursor.config(), potentials, log.t_end);
  w.log_rn_event = w.jump_term - w.compensator;
  w.log_rn_martingale =
      w.boundary_final - w.boundary_initial - w.compensator - w.dt_pairing;
  return w;
}

double log_rn_event_form(const Configuration& initial, const EventLog& log,
                         const PotentialSet& potentials) {
  return girsanov_weight(initial, log, potentials).log_rn_event;
}

double log_rn_martingale_form(const Configuration& initial, const EventLog& log,
                              const PotentialSet& potentials) {
  return girsanov_weight(initial, log, potentials).log_rn_martingale;
}

MeanOneResult check_mean_one(const ProfileGrid& gamma, const PotentialSet& potentials,
                             const SimParams& base, std::size_t replicas, bool tilted,
                             int threads) {
  if (replicas < 2) throw std::invalid_argument("need at least 2 replicas");
  PotentialSet zero = PotentialSet::zero(gamma.n_species(), std::max(base.t_end, 1e-12));
  std::vector<double> weights(replicas, 0.0);

  auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      SimParams sp = base;
      sp.replica = base.replica + r;
      Configuration initial = sample_product_multinomial(
          gamma, base.n_sites, CounterRng::key_for(base.seed, sp.replica, 0x696e6974ull));
      EventLog log = simulate(initial, tilted ? potentials : zero, sp);
      double z = log_rn_event_form(initial, log, potentials);
      weights[r] = std::exp(tilted ? -z : z);
    }
  };

  if (threads <= 1) {
    run_range(0, replicas);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (replicas + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::size_t lo = chunk * static_cast<std::size_t>(t);
      std::size_t hi = std::min(replicas, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  MeanOneResult res;
  res.replicas = replicas;
  double sum = 0.0;
  for (double w : weights) sum += w;
  res.mean = sum / static_cast<double>(replicas);
  double var = 0.0;
  for (double w : weights) var += (w - res.mean) * (w - res.mean);
  var /= static_cast<double>(replicas - 1);
  res.stddev = std::sqrt(var);
  res.half_width = 4.0 * res.stddev / std::sqrt(static_cast<double>(replicas));
  return res;
}

double dynkin_martingale(const Configuration& initial, const EventLog& log,
                         const PotentialSet& g, const PotentialSet& potentials,
                         double t) {
  const std::size_t n = initial.n_sites();
  const double dn = static_cast<double>(n);
  t = std::min(t, log.t_end);

  auto generator_term = [&](const Configuration& cfg, double s) {
    double acc = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      std::uint8_t a = cfg.label(x);
      std::uint8_t b = cfg.label(cfg.next_site(x));
      if (a == b) continue;
      double rate = std::exp(potentials.pair_grad_n(a, b, x, n, s));
      double dg = g.species_grad_n(a, x, n, s) - g.species_grad_n(b, x, n, s);
      acc += rate * dg;
    }
    return dn * acc;  // N^2 * (1/N) * sum
  };

  double m0 = pairing(initial, g, 0.0) / dn;
  PathCursor cursor(initial, log);
  double integral = 0.0;
  double t_prev = 0.0;
  while (t_prev < t) {
    double t_next = cursor.done() ? log.t_end : cursor.peek().t;
    bool last = t_next >= t;
    if (last) t_next = t;
    const Configuration& cfg = cursor.config();
    integral += integrate_adaptive(
        t_prev, t_next,
        [&](double s) { return generator_term(cfg, s) + pairing_dt(cfg, g, s) / dn; },
        g, 1e-12);
    if (last || cursor.done()) {
      t_prev = t_next;
      break;
    }
    cursor.advance();
    t_prev = t_next;
  }
  double mt = pairing(cursor.config(), g, t) / dn;
  return mt - m0 - integral;
}

double carre_du_champ(const Configuration& config, const PotentialSet& g,
                      const PotentialSet& potentials, double t) {
  const std::size_t n = config.n_sites();
  double acc = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    std::uint8_t a = config.label(x);
    std::uint8_t b = config.label(config.next_site(x));
    if (a == b) continue;
    double rate = std::exp(potentials.pair_grad_n(a, b, x, n, t));
    double dg = g.species_grad_n(a, x, n, t) - g.species_grad_n(b, x, n, t);
    acc += rate * dg * dg;
  }
  return acc;
}

}  // namespace stirlab

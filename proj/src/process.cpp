#include "stirlab/process.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>

#include "stirlab/rng.hpp"

namespace stirlab {

double exchange_rate(const Configuration& config, std::size_t x,
                     const PotentialSet& potentials, double t) {
  std::uint8_t a = config.label(x);
  std::uint8_t b = config.label(config.next_site(x));
  return std::exp(potentials.pair_grad_n(a, b, x, config.n_sites(), t));
}

namespace {

struct Proposal {
  double t;
  std::uint32_t bond;
  std::uint32_t cell;  // majorant cell the proposal was drawn in
  bool operator>(const Proposal& o) const { return t > o.t; }
};

}  // namespace

EventLog simulate(const Configuration& initial, const PotentialSet& potentials,
                  const SimParams& params) {
  if (params.n_sites != initial.n_sites())
    throw std::invalid_argument("params.n_sites does not match the configuration");
  if (params.n_sites < 2) throw std::invalid_argument("need at least 2 sites");
  if (!(params.t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  if (!(params.thinning_margin >= 1.0))
    throw std::invalid_argument("thinning_margin must be >= 1");

  const std::size_t n = params.n_sites;
  const double n2 = static_cast<double>(n) * static_cast<double>(n);

  EventLog log;
  log.n_sites = n;
  log.n_species = static_cast<std::uint32_t>(initial.n_species());
  log.t_end = params.t_end;
  log.seed = params.seed;

  Configuration config = initial;

  // Majorant cells follow the potential's time grid; a single cell when the
  // potential is time-constant.
  std::vector<double> cell_edges{0.0};
  for (double t : potentials.time_breakpoints(0.0, params.t_end)) cell_edges.push_back(t);
  cell_edges.push_back(params.t_end);
  const std::size_t n_cells = cell_edges.size() - 1;

  std::vector<double> cell_majorant(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    double g = potentials.max_abs_pair_grad_n(n, cell_edges[c], cell_edges[c + 1]);
    cell_majorant[c] = n2 * std::exp(g) * params.thinning_margin;
  }

  std::vector<CounterRng> streams;
  streams.reserve(n);
  for (std::size_t x = 0; x < n; ++x)
    streams.emplace_back(CounterRng::key_for(params.seed, params.replica, x));

  // Majorant cells are processed in order; every bond clock restarts fresh at
  // each cell edge (exact for Poisson proposals by memorylessness), so events
  // are generated in increasing time with the configuration current at each
  // proposal.
  for (std::size_t c = 0; c < n_cells; ++c) {
    double cell_end = cell_edges[c + 1];
    double rate = cell_majorant[c];
    std::priority_queue<Proposal, std::vector<Proposal>, std::greater<Proposal>> queue;
    for (std::size_t x = 0; x < n; ++x) {
      double t = cell_edges[c] + streams[x].next_exponential(rate);
      if (t < cell_end)
        queue.push({t, static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(c)});
    }
    while (!queue.empty()) {
      Proposal p = queue.top();
      queue.pop();

      std::uint8_t a = config.label(p.bond);
      std::uint8_t b = config.label(config.next_site(p.bond));
      if (a != b) {
        double true_rate = n2 * std::exp(potentials.pair_grad_n(a, b, p.bond, n, p.t));
        double ratio = true_rate / rate;
        if (ratio > 1.0)
          throw std::runtime_error("thinning majorant violated; increase thinning_margin");
        if (streams[p.bond].next_uniform() < ratio) {
          log.events.push_back({p.t, p.bond, a, b});
          config.exchange(p.bond, a, b);
        }
      }

      double t = p.t + streams[p.bond].next_exponential(rate);
      if (t < cell_end) queue.push({t, p.bond, p.cell});
    }
  }

  return log;
}

PathCursor::PathCursor(Configuration initial, const EventLog& log)
    : config_(std::move(initial)), log_(&log) {
  if (config_.n_sites() != log.n_sites)
    throw std::invalid_argument("event log does not match the configuration");
}

void PathCursor::advance() {
  const Event& e = log_->events[idx_];
  std::uint8_t a = config_.label(e.bond);
  std::uint8_t b = config_.label(config_.next_site(e.bond));
  if (a != e.alpha || b != e.beta)
    throw std::runtime_error("event inconsistent with replayed path");
  config_.exchange(e.bond, e.alpha, e.beta);
  t_ = e.t;
  ++idx_;
}

Configuration config_at(const Configuration& initial, const EventLog& log, double t) {
  PathCursor cursor(initial, log);
  while (!cursor.done() && cursor.peek().t <= t) cursor.advance();
  return cursor.config();
}

}  // namespace stirlab

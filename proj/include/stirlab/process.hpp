#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stirlab/configuration.hpp"
#include "stirlab/potential.hpp"

namespace stirlab {

struct SimParams {
  std::size_t n_sites = 0;
  double t_end = 0.0;        // macroscopic horizon; microscopic time is N^2 * t_end
  std::uint64_t seed = 0;
  double thinning_margin = 1.0;  // safety factor >= 1 on the proposal majorant
  std::uint64_t replica = 0;
};

struct Event {
  double t;            // macroscopic time
  std::uint32_t bond;  // exchange across (bond, bond+1 mod N)
  std::uint8_t alpha;  // label at bond before the swap
  std::uint8_t beta;   // label at bond+1 before the swap
};

struct EventLog {
  std::uint32_t version = 1;
  std::uint64_t n_sites = 0;
  std::uint32_t n_species = 0;
  double t_end = 0.0;
  std::uint64_t seed = 0;
  std::vector<Event> events;
};

/// Exchange rate of the bond (x, x+1) at macroscopic time t, without the N^2
/// clock speedup: exp(grad_N H_{ab}(x/N, t)) for the occupancies (a, b) found
/// on the bond. Equal labels give a unit rate whose move is the identity.
double exchange_rate(const Configuration& config, std::size_t x,
                     const PotentialSet& potentials, double t);

/// Exact realization of the stirring dynamics with bond rates
/// N^2 * exchange_rate, by Poisson thinning against a per-time-cell global
/// majorant. Null moves (equal labels) carry no proposals beyond rejection.
/// Throws if a true rate ever exceeds the majorant.
EventLog simulate(const Configuration& initial, const PotentialSet& potentials,
                  const SimParams& params);

/// Sequential replay of a simulated path.
class PathCursor {
 public:
  PathCursor(Configuration initial, const EventLog& log);

  const Configuration& config() const { return config_; }
  double time() const { return t_; }
  bool done() const { return idx_ >= log_->events.size(); }
  const Event& peek() const { return log_->events[idx_]; }
  void advance();  // apply the next event

 private:
  Configuration config_;
  const EventLog* log_;
  std::size_t idx_ = 0;
  double t_ = 0.0;
};

/// Configuration at macroscopic time t (events strictly before or at t applied).
Configuration config_at(const Configuration& initial, const EventLog& log, double t);

}  // namespace stirlab

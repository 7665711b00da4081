#pragma once

#include <cstddef>
#include <vector>

#include "stirlab/configuration.hpp"
#include "stirlab/potential.hpp"
#include "stirlab/process.hpp"

namespace stirlab {

/// Pathwise log Radon-Nikodym weight of the tilted dynamics relative to the
/// symmetric one, in both algebraically equal forms:
///   event form:      sum over jumps of grad_N H_{ab}  -  compensator
///   martingale form: boundary pairings - time-derivative pairing - compensator
/// The compensator is N^2 int sum_x (exp(grad_N H_{ab}) - 1) ds, integrated
/// exactly between events (the configuration is frozen there) with adaptive
/// midpoint refinement over the explicit time dependence of H.
struct WeightBreakdown {
  double log_rn_event = 0.0;
  double log_rn_martingale = 0.0;
  double jump_term = 0.0;
  double compensator = 0.0;
  double boundary_initial = 0.0;
  double boundary_final = 0.0;
  double dt_pairing = 0.0;
};

WeightBreakdown girsanov_weight(const Configuration& initial, const EventLog& log,
                                const PotentialSet& potentials);

double log_rn_event_form(const Configuration& initial, const EventLog& log,
                         const PotentialSet& potentials);
double log_rn_martingale_form(const Configuration& initial, const EventLog& log,
                              const PotentialSet& potentials);

/// Diagnostic Taylor form of the generator action at one time for a frozen
/// configuration: sum over sites of the quadratic expansion terms.
double taylor_generator_action(const Configuration& config,
                               const PotentialSet& potentials, double t);
/// Exact counterpart: N^2 sum_x (exp(grad_N H_{ab}) - 1).
double exact_generator_action(const Configuration& config,
                              const PotentialSet& potentials, double t);

struct MeanOneResult {
  double mean = 0.0;
  double stddev = 0.0;     // sample standard deviation of the weights
  double half_width = 0.0; // 4 sigma / sqrt(R)
  std::size_t replicas = 0;
};

/// Monte-Carlo check that the exponential weight has mean one. With
/// `tilted = false` paths are drawn from the symmetric process and exp(log Z)
/// is averaged; with `tilted = true` paths are drawn from the tilted process
/// and exp(-log Z) is averaged (the importance-sampling identity).
MeanOneResult check_mean_one(const ProfileGrid& gamma, const PotentialSet& potentials,
                             const SimParams& base, std::size_t replicas,
                             bool tilted = false, int threads = 1);

/// Dynkin martingale M^G(t) for per-species test data G under the dynamics
/// tilted by `potentials` (pass a zero set for the symmetric process).
double dynkin_martingale(const Configuration& initial, const EventLog& log,
                         const PotentialSet& g, const PotentialSet& potentials,
                         double t);

/// Carre-du-Champ of the pairing at a frozen configuration and time.
double carre_du_champ(const Configuration& config, const PotentialSet& g,
                      const PotentialSet& potentials, double t);

}  // namespace stirlab

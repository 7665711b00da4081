#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "stirlab/empirical.hpp"
#include "stirlab/girsanov.hpp"
#include "stirlab/hydro.hpp"
#include "stirlab/potential.hpp"

namespace stirlab::checks {

struct EinsteinCheck {
  double max_residual = 0.0;
  int grid = 0;
};
EinsteinCheck einstein_identity_check(int grid_per_axis = 50);

struct PathwiseCheck {
  double max_gap = 0.0;
  std::size_t paths = 0;
};
PathwiseCheck girsanov_pathwise_check(std::size_t n_sites, double t_end,
                                      std::size_t n_paths, std::uint64_t seed);

struct MeanOneCheck {
  MeanOneResult forward;  // E[Z] under the symmetric process
  double deviation_sigmas = 0.0;
};
MeanOneCheck martingale_mean_one_check(std::size_t n_sites, double t_end,
                                       std::size_t replicas, std::uint64_t seed,
                                       int threads = 1);

struct HydroTrendCheck {
  std::vector<std::size_t> sizes;
  std::vector<double> mean_l1;
  bool strictly_decreasing = false;
};
HydroTrendCheck hydro_limit_trend_check(const std::vector<std::size_t>& sizes,
                                        std::size_t replicas, double t_end,
                                        double epsilon, std::uint64_t seed,
                                        int threads = 1);

struct HeatDecayCheck {
  double measured_ratio = 0.0;
  double exact_ratio = 0.0;
  double rel_error = 0.0;
};
HeatDecayCheck heat_decay_check(std::size_t m, double t_end);

struct CollapseSolverCheck {
  double density_max_diff = 0.0;  // 2-species sum vs 1-species solve
  double i0_abs_diff = 0.0;       // quadratic form vs scalar formula
};
CollapseSolverCheck single_species_collapse_check(std::size_t m, double t_end);

struct RateRecoveryCheck {
  double target = 0.0;  // 0.5 |H*|^2 on the reference grid
  double i0_coarse = 0.0;
  double i0_fine = 0.0;
  double rel_err_coarse = 0.0;
  double rel_err_fine = 0.0;
  double lb_minus_i0_coarse = 0.0;
  double residual_coarse = 0.0;
};
RateRecoveryCheck rate_recovery_check(std::size_t m_coarse, std::size_t k_coarse,
                                      double t_end);

struct EquivalenceCheck {
  double gap10 = 0.0;
  double closed_form10 = 0.0;  // |k(k-1)/(N(N-1)) - (k/N)^2| at N=10, k=5
  double gap50 = 0.0;
  double gap200 = 0.0;
};
EquivalenceCheck equivalence_gap_check();

struct FeynmanKacEntry {
  double a = 0.0;
  double delta = 0.0;
  double lambda_max = 0.0;
  double p_hat = 0.0;
  double p_sigma = 0.0;
  double bound = 0.0;
};
struct FeynmanKacCheck {
  std::vector<FeynmanKacEntry> entries;
};
FeynmanKacCheck feynman_kac_check(std::size_t n_sites, double t_end,
                                  std::size_t replicas, std::uint64_t seed,
                                  const std::vector<std::pair<double, double>>& pairs);

struct SuperexpTrendCheck {
  std::vector<std::size_t> sizes;
  std::vector<double> p_hat;          // clamped away from zero at 1/(2R)
  std::vector<double> log_p_over_n;   // (1/N) log p_hat
  bool non_increasing = false;
};
SuperexpTrendCheck superexponential_trend_check(const std::vector<std::size_t>& sizes,
                                                double t_end, double delta,
                                                double epsilon, std::size_t replicas,
                                                std::uint64_t seed, int threads = 1);

struct ConservationCheck {
  bool counts_constant = false;
  double pde_mass_drift_per_unit_time = 0.0;
};
ConservationCheck conservation_check(std::uint64_t seed);

// shared fixtures for the checks above
ProfileGrid bench_profile(std::size_t grid_points);
PotentialSet bench_potential(double t_end, bool time_dependent);

/// Running V statistic along a simulated path (two species): block averages
/// and per-center terms are updated in place per exchange.
class VTracker {
 public:
  VTracker(const Configuration& config, const LocalObservable& phi, double epsilon);

  double value() const { return v_; }
  const Configuration& config() const { return config_; }
  void apply_event(const Event& e);

 private:
  void rebuild();
  double center_term(std::size_t c);

  Configuration config_;
  const LocalObservable* phi_;
  std::size_t n_, k_, window_;
  double inv_w_;
  std::vector<double> shifted_, sum_phi_, counts_, term_;
  std::vector<double> dens_;
  double v_ = 0.0;
  std::size_t events_since_rebuild_ = 0;
};

}  // namespace stirlab::checks

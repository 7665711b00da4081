#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stirlab/configuration.hpp"
#include "stirlab/hydro.hpp"

namespace stirlab {

/// Static cost: spatial average of the per-point multinomial relative entropy
/// sum_{a=0..n} omega_a log(omega_a / gamma_a). Returns +infinity when omega
/// puts mass where gamma has none, or when the atom flag is raised.
double static_cost(const ProfileGrid& omega, const ProfileGrid& gamma,
                   bool has_atoms = false);

/// One test functional of the variational form of the static cost:
/// sum_a <omega_a, phi_a> - int log(sum_a gamma_a exp(phi_a)). phi holds one
/// row per label 0..n on the profile grid. Bounded above by static_cost.
double static_cost_test_functional(const ProfileGrid& omega, const ProfileGrid& gamma,
                                   const std::vector<std::vector<double>>& phi);

struct MetricOptions {
  double delta_clip = 1e-6;  // density projection floor for the mobility
};

/// Weighted inner product 2 int <grad G, chi(rho) grad H> du dt. Gradients
/// are face differences on the torus grid, chi is evaluated at clipped face
/// averages, time quadrature is trapezoidal.
double inner_product(const SpaceTimeField& g, const SpaceTimeField& h,
                     const DensityTrajectory& rho, const MetricOptions& opts = {});

/// Linear hydrodynamic defect
/// l(rho; G) = <rho(T),G(T)> - <rho(0),G(0)> - int <rho, (d_t + lap) G>,
/// with central interior / one-sided end time differences and the 3-point
/// periodic Laplacian; discretely adjoint to the face-difference metric.
double linear_functional(const DensityTrajectory& rho, const SpaceTimeField& g);

struct RieszOptions {
  double delta_clip = 1e-6;
  double mean_tolerance = 1e-8;  // largest admissible RHS spatial mean
  int residual_probes = 8;
  std::uint64_t probe_seed = 2024;
};

struct RieszResult {
  SpaceTimeField h;       // zero-spatial-mean potentials per slice
  double residual = 0.0;  // max |l(rho;G) - <G,H>| over the probe batch
  double clip_magnitude = 0.0;
};

/// Recover the tilting potential slice by slice from
/// -div(2 chi(rho) grad H) = d_t rho - lap rho (periodic, zero-mean gauge).
RieszResult riesz_solve(const DensityTrajectory& rho, const RieszOptions& opts = {});

double dynamic_cost(const DensityTrajectory& rho, const SpaceTimeField& h,
                    const MetricOptions& opts = {});

struct LowerBoundResult {
  double value = 0.0;
  bool regularized = false;  // Gram matrix needed a ridge
};

/// Exact maximization of l(rho;G) - 0.5 |G|^2 over the span of the basis.
LowerBoundResult variational_lower_bound(const DensityTrajectory& rho,
                                         const std::vector<SpaceTimeField>& basis,
                                         const MetricOptions& opts = {});

/// Trigonometric test basis: per species, space modes 1..max_space_mode in
/// sin and cos, modulated by cos(pi q t / T) for q = 0..max_time_mode.
/// Ordering is nested: enlarging either cap appends elements.
std::vector<SpaceTimeField> make_trig_basis(int n_species, std::size_t m,
                                            std::size_t k_slices, double dt,
                                            int max_space_mode, int max_time_mode);

struct CollapseReport {
  double i0_vector = 0.0;  // multispecies quadratic form with equal potentials
  double i0_scalar = 0.0;  // single-species formula on the summed density
  double abs_diff = 0.0;
};

/// Compare the multispecies dynamic cost under a common potential with the
/// single-species expression int <varrho (1-varrho), (grad H)^2> dt.
CollapseReport collapse_check(const DensityTrajectory& rho,
                              const SpaceTimeField& h_common,
                              const MetricOptions& opts = {});

struct RateEvaluation {
  double h = 0.0;
  double i0 = 0.0;
  double i_total = 0.0;
  double residual = 0.0;
  double variational_lb = 0.0;
  double clip_magnitude = 0.0;
};

/// Full rate evaluation of a trajectory against an initial profile gamma.
RateEvaluation evaluate_rate(const DensityTrajectory& rho, const ProfileGrid& gamma,
                             const RieszOptions& opts = {});

}  // namespace stirlab

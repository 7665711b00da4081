#pragma once

#include <cstddef>
#include <vector>

#include "stirlab/configuration.hpp"
#include "stirlab/potential.hpp"

namespace stirlab {

/// Per-species scalar field on an M-point torus grid times K+1 uniform time
/// slices. Layout: value(k, alpha, j) with alpha in 1..n_species.
struct SpaceTimeField {
  int n_species = 0;
  std::size_t m = 0;        // spatial grid points, h = 1/m
  std::size_t k_slices = 0; // number of time slices (K+1)
  double dt = 0.0;          // slice spacing

  std::vector<double> v;

  SpaceTimeField() = default;
  SpaceTimeField(int n, std::size_t m_pts, std::size_t slices, double step)
      : n_species(n), m(m_pts), k_slices(slices), dt(step),
        v(static_cast<std::size_t>(n) * m_pts * slices, 0.0) {}

  double t_end() const { return dt * static_cast<double>(k_slices - 1); }
  std::size_t index(std::size_t k, int alpha, std::size_t j) const {
    return (k * static_cast<std::size_t>(n_species) +
            static_cast<std::size_t>(alpha - 1)) * m + j;
  }
  double value(std::size_t k, int alpha, std::size_t j) const {
    return v[index(k, alpha, j)];
  }
  double& value(std::size_t k, int alpha, std::size_t j) { return v[index(k, alpha, j)]; }
  const double* slice(std::size_t k, int alpha) const {
    return v.data() + index(k, alpha, 0);
  }
  double* slice(std::size_t k, int alpha) { return v.data() + index(k, alpha, 0); }
};

/// Sample an analytic per-species function f(alpha, u, t) onto a field grid.
SpaceTimeField sample_field(int n_species, std::size_t m, std::size_t k_slices,
                            double t_end,
                            const std::function<double(int, double, double)>& f);

/// Density trajectory: a SpaceTimeField constrained to the closed simplex at
/// every node.
class DensityTrajectory {
 public:
  DensityTrajectory() = default;
  explicit DensityTrajectory(SpaceTimeField data) : data_(std::move(data)) {}

  const SpaceTimeField& field() const { return data_; }
  SpaceTimeField& field() { return data_; }

  int n_species() const { return data_.n_species; }
  std::size_t m() const { return data_.m; }
  std::size_t k_slices() const { return data_.k_slices; }
  double dt() const { return data_.dt; }
  double t_end() const { return data_.t_end(); }
  double value(std::size_t k, int alpha, std::size_t j) const {
    return data_.value(k, alpha, j);
  }

  double spatial_mean(std::size_t k, int alpha) const;
  // largest simplex violation over all nodes (negative part or excess sum)
  double simplex_violation() const;

 private:
  SpaceTimeField data_;
};

struct SchemeParams {
  std::size_t space_cells = 64;   // M
  std::size_t time_slices = 65;   // K+1 recorded slices
  double t_end = 0.1;
  enum class Stepper { ExplicitEuler, Imex } stepper = Stepper::ExplicitEuler;
  double cfl_safety = 0.4;
};

/// n x n mobility matrix chi_{ab} = rho_a (delta_{ab} - rho_b), row-major.
std::vector<double> mobility(const std::vector<double>& rho);

/// identity diffusion matrix
std::vector<double> diffusion_matrix(int n_species);

/// multinomial free energy relative to the uniform point (log(n+1) offset)
double free_energy(const std::vector<double>& rho);

/// Hessian of the free energy: 1/rho_a on the diagonal plus 1/rho_0 everywhere.
std::vector<double> free_energy_hessian(const std::vector<double>& rho);

/// max-norm of F''(rho) chi(rho) - I
double einstein_residual(const std::vector<double>& rho);

struct CurrentSlices {
  std::vector<std::vector<double>> fick;   // per species, per grid point
  std::vector<std::vector<double>> drift;
  std::vector<std::vector<double>> total;
};

/// Fick, drift and total currents for one time slice; central differences on
/// the torus grid. rho and h_pot hold one row of M values per species.
CurrentSlices currents(const std::vector<std::vector<double>>& rho,
                       const std::vector<std::vector<double>>& h_pot);

/// Conservative finite-volume solve of the coupled drift-diffusion system
///   d_t rho_a = lap rho_a - 2 sum_{b != a} d_u (rho_a rho_b d_u H_{ab})
/// on the torus, with H_{ab} derived from the per-species potentials. Face
/// fluxes use arithmetic density averages, so species means are conserved
/// exactly. Internal steps subdivide the output step to satisfy the CFL bound
/// (explicit) and retry with halved steps on simplex violations.
DensityTrajectory solve_hydro(const ProfileGrid& gamma, const PotentialSet& potentials,
                              const SchemeParams& scheme);

}  // namespace stirlab

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "stirlab/configuration.hpp"

namespace stirlab {

/// Empirical density field: weight 1/N at x/N for every occupied site, stored
/// per species on the site grid. Smoothing produces fractional masses.
class EmpiricalField {
 public:
  EmpiricalField(int n_species, std::size_t n_sites);

  int n_species() const { return n_species_; }
  std::size_t n_sites() const { return n_; }

  double mass(int alpha, std::size_t x) const { return mass_[index(alpha, x)]; }
  void set_mass(int alpha, std::size_t x, double m) { mass_[index(alpha, x)] = m; }

  double total_mass(int alpha) const;
  // density value N * mass at x/N
  double density(int alpha, std::size_t x) const {
    return mass(alpha, x) * static_cast<double>(n_);
  }

 private:
  std::size_t index(int alpha, std::size_t x) const {
    return static_cast<std::size_t>(alpha - 1) * n_ + x;
  }

  int n_species_;
  std::size_t n_;
  std::vector<double> mass_;
};

EmpiricalField empirical_density(const Configuration& config);

/// Pairing sum_alpha sum_x G_alpha(x/N) * mass_alpha(x) with G sampled on the
/// site grid (one row of N values per species).
double pair_field(const EmpiricalField& field,
                  const std::vector<std::vector<double>>& g);

/// Fraction of each species label in the periodic window of 2k+1 sites
/// centered at x. Index 0 of the result is species 1.
std::vector<double> block_average(const Configuration& config, std::size_t x,
                                  std::size_t k);

/// Local observable on ell consecutive sites, stored as an explicit lookup
/// table over all (n+1)^ell patterns. Pattern digits are site labels, least
/// significant digit first.
class LocalObservable {
 public:
  LocalObservable(int n_species, int support, std::vector<double> table);

  static LocalObservable from_function(
      int n_species, int support,
      const std::function<double(const std::vector<std::uint8_t>&)>& phi);
  // indicator that sites offset..offset+labels-1 carry the given labels
  static LocalObservable indicator(int n_species,
                                   const std::vector<std::uint8_t>& labels);

  int n_species() const { return n_species_; }
  int support() const { return ell_; }
  std::size_t patterns() const { return table_.size(); }
  double value(std::size_t pattern) const { return table_[pattern]; }

  // phi applied to the window starting at site y (periodic)
  double shifted(const Configuration& config, std::size_t y) const;

  void decode(std::size_t pattern, std::vector<std::uint8_t>& labels) const;

 private:
  int n_species_;
  int ell_;
  std::vector<double> table_;
};

/// Expectation of phi under the product multinomial with constant densities p
/// (p has one entry per species; the hole carries the remainder).
double tilde_phi(const LocalObservable& phi, const std::vector<double>& p);

/// V statistic: sum over centers x of |window average of shifted phi minus
/// tilde_phi at the window densities|, with windows of half-width floor(N*eps).
double v_statistic(const Configuration& config, const LocalObservable& phi,
                   double epsilon);

/// Periodic moving average over 2*floor(N*eps)+1 sites; preserves per-species
/// total mass exactly.
EmpiricalField smooth(const EmpiricalField& field, double epsilon);

}  // namespace stirlab

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace stirlab {

/// Occupancy of the discrete torus: one label per site, label 0 is the hole,
/// labels 1..n_species are particles. Per-label counts are kept alongside.
class Configuration {
 public:
  Configuration(int n_species, std::vector<std::uint8_t> sites);

  static Configuration constant(int n_species, std::size_t n_sites, std::uint8_t label);

  int n_species() const { return n_species_; }
  std::size_t n_sites() const { return sites_.size(); }
  std::uint8_t label(std::size_t x) const { return sites_[x]; }
  const std::vector<std::uint8_t>& sites() const { return sites_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }

  std::size_t next_site(std::size_t x) const { return x + 1 == sites_.size() ? 0 : x + 1; }

  // Swap occupancies across bond (x, x+1) when they match the declared pair;
  // otherwise the move is the identity. Counts are unchanged either way.
  void exchange(std::size_t x, std::uint8_t alpha, std::uint8_t beta);

  bool counts_consistent() const;

 private:
  int n_species_;
  std::vector<std::uint8_t> sites_;
  std::vector<std::int64_t> counts_;
};

Configuration apply_exchange(Configuration config, std::size_t x, std::uint8_t alpha,
                             std::uint8_t beta);

/// Density profiles gamma_alpha sampled on M torus grid points. Values live in
/// [0,1] with sum_alpha gamma_alpha <= 1 at every point.
class ProfileGrid {
 public:
  ProfileGrid(int n_species, std::size_t grid_points);

  static ProfileGrid constant(int n_species, const std::vector<double>& levels,
                              std::size_t grid_points);

  int n_species() const { return n_species_; }
  std::size_t grid_points() const { return m_; }

  double value(int alpha, std::size_t j) const { return values_[index(alpha, j)]; }
  void set(int alpha, std::size_t j, double v) { values_[index(alpha, j)] = v; }

  // nearest-grid-point lookup at u = x/N
  double at_site(int alpha, std::size_t x, std::size_t n_sites) const;
  double hole_at_site(std::size_t x, std::size_t n_sites) const;

  double mean(int alpha) const;

  void validate() const;

 private:
  std::size_t index(int alpha, std::size_t j) const {
    return static_cast<std::size_t>(alpha - 1) * m_ + j;
  }

  int n_species_;
  std::size_t m_;
  std::vector<double> values_;
};

/// Draw a product-multinomial configuration: site x is species alpha with
/// probability gamma_alpha(x/N), a hole otherwise.
Configuration sample_product_multinomial(const ProfileGrid& profile, std::size_t n_sites,
                                         std::uint64_t seed);

}  // namespace stirlab

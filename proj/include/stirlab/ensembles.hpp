#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stirlab/configuration.hpp"
#include "stirlab/empirical.hpp"
#include "stirlab/potential.hpp"

namespace stirlab {

/// Canonical shell: fixed particle counts k = (k_1,...,k_n) on N sites.
struct CanonicalSpec {
  std::size_t n_sites = 0;
  std::vector<std::int64_t> k;

  std::int64_t total() const;
  bool admissible() const { return total() <= static_cast<std::int64_t>(n_sites); }
};

/// log of the multinomial coefficient n! / (k_1! ... k_r! (n - sum k)!)
double log_multinomial(std::size_t n, const std::vector<std::int64_t>& k);

/// Uniform probability of one configuration on the canonical shell; zero when
/// the counts do not match.
double canonical_probability(const CanonicalSpec& spec, const Configuration& config);

/// Probability that a fixed window of ell sites shows a given species count
/// vector m under the canonical measure (hypergeometric ratio).
double local_pattern_probability(std::size_t ell, const std::vector<std::int64_t>& m,
                                 const CanonicalSpec& spec);

/// Exact canonical expectation of a local observable (window sums over
/// pattern probabilities; no state enumeration).
double canonical_local_expectation(const LocalObservable& phi, const CanonicalSpec& spec);

/// sup over admissible counts of |canonical expectation - grand-canonical
/// expectation at density k/N|.
double equivalence_gap(const LocalObservable& phi, std::size_t n_sites);

// --- full state-space enumeration (small N) ---

std::size_t state_count(std::size_t n_sites, int n_species);
void decode_state(std::size_t code, std::size_t n_sites, int n_species,
                  std::vector<std::uint8_t>& sites);
std::size_t encode_state(const std::vector<std::uint8_t>& sites, int n_species);

/// Probability density relative to the uniform reference measure on all
/// (n+1)^N configurations: f >= 0 with mean 1.
class StateDensity {
 public:
  StateDensity(std::size_t n_sites, int n_species, std::vector<double> f);

  std::size_t n_sites() const { return n_sites_; }
  int n_species() const { return n_species_; }
  const std::vector<double>& values() const { return f_; }
  double value(std::size_t code) const { return f_[code]; }

 private:
  std::size_t n_sites_;
  int n_species_;
  std::vector<double> f_;
};

/// Dirichlet form (3^-N / 2) sum_eta sum_bonds (sqrt f(swapped) - sqrt f)^2.
double dirichlet_form(const StateDensity& f);

/// Dense generator matrix L(eta, xi) with O(1) rates (no N^2 clock); pass a
/// potential set to tilt the rates at a fixed time.
std::vector<double> generator_dense(std::size_t n_sites, int n_species,
                                    const PotentialSet* potentials, double t);

struct PowerIterOptions {
  std::size_t max_iterations = 100000;
  double tolerance = 1e-11;
};

/// Largest eigenvalue of K = N^2 L + a V (symmetric w.r.t. the uniform
/// reference measure) by shifted power iteration on the full state space.
/// v_by_state holds V(eta) indexed by state code.
double feynman_kac_lambda(double a, const std::vector<double>& v_by_state,
                          std::size_t n_sites, int n_species,
                          const PowerIterOptions& opts = {});

/// sup over shells of E | block-averaged phi - tilde_phi(block densities) |
/// on the periodic block of 2k+1 sites, by exact enumeration.
double one_block_gap(const LocalObservable& phi, int k);

/// sup over joint counts of E || block densities difference ||_2 under the
/// uniform measure on the paired canonical shell (two species).
double two_block_gap(int k);

struct BlockGaps {
  double one_block = 0.0;
  double two_block = 0.0;
};

BlockGaps block_gap_statistics(const LocalObservable& phi, int k);

}  // namespace stirlab

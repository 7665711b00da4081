#include "stirlab/configuration.hpp"

#include <cmath>
#include <stdexcept>

#include "stirlab/rng.hpp"

namespace stirlab {

Configuration::Configuration(int n_species, std::vector<std::uint8_t> sites)
    : n_species_(n_species), sites_(std::move(sites)), counts_(n_species + 1, 0) {
  if (n_species < 1) throw std::invalid_argument("n_species must be >= 1");
  if (sites_.size() < 2) throw std::invalid_argument("need at least 2 sites");
  for (std::uint8_t s : sites_) {
    if (s > n_species) throw std::invalid_argument("site label out of range");
    ++counts_[s];
  }
}

Configuration Configuration::constant(int n_species, std::size_t n_sites,
                                      std::uint8_t label) {
  return Configuration(n_species, std::vector<std::uint8_t>(n_sites, label));
}

void Configuration::exchange(std::size_t x, std::uint8_t alpha, std::uint8_t beta) {
  std::size_t y = next_site(x);
  if (sites_[x] == alpha && sites_[y] == beta) {
    sites_[x] = beta;
    sites_[y] = alpha;
  }
}

bool Configuration::counts_consistent() const {
  std::vector<std::int64_t> fresh(n_species_ + 1, 0);
  for (std::uint8_t s : sites_) ++fresh[s];
  return fresh == counts_;
}

Configuration apply_exchange(Configuration config, std::size_t x, std::uint8_t alpha,
                             std::uint8_t beta) {
  config.exchange(x, alpha, beta);
  return config;
}

ProfileGrid::ProfileGrid(int n_species, std::size_t grid_points)
    : n_species_(n_species), m_(grid_points),
      values_(static_cast<std::size_t>(n_species) * grid_points, 0.0) {
  if (n_species < 1) throw std::invalid_argument("n_species must be >= 1");
  if (grid_points < 1) throw std::invalid_argument("profile grid needs >= 1 point");
}

ProfileGrid ProfileGrid::constant(int n_species, const std::vector<double>& levels,
                                  std::size_t grid_points) {
  if (levels.size() != static_cast<std::size_t>(n_species))
    throw std::invalid_argument("one level per species required");
  ProfileGrid g(n_species, grid_points);
  for (int a = 1; a <= n_species; ++a)
    for (std::size_t j = 0; j < grid_points; ++j) g.set(a, j, levels[a - 1]);
  return g;
}

double ProfileGrid::at_site(int alpha, std::size_t x, std::size_t n_sites) const {
  double u = static_cast<double>(x) / static_cast<double>(n_sites);
  std::size_t j = static_cast<std::size_t>(std::llround(u * static_cast<double>(m_))) % m_;
  return value(alpha, j);
}

double ProfileGrid::hole_at_site(std::size_t x, std::size_t n_sites) const {
  double s = 0.0;
  for (int a = 1; a <= n_species_; ++a) s += at_site(a, x, n_sites);
  return 1.0 - s;
}

double ProfileGrid::mean(int alpha) const {
  double s = 0.0;
  for (std::size_t j = 0; j < m_; ++j) s += value(alpha, j);
  return s / static_cast<double>(m_);
}

void ProfileGrid::validate() const {
  for (std::size_t j = 0; j < m_; ++j) {
    double sum = 0.0;
    for (int a = 1; a <= n_species_; ++a) {
      double v = value(a, j);
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("profile value outside [0,1]");
      sum += v;
    }
    if (sum > 1.0 + 1e-15)
      throw std::invalid_argument("profile species sum exceeds 1");
  }
}

Configuration sample_product_multinomial(const ProfileGrid& profile, std::size_t n_sites,
                                         std::uint64_t seed) {
  profile.validate();
  int n = profile.n_species();
  std::vector<std::uint8_t> sites(n_sites, 0);
  CounterRng rng(CounterRng::key_for(seed, 0, 0x73616d70ull));
  for (std::size_t x = 0; x < n_sites; ++x) {
    double u = rng.next_uniform();
    double acc = 0.0;
    std::uint8_t label = 0;
    for (int a = 1; a <= n; ++a) {
      acc += profile.at_site(a, x, n_sites);
      if (u < acc) {
        label = static_cast<std::uint8_t>(a);
        break;
      }
    }
    sites[x] = label;
  }
  return Configuration(n, std::move(sites));
}

}  // namespace stirlab

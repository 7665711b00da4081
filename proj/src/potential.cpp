#include "stirlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stirlab {

PotentialSet::PotentialSet(int n_species, std::size_t space_points,
                           std::size_t time_points, double t_max)
    : n_species_(n_species), m_u_(space_points), m_t_(time_points), t_max_(t_max),
      values_(static_cast<std::size_t>(n_species) * space_points * time_points, 0.0) {
  if (n_species < 1) throw std::invalid_argument("n_species must be >= 1");
  if (space_points < 1 || time_points < 1)
    throw std::invalid_argument("potential grid needs >= 1 point per axis");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
}

PotentialSet PotentialSet::zero(int n_species, double t_max) {
  return PotentialSet(n_species, 1, 1, t_max);
}

PotentialSet PotentialSet::sample(int n_species, std::size_t space_points,
                                  std::size_t time_points, double t_max,
                                  const std::function<double(int, double, double)>& h) {
  PotentialSet p(n_species, space_points, time_points, t_max);
  for (int a = 1; a <= n_species; ++a)
    for (std::size_t k = 0; k < time_points; ++k) {
      double t = time_points > 1
                     ? t_max * static_cast<double>(k) / static_cast<double>(time_points - 1)
                     : 0.0;
      for (std::size_t j = 0; j < space_points; ++j) {
        double u = static_cast<double>(j) / static_cast<double>(space_points);
        p.set_node(a, k, j, h(a, u, t));
      }
    }
  return p;
}

bool PotentialSet::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double PotentialSet::node_at_time(int alpha, double t, std::size_t j) const {
  if (m_t_ == 1) return node(alpha, 0, j);
  double s = std::clamp(t, 0.0, t_max_) / time_step();
  auto k = static_cast<std::size_t>(s);
  if (k >= m_t_ - 1) return node(alpha, m_t_ - 1, j);
  double w = s - static_cast<double>(k);
  return (1.0 - w) * node(alpha, k, j) + w * node(alpha, k + 1, j);
}

double PotentialSet::species(int alpha, double u, double t) const {
  if (alpha == 0) return 0.0;
  u -= std::floor(u);
  double s = u * static_cast<double>(m_u_);
  auto j = static_cast<std::size_t>(s);
  if (j >= m_u_) j = m_u_ - 1;
  double w = s - static_cast<double>(j);
  std::size_t jn = (j + 1 == m_u_) ? 0 : j + 1;
  return (1.0 - w) * node_at_time(alpha, t, j) + w * node_at_time(alpha, t, jn);
}

double PotentialSet::species_grad_n(int alpha, std::size_t x, std::size_t n_sites,
                                    double t) const {
  if (alpha == 0) return 0.0;
  double n = static_cast<double>(n_sites);
  std::size_t xn = (x + 1 == n_sites) ? 0 : x + 1;
  return species(alpha, static_cast<double>(xn) / n, t) -
         species(alpha, static_cast<double>(x) / n, t);
}

double PotentialSet::species_dt(int alpha, double u, double t) const {
  if (alpha == 0 || m_t_ == 1) return 0.0;
  double dt = time_step();
  double s = std::clamp(t, 0.0, t_max_) / dt;
  auto k = static_cast<std::size_t>(s);
  if (k >= m_t_ - 1) k = m_t_ - 2;
  u -= std::floor(u);
  double su = u * static_cast<double>(m_u_);
  auto j = static_cast<std::size_t>(su);
  if (j >= m_u_) j = m_u_ - 1;
  double w = su - static_cast<double>(j);
  std::size_t jn = (j + 1 == m_u_) ? 0 : j + 1;
  double lo = (1.0 - w) * node(alpha, k, j) + w * node(alpha, k, jn);
  double hi = (1.0 - w) * node(alpha, k + 1, j) + w * node(alpha, k + 1, jn);
  return (hi - lo) / dt;
}

double PotentialSet::max_abs_pair_grad_n(std::size_t n_sites, double t0, double t1) const {
  // pair gradients are differences of species gradients (species 0 included
  // with gradient 0), so the largest |pair| is max(g,0) - min(g,0) per bond
  double worst = 0.0;
  std::vector<double> times = time_breakpoints(t0, t1);
  times.push_back(t0);
  times.push_back(t1);
  for (double t : times) {
    for (std::size_t x = 0; x < n_sites; ++x) {
      double gmax = 0.0, gmin = 0.0;
      for (int a = 1; a <= n_species_; ++a) {
        double g = species_grad_n(a, x, n_sites, t);
        gmax = std::max(gmax, g);
        gmin = std::min(gmin, g);
      }
      worst = std::max(worst, gmax - gmin);
    }
  }
  return worst;
}

std::vector<double> PotentialSet::time_breakpoints(double t0, double t1) const {
  std::vector<double> out;
  if (m_t_ <= 1) return out;
  double dt = time_step();
  for (std::size_t k = 1; k + 1 < m_t_ + 1; ++k) {
    double t = dt * static_cast<double>(k);
    if (t > t0 && t < t1) out.push_back(t);
    if (t >= t1) break;
  }
  return out;
}

}  // namespace stirlab

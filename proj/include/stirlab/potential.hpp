#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace stirlab {

/// Per-species space-time potentials H_alpha sampled on a torus x [0,t_max]
/// grid, evaluated by bilinear interpolation (periodic in u, clamped in t).
/// Pair potentials are derived, never stored:
///   H_{ab} = H_a - H_b,  H_{a0} = H_a,  H_{0a} = -H_a,
/// which makes H_{ba} = -H_{ab} exact by construction.
class PotentialSet {
 public:
  PotentialSet(int n_species, std::size_t space_points, std::size_t time_points,
               double t_max);

  static PotentialSet zero(int n_species, double t_max = 1.0);
  static PotentialSet sample(int n_species, std::size_t space_points,
                             std::size_t time_points, double t_max,
                             const std::function<double(int, double, double)>& h);

  int n_species() const { return n_species_; }
  std::size_t space_points() const { return m_u_; }
  std::size_t time_points() const { return m_t_; }
  double t_max() const { return t_max_; }
  bool is_zero() const;

  double node(int alpha, std::size_t k, std::size_t j) const {
    return values_[index(alpha, k, j)];
  }
  void set_node(int alpha, std::size_t k, std::size_t j, double v) {
    values_[index(alpha, k, j)] = v;
  }

  // H_alpha(u, t); alpha = 0 is the hole and evaluates to 0.
  double species(int alpha, double u, double t) const;
  double pair(int alpha, int beta, double u, double t) const {
    return species(alpha, u, t) - species(beta, u, t);
  }

  // forward difference H_alpha((x+1)/N, t) - H_alpha(x/N, t)
  double species_grad_n(int alpha, std::size_t x, std::size_t n_sites, double t) const;
  double pair_grad_n(int alpha, int beta, std::size_t x, std::size_t n_sites,
                     double t) const {
    return species_grad_n(alpha, x, n_sites, t) - species_grad_n(beta, x, n_sites, t);
  }

  // time derivative of the interpolant (piecewise constant in t)
  double species_dt(int alpha, double u, double t) const;

  // Majorant for exp(pair_grad_n) over all bonds, all ordered pairs and
  // t in [t0, t1]. The interpolant is linear in t between grid times, so the
  // maximum over a time cell is attained at its ends.
  double max_abs_pair_grad_n(std::size_t n_sites, double t0, double t1) const;

  // grid times that intersect (t0, t1), used as quadrature/thinning breakpoints
  std::vector<double> time_breakpoints(double t0, double t1) const;

  double time_step() const { return m_t_ > 1 ? t_max_ / static_cast<double>(m_t_ - 1) : t_max_; }

 private:
  std::size_t index(int alpha, std::size_t k, std::size_t j) const {
    return (static_cast<std::size_t>(alpha - 1) * m_t_ + k) * m_u_ + j;
  }
  double node_at_time(int alpha, double t, std::size_t j) const;

  int n_species_;
  std::size_t m_u_, m_t_;
  double t_max_;
  std::vector<double> values_;  // [alpha-1][k][j]
};

}  // namespace stirlab

#include "stirlab/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stirlab/linalg.hpp"

namespace stirlab {

SpaceTimeField sample_field(int n_species, std::size_t m, std::size_t k_slices,
                            double t_end,
                            const std::function<double(int, double, double)>& f) {
  if (k_slices < 2) throw std::invalid_argument("need at least 2 time slices");
  SpaceTimeField field(n_species, m, k_slices,
                       t_end / static_cast<double>(k_slices - 1));
  for (std::size_t k = 0; k < k_slices; ++k) {
    double t = field.dt * static_cast<double>(k);
    for (int a = 1; a <= n_species; ++a)
      for (std::size_t j = 0; j < m; ++j)
        field.value(k, a, j) = f(a, static_cast<double>(j) / static_cast<double>(m), t);
  }
  return field;
}

double DensityTrajectory::spatial_mean(std::size_t k, int alpha) const {
  const double* s = data_.slice(k, alpha);
  double sum = 0.0;
  for (std::size_t j = 0; j < data_.m; ++j) sum += s[j];
  return sum / static_cast<double>(data_.m);
}

double DensityTrajectory::simplex_violation() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < data_.k_slices; ++k)
    for (std::size_t j = 0; j < data_.m; ++j) {
      double sum = 0.0;
      for (int a = 1; a <= data_.n_species; ++a) {
        double v = data_.value(k, a, j);
        worst = std::max(worst, -v);
        sum += v;
      }
      worst = std::max(worst, sum - 1.0);
    }
  return worst;
}

std::vector<double> mobility(const std::vector<double>& rho) {
  int n = static_cast<int>(rho.size());
  double sum = 0.0;
  for (double r : rho) {
    if (r < -1e-15 || r > 1.0 + 1e-15)
      throw std::invalid_argument("density outside [0,1]");
    sum += r;
  }
  if (sum > 1.0 + 1e-12) throw std::invalid_argument("densities leave the simplex");
  std::vector<double> chi(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      chi[a * n + b] = rho[a] * ((a == b ? 1.0 : 0.0) - rho[b]);
  return chi;
}

std::vector<double> diffusion_matrix(int n_species) {
  std::vector<double> d(n_species * n_species, 0.0);
  for (int a = 0; a < n_species; ++a) d[a * n_species + a] = 1.0;
  return d;
}

static double interior_hole(const std::vector<double>& rho) {
  double hole = 1.0;
  for (double r : rho) {
    if (!(r > 0.0)) throw std::invalid_argument("density must be strictly interior");
    hole -= r;
  }
  if (!(hole > 0.0)) throw std::invalid_argument("density must be strictly interior");
  return hole;
}

double free_energy(const std::vector<double>& rho) {
  double hole = interior_hole(rho);
  double f = hole * std::log(hole) + std::log(static_cast<double>(rho.size()) + 1.0);
  for (double r : rho) f += r * std::log(r);
  return f;
}

std::vector<double> free_energy_hessian(const std::vector<double>& rho) {
  double hole = interior_hole(rho);
  int n = static_cast<int>(rho.size());
  std::vector<double> h(n * n, 1.0 / hole);
  for (int a = 0; a < n; ++a) h[a * n + a] += 1.0 / rho[a];
  return h;
}

double einstein_residual(const std::vector<double>& rho) {
  int n = static_cast<int>(rho.size());
  std::vector<double> h = free_energy_hessian(rho);
  std::vector<double> chi = mobility(rho);
  std::vector<double> prod(n * n);
  smallmat::multiply(h.data(), chi.data(), prod.data(), n);
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      worst = std::max(worst, std::abs(prod[a * n + b] - (a == b ? 1.0 : 0.0)));
  return worst;
}

CurrentSlices currents(const std::vector<std::vector<double>>& rho,
                       const std::vector<std::vector<double>>& h_pot) {
  std::size_t n = rho.size();
  if (h_pot.size() != n) throw std::invalid_argument("species count mismatch");
  if (n == 0) throw std::invalid_argument("no species");
  std::size_t m = rho[0].size();
  for (const auto& row : rho)
    if (row.size() != m) throw std::invalid_argument("grid mismatch");
  for (const auto& row : h_pot)
    if (row.size() != m) throw std::invalid_argument("grid mismatch");

  double h = 1.0 / static_cast<double>(m);
  auto ddu = [&](const std::vector<double>& f, std::size_t j) {
    std::size_t jp = (j + 1) % m, jm = (j + m - 1) % m;
    return (f[jp] - f[jm]) / (2.0 * h);
  };

  CurrentSlices out;
  out.fick.assign(n, std::vector<double>(m, 0.0));
  out.drift.assign(n, std::vector<double>(m, 0.0));
  out.total.assign(n, std::vector<double>(m, 0.0));
  std::vector<double> point(n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t a = 0; a < n; ++a) point[a] = rho[a][j];
    std::vector<double> chi = mobility(point);
    for (std::size_t a = 0; a < n; ++a) {
      out.fick[a][j] = -ddu(rho[a], j);
      double drift = 0.0;
      for (std::size_t b = 0; b < n; ++b) drift += chi[a * n + b] * ddu(h_pot[b], j);
      out.drift[a][j] = 2.0 * drift;
      out.total[a][j] = out.fick[a][j] + out.drift[a][j];
    }
  }
  return out;
}

namespace {

class FvStepper {
 public:
  FvStepper(int n_species, std::size_t m, const PotentialSet& pot,
            SchemeParams::Stepper stepper)
      : n_(n_species), m_(m), h_(1.0 / static_cast<double>(m)), pot_(&pot),
        stepper_(stepper), hval_(static_cast<std::size_t>(n_species) * m),
        flux_(static_cast<std::size_t>(n_species) * m) {}

  // one step of size dt from time t; returns false on a simplex violation
  bool step(std::vector<double>& rho, double t, double dt) {
    // H_alpha at cell centers for this time
    for (int a = 1; a <= n_; ++a)
      for (std::size_t j = 0; j < m_; ++j)
        hval_[(a - 1) * m_ + j] =
            pot_->species(a, static_cast<double>(j) / static_cast<double>(m_), t);

    // face fluxes at j+1/2; drift flux for species a is 2 rb_a (g_a - S) with
    // g the face differences of H and S = sum_b rb_b g_b (hole gradient is 0)
    for (std::size_t j = 0; j < m_; ++j) {
      std::size_t jp = (j + 1) % m_;
      double s = 0.0;
      for (int a = 1; a <= n_; ++a) {
        double rb = 0.5 * (rho[(a - 1) * m_ + j] + rho[(a - 1) * m_ + jp]);
        double g = (hval_[(a - 1) * m_ + jp] - hval_[(a - 1) * m_ + j]) / h_;
        face_rb_[a - 1] = rb;
        face_g_[a - 1] = g;
        s += rb * g;
      }
      for (int a = 1; a <= n_; ++a) {
        double diffusive =
            -(rho[(a - 1) * m_ + jp] - rho[(a - 1) * m_ + j]) / h_;
        double drift = 2.0 * face_rb_[a - 1] * (face_g_[a - 1] - s);
        flux_[(a - 1) * m_ + j] = diffusive + drift;
      }
    }

    double lam = dt / h_;
    if (stepper_ == SchemeParams::Stepper::ExplicitEuler) {
      for (int a = 1; a <= n_; ++a)
        for (std::size_t j = 0; j < m_; ++j) {
          std::size_t jm = (j + m_ - 1) % m_;
          rho[(a - 1) * m_ + j] -=
              lam * (flux_[(a - 1) * m_ + j] - flux_[(a - 1) * m_ + jm]);
        }
    } else {
      // implicit diffusion, explicit drift: here flux_ carries both, so add
      // back the explicit diffusion part and solve (I - dt lap) rho = rhs
      double mu = dt / (h_ * h_);
      std::vector<double> rhs(m_);
      for (int a = 1; a <= n_; ++a) {
        double* r = rho.data() + (a - 1) * m_;
        for (std::size_t j = 0; j < m_; ++j) {
          std::size_t jm = (j + m_ - 1) % m_;
          std::size_t jp = (j + 1) % m_;
          double drift_div =
              (flux_[(a - 1) * m_ + j] - flux_[(a - 1) * m_ + jm]) / h_ +
              (r[jp] - 2.0 * r[j] + r[jm]) / (h_ * h_);
          rhs[j] = r[j] - dt * drift_div;
        }
        std::vector<double> next =
            cyclic_tridiagonal_solve(-mu, 1.0 + 2.0 * mu, -mu, rhs);
        std::copy(next.begin(), next.end(), r);
      }
    }

    return violation(rho) <= 1e-8;
  }

  double violation(const std::vector<double>& rho) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      double sum = 0.0;
      for (int a = 1; a <= n_; ++a) {
        double v = rho[(a - 1) * m_ + j];
        worst = std::max(worst, -v);
        sum += v;
      }
      worst = std::max(worst, sum - 1.0);
    }
    return worst;
  }

 private:
  int n_;
  std::size_t m_;
  double h_;
  const PotentialSet* pot_;
  SchemeParams::Stepper stepper_;
  std::vector<double> hval_, flux_;
  double face_rb_[16] = {0.0};
  double face_g_[16] = {0.0};
};

// advance with halving on rejection, at most `depth` levels deep
void advance(FvStepper& stepper, std::vector<double>& rho, double t, double dt,
             int depth) {
  std::vector<double> saved = rho;
  if (stepper.step(rho, t, dt)) return;
  if (depth >= 40)
    throw std::runtime_error("hydro step rejected after 40 halvings");
  rho = saved;
  advance(stepper, rho, t, 0.5 * dt, depth + 1);
  advance(stepper, rho, t + 0.5 * dt, 0.5 * dt, depth + 1);
}

}  // namespace

DensityTrajectory solve_hydro(const ProfileGrid& gamma, const PotentialSet& potentials,
                              const SchemeParams& scheme) {
  gamma.validate();
  if (scheme.time_slices < 2) throw std::invalid_argument("need at least 2 time slices");
  if (!(scheme.t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  int n = gamma.n_species();
  if (n > 16) throw std::invalid_argument("at most 16 species supported");
  std::size_t m = scheme.space_cells;
  std::size_t slices = scheme.time_slices;
  double dt_out = scheme.t_end / static_cast<double>(slices - 1);
  double h = 1.0 / static_cast<double>(m);

  std::size_t n_sub = 1;
  if (scheme.stepper == SchemeParams::Stepper::ExplicitEuler) {
    double dt_stable = scheme.cfl_safety * h * h / 2.0;
    n_sub = static_cast<std::size_t>(std::ceil(dt_out / dt_stable));
  }
  double dt_sub = dt_out / static_cast<double>(n_sub);

  SpaceTimeField out(n, m, slices, dt_out);
  std::vector<double> rho(static_cast<std::size_t>(n) * m);
  for (int a = 1; a <= n; ++a)
    for (std::size_t j = 0; j < m; ++j) rho[(a - 1) * m + j] = gamma.at_site(a, j, m);

  FvStepper stepper(n, m, potentials, scheme.stepper);
  for (int a = 1; a <= n; ++a)
    std::copy(rho.begin() + (a - 1) * m, rho.begin() + a * m, out.slice(0, a));

  for (std::size_t k = 1; k < slices; ++k) {
    double t0 = dt_out * static_cast<double>(k - 1);
    for (std::size_t s = 0; s < n_sub; ++s)
      advance(stepper, rho, t0 + dt_sub * static_cast<double>(s), dt_sub, 0);
    for (int a = 1; a <= n; ++a)
      std::copy(rho.begin() + (a - 1) * m, rho.begin() + a * m, out.slice(k, a));
  }

  return DensityTrajectory(std::move(out));
}

}  // namespace stirlab

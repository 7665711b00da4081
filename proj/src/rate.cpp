#include "stirlab/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stirlab/linalg.hpp"
#include "stirlab/rng.hpp"

namespace stirlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_grids(const SpaceTimeField& a, const DensityTrajectory& rho) {
  if (a.n_species != rho.n_species() || a.m != rho.m() ||
      a.k_slices != rho.k_slices() || std::abs(a.dt - rho.dt()) > 1e-14 * rho.dt())
    throw std::invalid_argument("field grid does not match the trajectory");
}

// clipped face densities between cells j and j+1 of slice k
void face_densities(const DensityTrajectory& rho, std::size_t k, std::size_t j,
                    double delta, std::vector<double>& out, double& clip) {
  int n = rho.n_species();
  std::size_t jp = (j + 1) % rho.m();
  double sum = 0.0;
  for (int a = 1; a <= n; ++a) {
    double v = 0.5 * (rho.value(k, a, j) + rho.value(k, a, jp));
    double c = std::clamp(v, delta, 1.0 - delta);
    clip = std::max(clip, std::abs(c - v));
    out[a - 1] = c;
    sum += c;
  }
  if (sum > 1.0 - delta) {
    double scale = (1.0 - delta) / sum;
    for (int a = 0; a < n; ++a) {
      clip = std::max(clip, out[a] * (1.0 - scale));
      out[a] *= scale;
    }
  }
}

double trapezoid_weight(std::size_t k, std::size_t slices, double dt) {
  return (k == 0 || k + 1 == slices) ? 0.5 * dt : dt;
}

}  // namespace

double static_cost(const ProfileGrid& omega, const ProfileGrid& gamma, bool has_atoms) {
  if (omega.n_species() != gamma.n_species())
    throw std::invalid_argument("species count mismatch");
  if (has_atoms) return std::numeric_limits<double>::infinity();
  omega.validate();
  gamma.validate();
  int n = omega.n_species();
  std::size_t m = omega.grid_points();
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double omega_hole = 1.0, gamma_hole = 1.0;
    for (int a = 1; a <= n; ++a) {
      double w = omega.value(a, j);
      double g = gamma.at_site(a, j, m);
      omega_hole -= w;
      gamma_hole -= g;
      if (w > 0.0) {
        if (g <= 0.0) return std::numeric_limits<double>::infinity();
        acc += w * std::log(w / g);
      }
    }
    if (omega_hole > 0.0) {
      if (gamma_hole <= 0.0) return std::numeric_limits<double>::infinity();
      acc += omega_hole * std::log(omega_hole / gamma_hole);
    }
  }
  return acc / static_cast<double>(m);
}

double static_cost_test_functional(const ProfileGrid& omega, const ProfileGrid& gamma,
                                   const std::vector<std::vector<double>>& phi) {
  int n = omega.n_species();
  std::size_t m = omega.grid_points();
  if (phi.size() != static_cast<std::size_t>(n + 1))
    throw std::invalid_argument("one test row per label 0..n required");
  for (const auto& row : phi)
    if (row.size() != m) throw std::invalid_argument("test grid mismatch");
  double acc = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double omega_hole = 1.0, log_arg = 0.0;
    for (int a = 1; a <= n; ++a) {
      double w = omega.value(a, j);
      omega_hole -= w;
      acc += w * phi[a][j];
      log_arg += gamma.at_site(a, j, m) * std::exp(phi[a][j]);
    }
    acc += omega_hole * phi[0][j];
    log_arg += gamma.hole_at_site(j, m) * std::exp(phi[0][j]);
    acc -= std::log(log_arg);
  }
  return acc / static_cast<double>(m);
}

double inner_product(const SpaceTimeField& g, const SpaceTimeField& h,
                     const DensityTrajectory& rho, const MetricOptions& opts) {
  check_grids(g, rho);
  check_grids(h, rho);
  int n = rho.n_species();
  std::size_t m = rho.m();
  double spacing = 1.0 / static_cast<double>(m);
  std::vector<double> face(n), chi(n * n), dg(n), dh(n);
  double clip = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < rho.k_slices(); ++k) {
    double slice_acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      std::size_t jp = (j + 1) % m;
      face_densities(rho, k, j, opts.delta_clip, face, clip);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          chi[a * n + b] = face[a] * ((a == b ? 1.0 : 0.0) - face[b]);
      for (int a = 1; a <= n; ++a) {
        dg[a - 1] = (g.value(k, a, jp) - g.value(k, a, j)) / spacing;
        dh[a - 1] = (h.value(k, a, jp) - h.value(k, a, j)) / spacing;
      }
      double q = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) q += dg[a] * chi[a * n + b] * dh[b];
      slice_acc += q;
    }
    total += trapezoid_weight(k, rho.k_slices(), rho.dt()) * 2.0 * spacing * slice_acc;
  }
  return total;
}

namespace {

double spatial_pairing(const DensityTrajectory& rho, const SpaceTimeField& g,
                       std::size_t k) {
  double acc = 0.0;
  for (int a = 1; a <= rho.n_species(); ++a)
    for (std::size_t j = 0; j < rho.m(); ++j)
      acc += rho.value(k, a, j) * g.value(k, a, j);
  return acc / static_cast<double>(rho.m());
}

// central interior, one-sided ends
double time_derivative(const SpaceTimeField& f, std::size_t k, int a, std::size_t j) {
  std::size_t last = f.k_slices - 1;
  if (k == 0) return (f.value(1, a, j) - f.value(0, a, j)) / f.dt;
  if (k == last) return (f.value(last, a, j) - f.value(last - 1, a, j)) / f.dt;
  return (f.value(k + 1, a, j) - f.value(k - 1, a, j)) / (2.0 * f.dt);
}

double laplacian(const SpaceTimeField& f, std::size_t k, int a, std::size_t j) {
  std::size_t m = f.m;
  double h = 1.0 / static_cast<double>(m);
  std::size_t jp = (j + 1) % m, jm = (j + m - 1) % m;
  return (f.value(k, a, jp) - 2.0 * f.value(k, a, j) + f.value(k, a, jm)) / (h * h);
}

}  // namespace

double linear_functional(const DensityTrajectory& rho, const SpaceTimeField& g) {
  check_grids(g, rho);
  std::size_t slices = rho.k_slices();
  double acc = spatial_pairing(rho, g, slices - 1) - spatial_pairing(rho, g, 0);
  for (std::size_t k = 0; k < slices; ++k) {
    double w = trapezoid_weight(k, slices, rho.dt());
    double s = 0.0;
    for (int a = 1; a <= rho.n_species(); ++a)
      for (std::size_t j = 0; j < rho.m(); ++j)
        s += rho.value(k, a, j) *
             (time_derivative(g, k, a, j) + laplacian(g, k, a, j));
    acc -= w * s / static_cast<double>(rho.m());
  }
  return acc;
}

RieszResult riesz_solve(const DensityTrajectory& rho, const RieszOptions& opts) {
  int n = rho.n_species();
  std::size_t m = rho.m();
  std::size_t slices = rho.k_slices();
  double h = 1.0 / static_cast<double>(m);

  RieszResult result;
  result.h = SpaceTimeField(n, m, slices, rho.dt());

  std::vector<double> rhs(m * static_cast<std::size_t>(n));
  std::vector<double> face(n);
  const double scale = 2.0 / (h * h);

  for (std::size_t k = 0; k < slices; ++k) {
    // RHS: d_t rho - lap rho, block layout [site][species]
    for (int a = 1; a <= n; ++a) {
      double mean = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double r = time_derivative(rho.field(), k, a, j) -
                   laplacian(rho.field(), k, a, j);
        rhs[j * n + (a - 1)] = r;
        mean += r;
      }
      mean /= static_cast<double>(m);
      if (std::abs(mean) > opts.mean_tolerance)
        throw std::runtime_error("RHS spatial mean nonzero: mass not conserved");
      for (std::size_t j = 0; j < m; ++j) rhs[j * n + (a - 1)] -= mean;
    }

    BlockCyclicTridiag sys(m, n);
    for (std::size_t j = 0; j < m; ++j) {
      // faces j-1/2 and j+1/2
      std::size_t jm = (j + m - 1) % m;
      face_densities(rho, k, jm, opts.delta_clip, face, result.clip_magnitude);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double chi = face[a] * ((a == b ? 1.0 : 0.0) - face[b]) * scale;
          sys.lower(j, a, b) = -chi;
          sys.diag(j, a, b) = chi;
        }
      face_densities(rho, k, j, opts.delta_clip, face, result.clip_magnitude);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          double chi = face[a] * ((a == b ? 1.0 : 0.0) - face[b]) * scale;
          sys.upper(j, a, b) = -chi;
          sys.diag(j, a, b) += chi;
        }
    }
    // gauge pin: replace the first block row by H(0) = 0; consistency of the
    // dropped equation is ensured by the zero-mean RHS
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        sys.lower(0, a, b) = 0.0;
        sys.upper(0, a, b) = 0.0;
        sys.diag(0, a, b) = (a == b) ? 1.0 : 0.0;
      }
    for (int a = 0; a < n; ++a) rhs[a] = 0.0;

    std::vector<double> sol = sys.solve(rhs);

    for (int a = 1; a <= n; ++a) {
      double mean = 0.0;
      for (std::size_t j = 0; j < m; ++j) mean += sol[j * n + (a - 1)];
      mean /= static_cast<double>(m);
      for (std::size_t j = 0; j < m; ++j)
        result.h.value(k, a, j) = sol[j * n + (a - 1)] - mean;
    }
  }

  // probe the weak identity with a batch of random trigonometric fields
  CounterRng rng(CounterRng::key_for(opts.probe_seed, 0, 0x70726f62ull));
  MetricOptions mopts{opts.delta_clip};
  for (int p = 0; p < opts.residual_probes; ++p) {
    SpaceTimeField probe(n, m, slices, rho.dt());
    for (int a = 1; a <= n; ++a) {
      double c1 = rng.next_normal(), c2 = rng.next_normal(), c3 = rng.next_normal();
      int mode = 1 + static_cast<int>(rng.next_u64() % 3);
      for (std::size_t k = 0; k < slices; ++k) {
        double t = rho.dt() * static_cast<double>(k);
        double tw = std::cos(kPi * t / std::max(rho.t_end(), 1e-300));
        for (std::size_t j = 0; j < m; ++j) {
          double u = static_cast<double>(j) * h;
          probe.value(k, a, j) = c1 * std::sin(2.0 * kPi * mode * u) +
                                 c2 * std::cos(2.0 * kPi * mode * u) +
                                 c3 * tw * std::sin(2.0 * kPi * u);
        }
      }
    }
    double defect = std::abs(linear_functional(rho, probe) -
                             inner_product(probe, result.h, rho, mopts));
    result.residual = std::max(result.residual, defect);
  }
  return result;
}

double dynamic_cost(const DensityTrajectory& rho, const SpaceTimeField& h,
                    const MetricOptions& opts) {
  return 0.5 * inner_product(h, h, rho, opts);
}

LowerBoundResult variational_lower_bound(const DensityTrajectory& rho,
                                         const std::vector<SpaceTimeField>& basis,
                                         const MetricOptions& opts) {
  std::size_t nb = basis.size();
  if (nb == 0) throw std::invalid_argument("empty basis");
  std::vector<double> gram(nb * nb), ell(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    ell[i] = linear_functional(rho, basis[i]);
    for (std::size_t j = i; j < nb; ++j) {
      double v = inner_product(basis[i], basis[j], rho, opts);
      gram[i * nb + j] = v;
      gram[j * nb + i] = v;
    }
  }
  LowerBoundResult out;
  std::vector<double> coeff;
  try {
    coeff = dense_solve(gram, ell);
  } catch (const std::runtime_error&) {
    out.regularized = true;
    std::vector<double> ridged = gram;
    for (std::size_t i = 0; i < nb; ++i) ridged[i * nb + i] += 1e-12;
    coeff = dense_solve(ridged, ell);
  }
  double bc = 0.0, cac = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    bc += ell[i] * coeff[i];
    for (std::size_t j = 0; j < nb; ++j) cac += coeff[i] * gram[i * nb + j] * coeff[j];
  }
  out.value = bc - 0.5 * cac;
  return out;
}

std::vector<SpaceTimeField> make_trig_basis(int n_species, std::size_t m,
                                            std::size_t k_slices, double dt,
                                            int max_space_mode, int max_time_mode) {
  std::vector<SpaceTimeField> basis;
  double t_end = dt * static_cast<double>(k_slices - 1);
  double h = 1.0 / static_cast<double>(m);
  for (int mode = 1; mode <= max_space_mode; ++mode)
    for (int q = 0; q <= max_time_mode; ++q)
      for (int a = 1; a <= n_species; ++a)
        for (int trig = 0; trig < 2; ++trig) {
          SpaceTimeField f(n_species, m, k_slices, dt);
          for (std::size_t k = 0; k < k_slices; ++k) {
            double t = dt * static_cast<double>(k);
            double tw = std::cos(kPi * static_cast<double>(q) * t /
                                 std::max(t_end, 1e-300));
            for (std::size_t j = 0; j < m; ++j) {
              double u = static_cast<double>(j) * h;
              double s = trig == 0 ? std::sin(2.0 * kPi * mode * u)
                                   : std::cos(2.0 * kPi * mode * u);
              f.value(k, a, j) = s * tw;
            }
          }
          basis.push_back(std::move(f));
        }
  return basis;
}

CollapseReport collapse_check(const DensityTrajectory& rho,
                              const SpaceTimeField& h_common,
                              const MetricOptions& opts) {
  if (h_common.n_species != 1)
    throw std::invalid_argument("common potential must be a single-species field");
  if (h_common.m != rho.m() || h_common.k_slices != rho.k_slices())
    throw std::invalid_argument("field grid does not match the trajectory");

  int n = rho.n_species();
  SpaceTimeField vec(n, rho.m(), rho.k_slices(), rho.dt());
  for (std::size_t k = 0; k < rho.k_slices(); ++k)
    for (int a = 1; a <= n; ++a)
      for (std::size_t j = 0; j < rho.m(); ++j)
        vec.value(k, a, j) = h_common.value(k, 1, j);

  CollapseReport rep;
  rep.i0_vector = 0.5 * inner_product(vec, vec, rho, opts);

  std::size_t m = rho.m();
  double spacing = 1.0 / static_cast<double>(m);
  std::vector<double> face(n);
  double clip = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < rho.k_slices(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      std::size_t jp = (j + 1) % m;
      face_densities(rho, k, j, opts.delta_clip, face, clip);
      double varrho = 0.0;
      for (int a = 0; a < n; ++a) varrho += face[a];
      double dh = (h_common.value(k, 1, jp) - h_common.value(k, 1, j)) / spacing;
      acc += varrho * (1.0 - varrho) * dh * dh;
    }
    total += trapezoid_weight(k, rho.k_slices(), rho.dt()) * spacing * acc;
  }
  rep.i0_scalar = total;
  rep.abs_diff = std::abs(rep.i0_vector - rep.i0_scalar);
  return rep;
}

RateEvaluation evaluate_rate(const DensityTrajectory& rho, const ProfileGrid& gamma,
                             const RieszOptions& opts) {
  RateEvaluation out;
  ProfileGrid omega(rho.n_species(), rho.m());
  for (int a = 1; a <= rho.n_species(); ++a)
    for (std::size_t j = 0; j < rho.m(); ++j)
      omega.set(a, j, std::clamp(rho.value(0, a, j), 0.0, 1.0));
  out.h = static_cost(omega, gamma);

  RieszResult riesz = riesz_solve(rho, opts);
  MetricOptions mopts{opts.delta_clip};
  out.i0 = dynamic_cost(rho, riesz.h, mopts);
  out.residual = riesz.residual;
  out.clip_magnitude = riesz.clip_magnitude;
  out.i_total = out.h + out.i0;

  auto basis = make_trig_basis(rho.n_species(), rho.m(), rho.k_slices(), rho.dt(), 3, 2);
  out.variational_lb = variational_lower_bound(rho, basis, mopts).value;
  return out;
}

}  // namespace stirlab

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "stirlab/checks.hpp"
#include "stirlab/linalg.hpp"
#include "stirlab/rate.hpp"
#include "stirlab/rng.hpp"

using namespace stirlab;

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kPi = 3.14159265358979323846;

// smooth interior trajectory with constant spatial means (mass conserving)
DensityTrajectory analytic_trajectory(int n_species, std::size_t m,
                                      std::size_t slices, double t_end) {
  SpaceTimeField f(n_species, m, slices, t_end / static_cast<double>(slices - 1));
  for (std::size_t k = 0; k < slices; ++k) {
    double t = f.dt * static_cast<double>(k);
    for (int a = 1; a <= n_species; ++a)
      for (std::size_t j = 0; j < m; ++j) {
        double u = static_cast<double>(j) / static_cast<double>(m);
        double base = 0.55 / n_species;
        double amp = 0.08 * std::cos((2.0 + a) * t) / n_species;
        f.value(k, a, j) = base + amp * std::sin(kTwoPi * u + 0.7 * a);
      }
  }
  return DensityTrajectory(std::move(f));
}

}  // namespace

TEST_CASE("static cost vanishes at equality and matches the closed form") {
  ProfileGrid gamma = ProfileGrid::constant(2, {1.0 / 3.0, 1.0 / 3.0}, 16);
  CHECK(static_cost(gamma, gamma) == doctest::Approx(0.0));

  ProfileGrid omega = ProfileGrid::constant(2, {0.5, 0.5}, 16);
  CHECK(static_cost(omega, gamma) == doctest::Approx(std::log(1.5)).epsilon(1e-12));

  // mass where the reference has none
  ProfileGrid none = ProfileGrid::constant(2, {0.0, 0.5}, 16);
  ProfileGrid some = ProfileGrid::constant(2, {0.3, 0.5}, 16);
  CHECK(std::isinf(static_cost(some, none)));

  CHECK(std::isinf(static_cost(gamma, gamma, true)));  // explicit atom flag
}

TEST_CASE("static cost dominates its variational test functionals") {
  std::size_t m = 32;
  ProfileGrid gamma(2, m);
  ProfileGrid omega(2, m);
  for (std::size_t j = 0; j < m; ++j) {
    double u = static_cast<double>(j) / static_cast<double>(m);
    gamma.set(1, j, 0.3 + 0.05 * std::sin(kTwoPi * u));
    gamma.set(2, j, 0.35);
    omega.set(1, j, 0.25);
    omega.set(2, j, 0.4 - 0.05 * std::cos(kTwoPi * u));
  }
  double h = static_cost(omega, gamma);

  // suboptimal test functions stay below; the optimizer attains the sup
  std::vector<std::vector<double>> phi(3, std::vector<double>(m, 0.0));
  double low = static_cost_test_functional(omega, gamma, phi);
  CHECK(low <= h + 1e-12);

  for (std::size_t j = 0; j < m; ++j) {
    double g0 = gamma.hole_at_site(j, m), w0 = 1.0 - omega.value(1, j) - omega.value(2, j);
    phi[0][j] = std::log(w0 / g0);
    phi[1][j] = std::log(omega.value(1, j) / gamma.value(1, j));
    phi[2][j] = std::log(omega.value(2, j) / gamma.value(2, j));
  }
  double opt = static_cost_test_functional(omega, gamma, phi);
  CHECK(opt == doctest::Approx(h).epsilon(1e-12));
  CHECK(opt <= h + 1e-12);

  // scaled-down optimizer approaches from below
  for (auto& row : phi)
    for (double& v : row) v *= 0.5;
  double half = static_cost_test_functional(omega, gamma, phi);
  CHECK(half < h);
  CHECK(half > low);
}

TEST_CASE("inner product is positive semidefinite with gradient kernel") {
  DensityTrajectory rho = analytic_trajectory(2, 32, 9, 0.1);
  CounterRng rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    SpaceTimeField g(2, 32, 9, rho.dt());
    for (double& v : g.v) v = rng.next_normal();
    CHECK(inner_product(g, g, rho) >= -1e-12);
  }

  SpaceTimeField flat(2, 32, 9, rho.dt());
  for (std::size_t k = 0; k < 9; ++k)
    for (int a = 1; a <= 2; ++a)
      for (std::size_t j = 0; j < 32; ++j) flat.value(k, a, j) = 3.0 + a;
  SpaceTimeField any(2, 32, 9, rho.dt());
  for (double& v : any.v) v = rng.next_normal();
  CHECK(inner_product(flat, any, rho) == doctest::Approx(0.0));
}

TEST_CASE("linear functional vanishes on discrete heat solutions") {
  ProfileGrid gamma = checks::bench_profile(64);
  SchemeParams scheme;
  scheme.space_cells = 64;
  scheme.time_slices = 65;
  scheme.t_end = 0.05;
  DensityTrajectory rho = solve_hydro(gamma, PotentialSet::zero(2, 0.05), scheme);
  auto basis = make_trig_basis(2, 64, 65, rho.dt(), 2, 1);
  for (const auto& g : basis)
    CHECK(std::abs(linear_functional(rho, g)) < 2e-4);
}

TEST_CASE("riesz solve returns zero cost for heat trajectories") {
  // the defect of the time differences scales like dt^3 in the cost, so a
  // fine output grid is needed to see the zero
  ProfileGrid gamma = checks::bench_profile(64);
  SchemeParams scheme;
  scheme.space_cells = 64;
  scheme.time_slices = 257;
  scheme.t_end = 0.05;
  DensityTrajectory rho = solve_hydro(gamma, PotentialSet::zero(2, 0.05), scheme);
  RieszResult rz = riesz_solve(rho);
  CHECK(dynamic_cost(rho, rz.h) <= 1e-8);
  auto basis = make_trig_basis(2, 64, 257, rho.dt(), 2, 1);
  CHECK(variational_lower_bound(rho, basis).value <= 1e-8);
}

TEST_CASE("riesz residual is small on analytic interior trajectories") {
  DensityTrajectory rho = analytic_trajectory(2, 64, 33, 0.2);
  RieszResult rz = riesz_solve(rho);
  double rhs_norm = 0.0;
  for (std::size_t k = 0; k < rho.k_slices(); ++k)
    for (int a = 1; a <= 2; ++a)
      for (std::size_t j = 0; j < rho.m(); ++j) {
        // magnitude scale of the data entering the solve
        rhs_norm = std::max(rhs_norm, std::abs(rho.value(k, a, j)));
      }
  CHECK(rz.residual <= 1e-6 * (1.0 + rhs_norm) * 100.0);
  CHECK(rz.residual <= 1e-6);  // in practice the defect is near round-off
}

TEST_CASE("stationary trajectory with curvature matches a dense oracle") {
  // time-independent rho: RHS is -lap(rho); solve at M = 32 and compare with
  // an independently assembled dense system
  std::size_t m = 32;
  std::size_t slices = 5;
  double t_end = 0.1;
  SpaceTimeField f(2, m, slices, t_end / 4.0);
  for (std::size_t k = 0; k < slices; ++k)
    for (int a = 1; a <= 2; ++a)
      for (std::size_t j = 0; j < m; ++j) {
        double u = static_cast<double>(j) / static_cast<double>(m);
        f.value(k, a, j) = 0.3 + 0.05 * std::sin(kTwoPi * u + a);
      }
  DensityTrajectory rho(std::move(f));
  RieszResult rz = riesz_solve(rho);

  // dense assembly of -div(2 chi grad H) = -lap rho on one slice
  std::size_t dim = 2 * m;
  double h = 1.0 / static_cast<double>(m);
  std::vector<double> a_mat(dim * dim, 0.0), rhs(dim, 0.0);
  auto chi_face = [&](std::size_t j, int r, int c) {
    std::size_t jp = (j + 1) % m;
    double f1 = 0.5 * (rho.value(0, 1, j) + rho.value(0, 1, jp));
    double f2 = 0.5 * (rho.value(0, 2, j) + rho.value(0, 2, jp));
    double rr = r == 0 ? f1 : f2;
    double cc = c == 0 ? f1 : f2;
    return rr * ((r == c ? 1.0 : 0.0) - cc);
  };
  for (std::size_t j = 0; j < m; ++j) {
    std::size_t jp = (j + 1) % m, jm = (j + m - 1) % m;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        double right = 2.0 * chi_face(j, r, c) / (h * h);
        double left = 2.0 * chi_face(jm, r, c) / (h * h);
        a_mat[(j * 2 + r) * dim + jp * 2 + c] -= right;
        a_mat[(j * 2 + r) * dim + jm * 2 + c] -= left;
        a_mat[(j * 2 + r) * dim + j * 2 + c] += right + left;
      }
      std::size_t jpp = (j + 1) % m;
      double lap = (rho.value(0, r + 1, jpp) - 2.0 * rho.value(0, r + 1, j) +
                    rho.value(0, r + 1, jm)) / (h * h);
      rhs[j * 2 + r] = -lap;
    }
  }
  // pin the gauge the same way: first block row -> identity, zero rhs
  for (int r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < dim; ++c) a_mat[r * dim + c] = 0.0;
    a_mat[r * dim + r] = 1.0;
    rhs[r] = 0.0;
  }
  std::vector<double> dense = dense_solve(a_mat, rhs);
  // remove per-species means to match the reported gauge
  for (int r = 0; r < 2; ++r) {
    double mean = 0.0;
    for (std::size_t j = 0; j < m; ++j) mean += dense[j * 2 + r];
    mean /= static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) dense[j * 2 + r] -= mean;
  }
  for (std::size_t j = 0; j < m; ++j)
    for (int a = 1; a <= 2; ++a)
      CHECK(rz.h.value(2, a, j) ==
            doctest::Approx(dense[j * 2 + (a - 1)]).epsilon(1e-8));
}

TEST_CASE("manufactured potential is recovered with shrinking error") {
  auto check = checks::rate_recovery_check(32, 64, 0.25);
  CHECK(check.rel_err_coarse < 0.2);
  CHECK(check.rel_err_fine < 0.75 * check.rel_err_coarse);
  CHECK(check.lb_minus_i0_coarse <= 1e-6);
}

TEST_CASE("variational lower bound is monotone in nested bases") {
  DensityTrajectory rho = analytic_trajectory(2, 48, 17, 0.15);
  auto basis = make_trig_basis(2, 48, 17, rho.dt(), 3, 1);
  double prev = -1e300;
  for (std::size_t cut : {4ul, 8ul, 16ul, basis.size()}) {
    std::vector<SpaceTimeField> sub(basis.begin(), basis.begin() + cut);
    double v = variational_lower_bound(rho, sub).value;
    CHECK(v >= prev - 1e-10);
    prev = v;
  }
  RieszResult rz = riesz_solve(rho);
  double i0 = dynamic_cost(rho, rz.h);
  CHECK(prev <= i0 + 1e-6);
}

TEST_CASE("collapse identities for equal potentials") {
  DensityTrajectory rho = analytic_trajectory(2, 48, 17, 0.15);
  SpaceTimeField h = sample_field(1, 48, 17, 0.15, [](int, double u, double t) {
    return 0.4 * std::sin(kTwoPi * u) * std::cos(t);
  });
  CollapseReport rep = collapse_check(rho, h);
  CHECK(rep.abs_diff <= 1e-8);

  SpaceTimeField zero(1, 48, 17, rho.dt());
  CollapseReport zrep = collapse_check(rho, zero);
  CHECK(zrep.i0_vector == doctest::Approx(0.0));
  CHECK(zrep.i0_scalar == doctest::Approx(0.0));
}

TEST_CASE("three species with a shared potential reduce to two") {
  // partition {1}, {2,3}: H2 = H3, compare against the two-species form on
  // (rho_1, rho_2 + rho_3)
  std::size_t m = 48, slices = 17;
  double t_end = 0.15;
  DensityTrajectory rho3 = analytic_trajectory(3, m, slices, t_end);

  SpaceTimeField h3(3, m, slices, rho3.dt());
  SpaceTimeField h2(2, m, slices, rho3.dt());
  SpaceTimeField rho2_field(2, m, slices, rho3.dt());
  for (std::size_t k = 0; k < slices; ++k) {
    double t = rho3.dt() * static_cast<double>(k);
    for (std::size_t j = 0; j < m; ++j) {
      double u = static_cast<double>(j) / static_cast<double>(m);
      double ha = 0.5 * std::sin(kTwoPi * u) * std::cos(t);
      double hb = -0.3 * std::cos(kTwoPi * u);
      h3.value(k, 1, j) = ha;
      h3.value(k, 2, j) = hb;
      h3.value(k, 3, j) = hb;
      h2.value(k, 1, j) = ha;
      h2.value(k, 2, j) = hb;
      rho2_field.value(k, 1, j) = rho3.value(k, 1, j);
      rho2_field.value(k, 2, j) = rho3.value(k, 2, j) + rho3.value(k, 3, j);
    }
  }
  DensityTrajectory rho2(std::move(rho2_field));
  double i3 = 0.5 * inner_product(h3, h3, rho3);
  double i2 = 0.5 * inner_product(h2, h2, rho2);
  CHECK(std::abs(i3 - i2) <= 1e-8);
}

TEST_CASE("rate evaluation report combines the pieces") {
  ProfileGrid gamma = checks::bench_profile(48);
  SchemeParams scheme;
  scheme.space_cells = 48;
  scheme.time_slices = 33;
  scheme.t_end = 0.1;
  PotentialSet pot = checks::bench_potential(0.1, false);
  DensityTrajectory rho = solve_hydro(gamma, pot, scheme);
  RateEvaluation ev = evaluate_rate(rho, gamma);
  CHECK(ev.h >= 0.0);
  CHECK(ev.h < 1e-10);  // starts exactly at gamma
  CHECK(ev.i0 > 0.0);
  CHECK(ev.i_total == doctest::Approx(ev.h + ev.i0));
  CHECK(ev.variational_lb <= ev.i0 + 1e-6);
  CHECK(ev.residual < 1e-6);
}

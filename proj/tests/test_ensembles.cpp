#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "stirlab/empirical.hpp"
#include "stirlab/ensembles.hpp"
#include "stirlab/rng.hpp"

using namespace stirlab;

namespace {

LocalObservable phi_site1() {
  return LocalObservable::from_function(
      2, 1, [](const std::vector<std::uint8_t>& p) { return p[0] == 1 ? 1.0 : 0.0; });
}

LocalObservable phi_11() {
  return LocalObservable::from_function(2, 2, [](const std::vector<std::uint8_t>& p) {
    return p[0] == 1 && p[1] == 1 ? 1.0 : 0.0;
  });
}

LocalObservable phi_12() {
  return LocalObservable::from_function(2, 2, [](const std::vector<std::uint8_t>& p) {
    return p[0] == 1 && p[1] == 2 ? 1.0 : 0.0;
  });
}

double multinomial_pmf(std::size_t n, std::int64_t k1, std::int64_t k2, double p1,
                       double p2) {
  return std::exp(log_multinomial(n, {k1, k2}) +
                  static_cast<double>(k1) * std::log(p1) +
                  static_cast<double>(k2) * std::log(p2) +
                  (static_cast<double>(n) - k1 - k2) * std::log(1.0 - p1 - p2));
}

}  // namespace

TEST_CASE("canonical probabilities are uniform on the shell") {
  CanonicalSpec spec{3, {1, 1}};
  std::size_t hits = 0;
  std::vector<std::uint8_t> sites;
  for (std::size_t code = 0; code < state_count(3, 2); ++code) {
    decode_state(code, 3, 2, sites);
    Configuration c(2, sites);
    double p = canonical_probability(spec, c);
    if (p > 0.0) {
      CHECK(p == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
      ++hits;
    }
  }
  CHECK(hits == 6);

  Configuration wrong(2, {1, 1, 1});
  CHECK(canonical_probability(spec, wrong) == 0.0);

  CanonicalSpec pairs{4, {2, 0}};
  Configuration two(2, {1, 1, 0, 0});
  CHECK(canonical_probability(pairs, two) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("local pattern probabilities: exact values and limits") {
  CanonicalSpec spec{300, {90, 60}};
  double p = local_pattern_probability(2, {1, 0}, spec);
  CHECK(std::abs(p - 0.3 * 0.5) < 1e-2);

  CHECK(local_pattern_probability(2, {3, 0}, CanonicalSpec{5, {2, 1}}) == 0.0);

  // the full window reduces to the canonical probability
  CanonicalSpec tiny{4, {2, 1}};
  double full = local_pattern_probability(4, {2, 1}, tiny);
  CHECK(full == doctest::Approx(std::exp(-log_multinomial(4, {2, 1}))).epsilon(1e-13));
}

TEST_CASE("canonical expectations match direct shell enumeration") {
  CanonicalSpec spec{7, {3, 2}};
  LocalObservable phi = phi_12();
  double expect = canonical_local_expectation(phi, spec);

  double acc = 0.0;
  std::size_t shell = 0;
  std::vector<std::uint8_t> sites;
  for (std::size_t code = 0; code < state_count(7, 2); ++code) {
    decode_state(code, 7, 2, sites);
    Configuration c(2, sites);
    if (c.counts()[1] != 3 || c.counts()[2] != 2) continue;
    ++shell;
    acc += (c.label(0) == 1 && c.label(1) == 2) ? 1.0 : 0.0;
  }
  CHECK(expect == doctest::Approx(acc / static_cast<double>(shell)).epsilon(1e-12));
}

TEST_CASE("equivalence gap: single-site observables see no difference") {
  // both expectations equal k_1/N; only log-gamma round-off remains
  for (std::size_t n : {5ul, 10ul, 25ul})
    CHECK(equivalence_gap(phi_site1(), n) < 1e-13);
}

TEST_CASE("equivalence gap matches the closed form and decays") {
  LocalObservable phi = phi_11();
  // sup_k |k(k-1)/(N(N-1)) - (k/N)^2| is attained at k = N/2
  double closed10 = std::abs(5.0 * 4.0 / (10.0 * 9.0) - 0.25);
  CHECK(equivalence_gap(phi, 10) == doctest::Approx(closed10).epsilon(1e-12));

  double g10 = equivalence_gap(phi, 10);
  double g50 = equivalence_gap(phi, 50);
  double g200 = equivalence_gap(phi, 200);
  CHECK(g200 < g50);
  CHECK(g50 < g10);

  LocalObservable mixed = phi_12();
  double m10 = equivalence_gap(mixed, 10);
  double m50 = equivalence_gap(mixed, 50);
  double m200 = equivalence_gap(mixed, 200);
  CHECK(m200 < m50);
  CHECK(m50 < m10);
}

TEST_CASE("dirichlet form: invariance and brute-force agreement") {
  std::size_t n = 3;
  std::size_t states = state_count(n, 2);
  StateDensity flat(n, 2, std::vector<double>(states, 1.0));
  CHECK(dirichlet_form(flat) == doctest::Approx(0.0));

  // functions of the counts only are exchange invariant
  std::vector<double> by_counts(states);
  std::vector<std::uint8_t> sites;
  double mean = 0.0;
  for (std::size_t code = 0; code < states; ++code) {
    decode_state(code, n, 2, sites);
    Configuration c(2, sites);
    by_counts[code] = 1.0 + 0.3 * static_cast<double>(c.counts()[1]) +
                      0.1 * static_cast<double>(c.counts()[2] * c.counts()[2]);
    mean += by_counts[code];
  }
  mean /= static_cast<double>(states);
  for (double& v : by_counts) v /= mean;
  CHECK(dirichlet_form(StateDensity(n, 2, by_counts)) == doctest::Approx(0.0));

  // random density vs an independent double loop over the generator matrix
  CounterRng rng(17);
  std::vector<double> f(states);
  double fm = 0.0;
  for (double& v : f) {
    v = 0.1 + rng.next_uniform();
    fm += v;
  }
  fm /= static_cast<double>(states);
  for (double& v : f) v /= fm;
  StateDensity dens(n, 2, f);
  double got = dirichlet_form(dens);

  std::vector<double> gen = generator_dense(n, 2, nullptr, 0.0);
  double expect = 0.0;
  for (std::size_t i = 0; i < states; ++i)
    for (std::size_t j = 0; j < states; ++j) {
      if (i == j) continue;
      double rate = gen[i * states + j];
      if (rate == 0.0) continue;
      double d = std::sqrt(f[j]) - std::sqrt(f[i]);
      expect += rate * d * d;
    }
  expect /= 2.0 * static_cast<double>(states);
  CHECK(got == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("dirichlet form is convex in mixtures") {
  std::size_t n = 4;
  std::size_t states = state_count(n, 2);
  CounterRng rng(23);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> f(states), g(states);
    double fm = 0.0, gm = 0.0;
    for (std::size_t i = 0; i < states; ++i) {
      f[i] = 0.05 + rng.next_uniform();
      g[i] = 0.05 + rng.next_uniform();
      fm += f[i];
      gm += g[i];
    }
    for (std::size_t i = 0; i < states; ++i) {
      f[i] *= static_cast<double>(states) / fm;
      g[i] *= static_cast<double>(states) / gm;
    }
    double lam = rng.next_uniform();
    std::vector<double> mix(states);
    for (std::size_t i = 0; i < states; ++i) mix[i] = lam * f[i] + (1.0 - lam) * g[i];
    double dmix = dirichlet_form(StateDensity(n, 2, mix));
    double bound = lam * dirichlet_form(StateDensity(n, 2, f)) +
                   (1.0 - lam) * dirichlet_form(StateDensity(n, 2, g));
    CHECK(dmix <= bound + 1e-12);
  }
}

TEST_CASE("grand-canonical measure decomposes over canonical shells") {
  std::size_t n = 8;
  double p1 = 0.3, p2 = 0.45;
  std::size_t states = state_count(n, 2);
  std::vector<std::uint8_t> sites;
  double tv = 0.0;
  for (std::size_t code = 0; code < states; ++code) {
    decode_state(code, n, 2, sites);
    Configuration c(2, sites);
    auto k1 = c.counts()[1], k2 = c.counts()[2];
    double direct = std::pow(p1, static_cast<double>(k1)) *
                    std::pow(p2, static_cast<double>(k2)) *
                    std::pow(1.0 - p1 - p2, static_cast<double>(n) - k1 - k2);
    double via_shells = multinomial_pmf(n, k1, k2, p1, p2) *
                        canonical_probability(CanonicalSpec{n, {k1, k2}}, c);
    tv += std::abs(direct - via_shells);
  }
  CHECK(0.5 * tv < 1e-12);
}

TEST_CASE("feynman-kac eigenvalue: trivial cases") {
  std::size_t n = 4;
  std::size_t states = state_count(n, 2);
  std::vector<double> zero(states, 0.0);
  CHECK(feynman_kac_lambda(0.0, zero, n, 2) == doctest::Approx(0.0).epsilon(1e-9));

  std::vector<double> constant(states, 0.7);
  CHECK(feynman_kac_lambda(1.3, constant, n, 2) ==
        doctest::Approx(1.3 * 0.7).epsilon(1e-9));
}

TEST_CASE("feynman-kac eigenvalue matches a dense Jacobi oracle") {
  std::size_t n = 4;
  std::size_t states = state_count(n, 2);
  CounterRng rng(31);
  std::vector<double> v(states);
  for (double& x : v) x = rng.next_uniform();
  double a = 0.8;
  double got = feynman_kac_lambda(a, v, n, 2);

  // oracle: full spectrum of K = N^2 L + a V by cyclic Jacobi rotations
  std::vector<double> gen = generator_dense(n, 2, nullptr, 0.0);
  double n2 = static_cast<double>(n * n);
  std::vector<double> k_mat(states * states);
  for (std::size_t i = 0; i < states; ++i)
    for (std::size_t j = 0; j < states; ++j)
      k_mat[i * states + j] = n2 * gen[i * states + j] + (i == j ? a * v[i] : 0.0);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < states; ++p)
      for (std::size_t q = p + 1; q < states; ++q)
        off = std::max(off, std::abs(k_mat[p * states + q]));
    if (off < 1e-12) break;
    for (std::size_t p = 0; p < states; ++p)
      for (std::size_t q = p + 1; q < states; ++q) {
        double apq = k_mat[p * states + q];
        if (std::abs(apq) < 1e-14) continue;
        double app = k_mat[p * states + p], aqq = k_mat[q * states + q];
        double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
        double c = std::cos(theta), s = std::sin(theta);
        for (std::size_t r = 0; r < states; ++r) {
          double arp = k_mat[r * states + p], arq = k_mat[r * states + q];
          k_mat[r * states + p] = c * arp - s * arq;
          k_mat[r * states + q] = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < states; ++r) {
          double apr = k_mat[p * states + r], aqr = k_mat[q * states + r];
          k_mat[p * states + r] = c * apr - s * aqr;
          k_mat[q * states + r] = s * apr + c * aqr;
        }
      }
  }
  double top = -1e300;
  for (std::size_t i = 0; i < states; ++i)
    top = std::max(top, k_mat[i * states + i]);
  CHECK(got == doctest::Approx(top).epsilon(1e-6));
}

TEST_CASE("one block gap: trivial and enumerated values") {
  CHECK(one_block_gap(phi_site1(), 1) < 1e-14);
  CHECK(one_block_gap(phi_site1(), 3) < 1e-14);

  LocalObservable phi = phi_11();
  double got = one_block_gap(phi, 1);

  // direct enumeration of the 27 three-site states
  double worst = 0.0;
  std::map<std::pair<int, int>, std::pair<double, double>> shells;
  std::vector<std::uint8_t> sites;
  for (std::size_t code = 0; code < 27; ++code) {
    decode_state(code, 3, 2, sites);
    Configuration c(2, sites);
    double avg = 0.0;
    for (std::size_t z = 0; z < 3; ++z)
      avg += (c.label(z) == 1 && c.label((z + 1) % 3) == 1) ? 1.0 : 0.0;
    avg /= 3.0;
    double d1 = static_cast<double>(c.counts()[1]) / 3.0;
    auto& entry = shells[{static_cast<int>(c.counts()[1]),
                          static_cast<int>(c.counts()[2])}];
    entry.first += std::abs(avg - d1 * d1);
    entry.second += 1.0;
  }
  for (auto& [key, val] : shells) worst = std::max(worst, val.first / val.second);
  CHECK(got == doctest::Approx(worst).epsilon(1e-13));

  CHECK(one_block_gap(phi, 2) < one_block_gap(phi, 1));
  CHECK(one_block_gap(phi, 3) < one_block_gap(phi, 2));
}

TEST_CASE("two block gap matches pair enumeration and vanishes on even splits") {
  int k = 1;
  double got = two_block_gap(k);

  // brute force over pairs of three-site blocks
  std::size_t states = 27;
  std::vector<std::uint8_t> za, xb;
  std::map<std::pair<int, int>, std::pair<double, double>> shells;
  for (std::size_t a = 0; a < states; ++a) {
    decode_state(a, 3, 2, za);
    Configuration ca(2, za);
    for (std::size_t b = 0; b < states; ++b) {
      decode_state(b, 3, 2, xb);
      Configuration cb(2, xb);
      int k1 = static_cast<int>(ca.counts()[1] + cb.counts()[1]);
      int k2 = static_cast<int>(ca.counts()[2] + cb.counts()[2]);
      double d1 = static_cast<double>(ca.counts()[1] - cb.counts()[1]) / 3.0;
      double d2 = static_cast<double>(ca.counts()[2] - cb.counts()[2]) / 3.0;
      auto& entry = shells[{k1, k2}];
      entry.first += std::hypot(d1, d2);
      entry.second += 1.0;
    }
  }
  double worst = 0.0;
  for (auto& [key, val] : shells) worst = std::max(worst, val.first / val.second);
  CHECK(got == doctest::Approx(worst).epsilon(1e-12));

  BlockGaps gaps = block_gap_statistics(phi_11(), 1);
  CHECK(gaps.one_block == doctest::Approx(one_block_gap(phi_11(), 1)));
  CHECK(gaps.two_block == doctest::Approx(got));
}

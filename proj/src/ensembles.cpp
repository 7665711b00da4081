#include "stirlab/ensembles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stirlab {

std::int64_t CanonicalSpec::total() const {
  std::int64_t s = 0;
  for (auto v : k) s += v;
  return s;
}

double log_multinomial(std::size_t n, const std::vector<std::int64_t>& k) {
  std::int64_t total = 0;
  for (auto v : k) {
    if (v < 0) throw std::invalid_argument("negative count");
    total += v;
  }
  if (total > static_cast<std::int64_t>(n))
    throw std::invalid_argument("counts exceed the number of sites");
  double out = std::lgamma(static_cast<double>(n) + 1.0);
  for (auto v : k) out -= std::lgamma(static_cast<double>(v) + 1.0);
  out -= std::lgamma(static_cast<double>(n) - static_cast<double>(total) + 1.0);
  return out;
}

double canonical_probability(const CanonicalSpec& spec, const Configuration& config) {
  if (!spec.admissible()) throw std::invalid_argument("inadmissible counts");
  if (config.n_sites() != spec.n_sites ||
      config.n_species() != static_cast<int>(spec.k.size()))
    throw std::invalid_argument("configuration does not match the shell");
  for (std::size_t a = 0; a < spec.k.size(); ++a)
    if (config.counts()[a + 1] != spec.k[a]) return 0.0;
  return std::exp(-log_multinomial(spec.n_sites, spec.k));
}

double local_pattern_probability(std::size_t ell, const std::vector<std::int64_t>& m,
                                 const CanonicalSpec& spec) {
  if (!spec.admissible()) throw std::invalid_argument("inadmissible counts");
  if (ell > spec.n_sites) throw std::invalid_argument("window larger than the system");
  if (m.size() != spec.k.size()) throw std::invalid_argument("species count mismatch");
  std::int64_t m_total = 0;
  std::vector<std::int64_t> rest(m.size());
  for (std::size_t a = 0; a < m.size(); ++a) {
    if (m[a] < 0 || m[a] > spec.k[a]) return 0.0;
    rest[a] = spec.k[a] - m[a];
    m_total += m[a];
  }
  if (m_total > static_cast<std::int64_t>(ell)) return 0.0;
  // holes must fit in the remaining sites
  std::int64_t rest_total = spec.total() - m_total;
  if (rest_total > static_cast<std::int64_t>(spec.n_sites - ell)) return 0.0;
  return std::exp(log_multinomial(spec.n_sites - ell, rest) -
                  log_multinomial(spec.n_sites, spec.k));
}

double canonical_local_expectation(const LocalObservable& phi,
                                   const CanonicalSpec& spec) {
  if (phi.n_species() != static_cast<int>(spec.k.size()))
    throw std::invalid_argument("species count mismatch");
  auto ell = static_cast<std::size_t>(phi.support());
  if (ell > spec.n_sites) throw std::invalid_argument("window larger than the system");

  // group patterns by their species count vector: each pattern with counts m
  // has probability local_pattern_probability / (number of arrangements),
  // but every fixed pattern with those counts is equally likely, so the
  // pattern probability is exactly the hypergeometric ratio of the counts
  double acc = 0.0;
  std::vector<std::uint8_t> labels;
  std::vector<std::int64_t> m(spec.k.size());
  for (std::size_t pat = 0; pat < phi.patterns(); ++pat) {
    double w = phi.value(pat);
    if (w == 0.0) continue;
    phi.decode(pat, labels);
    std::fill(m.begin(), m.end(), 0);
    for (std::uint8_t s : labels)
      if (s > 0) ++m[s - 1];
    acc += w * local_pattern_probability(ell, m, spec);
  }
  return acc;
}

double equivalence_gap(const LocalObservable& phi, std::size_t n_sites) {
  if (phi.n_species() != 2)
    throw std::invalid_argument("equivalence gap implemented for two species");
  if (static_cast<std::size_t>(phi.support()) > n_sites)
    throw std::invalid_argument("window larger than the system");
  double worst = 0.0;
  std::vector<double> p(2);
  for (std::int64_t k1 = 0; k1 <= static_cast<std::int64_t>(n_sites); ++k1)
    for (std::int64_t k2 = 0; k1 + k2 <= static_cast<std::int64_t>(n_sites); ++k2) {
      CanonicalSpec spec{n_sites, {k1, k2}};
      p[0] = static_cast<double>(k1) / static_cast<double>(n_sites);
      p[1] = static_cast<double>(k2) / static_cast<double>(n_sites);
      double gap = std::abs(canonical_local_expectation(phi, spec) - tilde_phi(phi, p));
      if (gap > worst) worst = gap;
    }
  return worst;
}

std::size_t state_count(std::size_t n_sites, int n_species) {
  std::size_t s = 1;
  for (std::size_t i = 0; i < n_sites; ++i) {
    std::size_t next = s * static_cast<std::size_t>(n_species + 1);
    if (next / static_cast<std::size_t>(n_species + 1) != s)
      throw std::invalid_argument("state space too large");
    s = next;
  }
  return s;
}

void decode_state(std::size_t code, std::size_t n_sites, int n_species,
                  std::vector<std::uint8_t>& sites) {
  sites.resize(n_sites);
  auto base = static_cast<std::size_t>(n_species + 1);
  for (std::size_t x = 0; x < n_sites; ++x) {
    sites[x] = static_cast<std::uint8_t>(code % base);
    code /= base;
  }
}

std::size_t encode_state(const std::vector<std::uint8_t>& sites, int n_species) {
  auto base = static_cast<std::size_t>(n_species + 1);
  std::size_t code = 0, mul = 1;
  for (std::uint8_t s : sites) {
    code += mul * s;
    mul *= base;
  }
  return code;
}

StateDensity::StateDensity(std::size_t n_sites, int n_species, std::vector<double> f)
    : n_sites_(n_sites), n_species_(n_species), f_(std::move(f)) {
  if (f_.size() != state_count(n_sites, n_species))
    throw std::invalid_argument("density must cover every configuration");
  double mean = 0.0;
  for (double v : f_) {
    if (v < 0.0) throw std::invalid_argument("density must be nonnegative");
    mean += v;
  }
  mean /= static_cast<double>(f_.size());
  if (std::abs(mean - 1.0) > 1e-9)
    throw std::invalid_argument("density must have mean 1 under the reference measure");
}

namespace {

// code of the configuration with sites x and x+1 (mod N) swapped
std::size_t swapped_code(std::size_t code, std::size_t x, std::size_t n_sites,
                         std::size_t base, const std::vector<std::size_t>& powers) {
  std::size_t y = (x + 1 == n_sites) ? 0 : x + 1;
  auto la = static_cast<std::int64_t>((code / powers[x]) % base);
  auto lb = static_cast<std::int64_t>((code / powers[y]) % base);
  auto delta = (lb - la) * static_cast<std::int64_t>(powers[x]) +
               (la - lb) * static_cast<std::int64_t>(powers[y]);
  return static_cast<std::size_t>(static_cast<std::int64_t>(code) + delta);
}

std::vector<std::size_t> make_powers(std::size_t n_sites, std::size_t base) {
  std::vector<std::size_t> p(n_sites, 1);
  for (std::size_t x = 1; x < n_sites; ++x) p[x] = p[x - 1] * base;
  return p;
}

}  // namespace

double dirichlet_form(const StateDensity& f) {
  std::size_t n = f.n_sites();
  auto base = static_cast<std::size_t>(f.n_species() + 1);
  std::vector<std::size_t> powers = make_powers(n, base);
  std::size_t states = f.values().size();
  double ref = 1.0 / static_cast<double>(states);
  double acc = 0.0;
  for (std::size_t code = 0; code < states; ++code) {
    double sf = std::sqrt(f.value(code));
    for (std::size_t x = 0; x < n; ++x) {
      auto la = (code / powers[x]) % base;
      auto lb = (code / powers[(x + 1) % n]) % base;
      if (la == lb) continue;
      std::size_t other = swapped_code(code, x, n, base, powers);
      double d = std::sqrt(f.value(other)) - sf;
      acc += d * d;
    }
  }
  return 0.5 * ref * acc;
}

std::vector<double> generator_dense(std::size_t n_sites, int n_species,
                                    const PotentialSet* potentials, double t) {
  std::size_t states = state_count(n_sites, n_species);
  auto base = static_cast<std::size_t>(n_species + 1);
  std::vector<std::size_t> powers = make_powers(n_sites, base);
  std::vector<double> gen(states * states, 0.0);
  for (std::size_t code = 0; code < states; ++code) {
    double exit = 0.0;
    for (std::size_t x = 0; x < n_sites; ++x) {
      auto la = static_cast<int>((code / powers[x]) % base);
      auto lb = static_cast<int>((code / powers[(x + 1) % n_sites]) % base);
      if (la == lb) continue;
      double rate = 1.0;
      if (potentials != nullptr)
        rate = std::exp(potentials->pair_grad_n(la, lb, x, n_sites, t));
      std::size_t other = swapped_code(code, x, n_sites, base, powers);
      gen[code * states + other] += rate;
      exit += rate;
    }
    gen[code * states + code] -= exit;
  }
  return gen;
}

double feynman_kac_lambda(double a, const std::vector<double>& v_by_state,
                          std::size_t n_sites, int n_species,
                          const PowerIterOptions& opts) {
  std::size_t states = state_count(n_sites, n_species);
  if (v_by_state.size() != states)
    throw std::invalid_argument("V must be tabulated on the full state space");
  auto base = static_cast<std::size_t>(n_species + 1);
  std::vector<std::size_t> powers = make_powers(n_sites, base);
  double n2 = static_cast<double>(n_sites) * static_cast<double>(n_sites);

  double vmax = 0.0;
  for (double v : v_by_state) vmax = std::max(vmax, std::abs(v));
  // shift making the matrix entrywise nonnegative: the target becomes the
  // Perron root
  double shift = n2 * static_cast<double>(n_sites) + std::abs(a) * vmax + 1.0;

  // The dynamics conserves the species counts, so the operator block-
  // diagonalizes over count sectors. The tops of different sectors can be
  // nearly degenerate, which stalls a global iteration; within a sector the
  // Perron root is simple, so iterate sector by sector and take the max.
  std::vector<std::uint8_t> sites;
  std::vector<std::int64_t> sector_of(states);
  std::int64_t n_sectors = 0;
  {
    std::vector<std::int64_t> ids((n_sites + 1) * (n_sites + 1), -1);
    for (std::size_t code = 0; code < states; ++code) {
      decode_state(code, n_sites, n_species, sites);
      std::size_t k1 = 0, k2 = 0;
      for (auto s : sites) {
        if (s == 1) ++k1;
        if (s == 2) ++k2;
      }
      std::size_t key = k1 * (n_sites + 1) + k2;
      if (ids[key] < 0) ids[key] = n_sectors++;
      sector_of[code] = ids[key];
    }
  }
  std::vector<std::vector<std::size_t>> sectors(n_sectors);
  for (std::size_t code = 0; code < states; ++code)
    sectors[sector_of[code]].push_back(code);

  double lambda_max = -std::numeric_limits<double>::infinity();
  std::vector<double> vec, next;
  for (const auto& sector : sectors) {
    std::size_t dim = sector.size();
    vec.assign(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    next.assign(dim, 0.0);
    std::vector<std::size_t> local(states, 0);
    for (std::size_t i = 0; i < dim; ++i) local[sector[i]] = i;

    bool converged = dim == 1;
    double lambda = dim == 1 ? a * v_by_state[sector[0]] : 0.0;
    for (std::size_t it = 0; !converged && it < opts.max_iterations; ++it) {
      for (std::size_t i = 0; i < dim; ++i) {
        std::size_t code = sector[i];
        double acc = (a * v_by_state[code] + shift) * vec[i];
        double exit = 0.0;
        for (std::size_t x = 0; x < n_sites; ++x) {
          auto la = (code / powers[x]) % base;
          auto lb = (code / powers[(x + 1) % n_sites]) % base;
          if (la == lb) continue;
          std::size_t other = swapped_code(code, x, n_sites, base, powers);
          acc += n2 * vec[local[other]];
          exit += 1.0;
        }
        next[i] = acc - n2 * exit * vec[i];
      }
      double rq = 0.0, nn = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        rq += vec[i] * next[i];
        nn += next[i] * next[i];
      }
      nn = std::sqrt(nn);
      if (nn == 0.0) throw std::runtime_error("power iteration collapsed");
      double resid = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        double d = next[i] - rq * vec[i];
        resid += d * d;
        vec[i] = next[i] / nn;
      }
      lambda = rq - shift;
      if (std::sqrt(resid) <= opts.tolerance * (std::abs(rq) + 1.0)) converged = true;
    }
    if (!converged) throw std::runtime_error("power iteration did not converge");
    lambda_max = std::max(lambda_max, lambda);
  }
  return lambda_max;
}

double one_block_gap(const LocalObservable& phi, int k) {
  int n = phi.n_species();
  std::size_t block = 2 * static_cast<std::size_t>(k) + 1;
  if (block > 12) throw std::invalid_argument("block enumeration limited to 12 sites");
  std::size_t states = state_count(block, n);

  // shell accumulators indexed by packed counts
  std::size_t shells = 1;
  for (int a = 0; a < n; ++a) shells *= (block + 1);
  std::vector<double> sum(shells, 0.0);
  std::vector<double> count(shells, 0.0);

  std::vector<std::uint8_t> sites;
  std::vector<double> dens(n);
  for (std::size_t code = 0; code < states; ++code) {
    decode_state(code, block, n, sites);
    Configuration cfg(n, sites);
    double avg = 0.0;
    for (std::size_t z = 0; z < block; ++z) avg += phi.shifted(cfg, z);
    avg /= static_cast<double>(block);
    std::size_t shell = 0, mul = 1;
    for (int a = 1; a <= n; ++a) {
      auto c = static_cast<std::size_t>(cfg.counts()[a]);
      shell += mul * c;
      mul *= (block + 1);
      dens[a - 1] = static_cast<double>(c) / static_cast<double>(block);
    }
    sum[shell] += std::abs(avg - tilde_phi(phi, dens));
    count[shell] += 1.0;
  }

  double worst = 0.0;
  for (std::size_t s = 0; s < shells; ++s)
    if (count[s] > 0.0) worst = std::max(worst, sum[s] / count[s]);
  return worst;
}

double two_block_gap(int k) {
  std::size_t block = 2 * static_cast<std::size_t>(k) + 1;
  if (block > 12) throw std::invalid_argument("block enumeration limited to 12 sites");
  auto l = static_cast<std::int64_t>(block);

  // uniform measure on paired shells factorizes over the split of the total
  // counts between the blocks, weighted by the shell sizes
  double worst = 0.0;
  for (std::int64_t k1 = 0; k1 <= 2 * l; ++k1)
    for (std::int64_t k2 = 0; k1 + k2 <= 2 * l; ++k2) {
      double norm = 0.0, acc = 0.0;
      for (std::int64_t m1 = std::max<std::int64_t>(0, k1 - l); m1 <= std::min(k1, l);
           ++m1)
        for (std::int64_t m2 = std::max<std::int64_t>(0, k2 - l); m2 <= std::min(k2, l);
             ++m2) {
          if (m1 + m2 > l) continue;
          if ((k1 - m1) + (k2 - m2) > l) continue;
          double w = std::exp(log_multinomial(block, {m1, m2}) +
                              log_multinomial(block, {k1 - m1, k2 - m2}));
          double d1 = static_cast<double>(2 * m1 - k1) / static_cast<double>(block);
          double d2 = static_cast<double>(2 * m2 - k2) / static_cast<double>(block);
          acc += w * std::hypot(d1, d2);
          norm += w;
        }
      if (norm > 0.0) worst = std::max(worst, acc / norm);
    }
  return worst;
}

BlockGaps block_gap_statistics(const LocalObservable& phi, int k) {
  return {one_block_gap(phi, k), two_block_gap(k)};
}

}  // namespace stirlab

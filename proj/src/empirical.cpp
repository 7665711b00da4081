#include "stirlab/empirical.hpp"

#include <cmath>
#include <stdexcept>

namespace stirlab {

EmpiricalField::EmpiricalField(int n_species, std::size_t n_sites)
    : n_species_(n_species), n_(n_sites),
      mass_(static_cast<std::size_t>(n_species) * n_sites, 0.0) {
  if (n_species < 1 || n_sites < 1) throw std::invalid_argument("empty field");
}

double EmpiricalField::total_mass(int alpha) const {
  double s = 0.0;
  for (std::size_t x = 0; x < n_; ++x) s += mass(alpha, x);
  return s;
}

EmpiricalField empirical_density(const Configuration& config) {
  EmpiricalField f(config.n_species(), config.n_sites());
  double w = 1.0 / static_cast<double>(config.n_sites());
  for (std::size_t x = 0; x < config.n_sites(); ++x) {
    std::uint8_t s = config.label(x);
    if (s > 0) f.set_mass(s, x, w);
  }
  return f;
}

double pair_field(const EmpiricalField& field,
                  const std::vector<std::vector<double>>& g) {
  if (g.size() != static_cast<std::size_t>(field.n_species()))
    throw std::invalid_argument("one test row per species required");
  double s = 0.0;
  for (int a = 1; a <= field.n_species(); ++a) {
    const auto& row = g[a - 1];
    if (row.size() != field.n_sites())
      throw std::invalid_argument("test grid does not match the field");
    for (std::size_t x = 0; x < field.n_sites(); ++x) s += row[x] * field.mass(a, x);
  }
  return s;
}

std::vector<double> block_average(const Configuration& config, std::size_t x,
                                  std::size_t k) {
  std::size_t n = config.n_sites();
  if (2 * k + 1 > n) throw std::invalid_argument("window larger than the torus");
  std::vector<double> counts(config.n_species(), 0.0);
  for (std::size_t d = 0; d <= 2 * k; ++d) {
    std::size_t y = (x + n - k + d) % n;
    std::uint8_t s = config.label(y);
    if (s > 0) counts[s - 1] += 1.0;
  }
  double w = 1.0 / static_cast<double>(2 * k + 1);
  for (double& c : counts) c *= w;
  return counts;
}

LocalObservable::LocalObservable(int n_species, int support, std::vector<double> table)
    : n_species_(n_species), ell_(support), table_(std::move(table)) {
  std::size_t expect = 1;
  for (int i = 0; i < support; ++i) expect *= static_cast<std::size_t>(n_species + 1);
  if (table_.size() != expect)
    throw std::invalid_argument("observable table must cover every pattern once");
}

LocalObservable LocalObservable::from_function(
    int n_species, int support,
    const std::function<double(const std::vector<std::uint8_t>&)>& phi) {
  std::size_t n_pat = 1;
  for (int i = 0; i < support; ++i) n_pat *= static_cast<std::size_t>(n_species + 1);
  std::vector<double> table(n_pat);
  std::vector<std::uint8_t> labels(support);
  for (std::size_t p = 0; p < n_pat; ++p) {
    std::size_t rem = p;
    for (int i = 0; i < support; ++i) {
      labels[i] = static_cast<std::uint8_t>(rem % (n_species + 1));
      rem /= (n_species + 1);
    }
    table[p] = phi(labels);
  }
  return LocalObservable(n_species, support, std::move(table));
}

LocalObservable LocalObservable::indicator(int n_species,
                                           const std::vector<std::uint8_t>& labels) {
  return from_function(n_species, static_cast<int>(labels.size()),
                       [&labels](const std::vector<std::uint8_t>& pat) {
                         return pat == labels ? 1.0 : 0.0;
                       });
}

double LocalObservable::shifted(const Configuration& config, std::size_t y) const {
  std::size_t n = config.n_sites();
  std::size_t pattern = 0;
  std::size_t base = 1;
  for (int i = 0; i < ell_; ++i) {
    pattern += base * config.label((y + i) % n);
    base *= static_cast<std::size_t>(n_species_ + 1);
  }
  return table_[pattern];
}

void LocalObservable::decode(std::size_t pattern, std::vector<std::uint8_t>& labels) const {
  labels.resize(ell_);
  for (int i = 0; i < ell_; ++i) {
    labels[i] = static_cast<std::uint8_t>(pattern % (n_species_ + 1));
    pattern /= (n_species_ + 1);
  }
}

double tilde_phi(const LocalObservable& phi, const std::vector<double>& p) {
  if (p.size() != static_cast<std::size_t>(phi.n_species()))
    throw std::invalid_argument("one density per species required");
  double hole = 1.0;
  for (double v : p) hole -= v;
  double out = 0.0;
  std::vector<std::uint8_t> labels;
  for (std::size_t pat = 0; pat < phi.patterns(); ++pat) {
    double w = phi.value(pat);
    if (w == 0.0) continue;
    phi.decode(pat, labels);
    double prob = 1.0;
    for (std::uint8_t s : labels) prob *= (s == 0) ? hole : p[s - 1];
    out += w * prob;
  }
  return out;
}

double v_statistic(const Configuration& config, const LocalObservable& phi,
                   double epsilon) {
  std::size_t n = config.n_sites();
  auto k = static_cast<std::size_t>(static_cast<double>(n) * epsilon);
  if (k < 1) throw std::invalid_argument("window half-width must cover a site");
  if (2 * k + 1 > n) throw std::invalid_argument("window larger than the torus");

  double w = 1.0 / static_cast<double>(2 * k + 1);
  double v = 0.0;
  std::vector<double> dens(config.n_species());
  for (std::size_t x = 0; x < n; ++x) {
    double avg = 0.0;
    std::fill(dens.begin(), dens.end(), 0.0);
    for (std::size_t d = 0; d <= 2 * k; ++d) {
      std::size_t y = (x + n - k + d) % n;
      avg += phi.shifted(config, y);
      std::uint8_t s = config.label(y);
      if (s > 0) dens[s - 1] += 1.0;
    }
    avg *= w;
    for (double& ds : dens) ds *= w;
    v += std::abs(avg - tilde_phi(phi, dens));
  }
  return v;
}

EmpiricalField smooth(const EmpiricalField& field, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw std::invalid_argument("kernel half-width must lie in (0, 1/2)");
  std::size_t n = field.n_sites();
  auto k = static_cast<std::size_t>(static_cast<double>(n) * epsilon);
  std::size_t window = 2 * k + 1;
  EmpiricalField out(field.n_species(), n);
  double w = 1.0 / static_cast<double>(window);
  for (int a = 1; a <= field.n_species(); ++a) {
    // long double running sum keeps the sliding-window drift below the
    // mass-conservation tolerance even on large lattices
    long double run = 0.0L;
    for (std::size_t d = 0; d < window; ++d) run += field.mass(a, (n - k + d) % n);
    for (std::size_t x = 0; x < n; ++x) {
      out.set_mass(a, x, static_cast<double>(run) * w);
      run -= field.mass(a, (x + n - k) % n);
      run += field.mass(a, (x + k + 1) % n);
    }
  }
  return out;
}

}  // namespace stirlab

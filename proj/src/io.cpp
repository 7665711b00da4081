#include "stirlab/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace stirlab {

namespace {

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("unexpected end of file");
  return v;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_event_log(const EventLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write("STIR", 4);
  put(out, log.version);
  put(out, log.n_sites);
  put(out, log.n_species);
  put(out, log.t_end);
  put(out, log.seed);
  put(out, static_cast<std::uint64_t>(log.events.size()));
  for (const Event& e : log.events) {
    put(out, e.t);
    put(out, e.bond);
    put(out, e.alpha);
    put(out, e.beta);
  }
}

EventLog read_event_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "STIR", 4) != 0)
    throw std::runtime_error("not an event log file");
  EventLog log;
  log.version = get<std::uint32_t>(in);
  log.n_sites = get<std::uint64_t>(in);
  log.n_species = get<std::uint32_t>(in);
  log.t_end = get<double>(in);
  log.seed = get<std::uint64_t>(in);
  auto count = get<std::uint64_t>(in);
  log.events.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Event e;
    e.t = get<double>(in);
    e.bond = get<std::uint32_t>(in);
    e.alpha = get<std::uint8_t>(in);
    e.beta = get<std::uint8_t>(in);
    log.events.push_back(e);
  }
  return log;
}

void write_event_log_jsonl(const EventLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  nlohmann::json header{{"magic", "STIR"},      {"version", log.version},
                        {"n_sites", log.n_sites}, {"n_species", log.n_species},
                        {"t_end", log.t_end},   {"seed", log.seed}};
  out << header.dump() << "\n";
  for (const Event& e : log.events) {
    nlohmann::json row{{"t", e.t}, {"x", e.bond}, {"alpha", e.alpha}, {"beta", e.beta}};
    out << row.dump() << "\n";
  }
}

void write_trajectory_csv(const DensityTrajectory& rho, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,u";
  for (int a = 1; a <= rho.n_species(); ++a) out << ",rho_" << a;
  out << "\n";
  for (std::size_t k = 0; k < rho.k_slices(); ++k) {
    double t = rho.dt() * static_cast<double>(k);
    for (std::size_t j = 0; j < rho.m(); ++j) {
      double u = static_cast<double>(j) / static_cast<double>(rho.m());
      out << fmt_double(t) << "," << fmt_double(u);
      for (int a = 1; a <= rho.n_species(); ++a)
        out << "," << fmt_double(rho.value(k, a, j));
      out << "\n";
    }
  }
}

void write_trajectory_binary(const DensityTrajectory& rho, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  put(out, static_cast<std::uint64_t>(rho.m()));
  put(out, static_cast<std::uint64_t>(rho.k_slices()));
  put(out, static_cast<std::uint32_t>(rho.n_species()));
  put(out, rho.dt());
  const auto& f = rho.field();
  out.write(reinterpret_cast<const char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(double)));
}

DensityTrajectory read_trajectory_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  auto m = get<std::uint64_t>(in);
  auto k = get<std::uint64_t>(in);
  auto n = get<std::uint32_t>(in);
  auto dt = get<double>(in);
  SpaceTimeField field(static_cast<int>(n), m, k, dt);
  in.read(reinterpret_cast<char*>(field.v.data()),
          static_cast<std::streamsize>(field.v.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated trajectory file");
  return DensityTrajectory(std::move(field));
}

void write_field_csv(const EmpiricalField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "u";
  for (int a = 1; a <= field.n_species(); ++a) out << ",rho_" << a;
  out << "\n";
  for (std::size_t x = 0; x < field.n_sites(); ++x) {
    out << fmt_double(static_cast<double>(x) / static_cast<double>(field.n_sites()));
    for (int a = 1; a <= field.n_species(); ++a)
      out << "," << fmt_double(field.density(a, x));
    out << "\n";
  }
}

std::string weight_report_json(const WeightBreakdown& w) {
  nlohmann::json j{{"log_rn_event", w.log_rn_event},
                   {"log_rn_martingale", w.log_rn_martingale},
                   {"jump_term", w.jump_term},
                   {"compensator", w.compensator},
                   {"boundary_terms",
                    {{"initial", w.boundary_initial},
                     {"final", w.boundary_final},
                     {"dt_pairing", w.dt_pairing}}}};
  return j.dump(2);
}

std::string rate_report_json(const RateEvaluation& r, const std::string& gauge,
                             double delta_clip, std::size_t m, std::size_t k,
                             double dt) {
  nlohmann::json j{{"h", r.h},
                   {"I0", r.i0},
                   {"I_total", r.i_total},
                   {"residual", r.residual},
                   {"variational_lb", r.variational_lb},
                   {"gauge", gauge},
                   {"delta_clip", delta_clip},
                   {"clip_magnitude", r.clip_magnitude},
                   {"grid", {{"M", m}, {"K", k}, {"dt", dt}}}};
  return j.dump(2);
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace stirlab

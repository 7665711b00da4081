#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "stirlab/checks.hpp"
#include "stirlab/io.hpp"
#include "stirlab/rng.hpp"

using namespace stirlab;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("/tmp/stirlab_test_") + name;
}

}  // namespace

TEST_CASE("event logs round-trip through the binary format") {
  CounterRng rng(1);
  EventLog log;
  log.n_sites = 64;
  log.n_species = 2;
  log.t_end = 0.5;
  log.seed = 77;
  double t = 0.0;
  for (int i = 0; i < 200; ++i) {
    t += rng.next_exponential(400.0);
    log.events.push_back({t, static_cast<std::uint32_t>(rng.next_u64() % 64),
                          static_cast<std::uint8_t>(rng.next_u64() % 3),
                          static_cast<std::uint8_t>(rng.next_u64() % 3)});
  }
  std::string path = temp_path("events.bin");
  write_event_log(log, path);
  EventLog back = read_event_log(path);
  CHECK(back.n_sites == log.n_sites);
  CHECK(back.n_species == log.n_species);
  CHECK(back.t_end == log.t_end);
  CHECK(back.seed == log.seed);
  REQUIRE(back.events.size() == log.events.size());
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    CHECK(back.events[i].t == log.events[i].t);
    CHECK(back.events[i].bond == log.events[i].bond);
    CHECK(back.events[i].alpha == log.events[i].alpha);
    CHECK(back.events[i].beta == log.events[i].beta);
  }
  std::remove(path.c_str());
}

TEST_CASE("jsonl export carries a header line plus one line per event") {
  EventLog log;
  log.n_sites = 8;
  log.n_species = 2;
  log.t_end = 0.1;
  log.events.push_back({0.05, 3, 1, 0});
  std::string path = temp_path("events.jsonl");
  write_event_log_jsonl(log, path);
  std::ifstream in(path);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    auto parsed = nlohmann::json::parse(line);
    if (lines == 0) {
      CHECK(parsed["magic"] == "STIR");
      CHECK(parsed["n_sites"] == 8);
    } else {
      CHECK(parsed["t"] == 0.05);
      CHECK(parsed["x"] == 3);
    }
    ++lines;
  }
  CHECK(lines == 2);
  std::remove(path.c_str());
}

TEST_CASE("trajectories round-trip through the binary block format") {
  ProfileGrid gamma = checks::bench_profile(16);
  SchemeParams scheme;
  scheme.space_cells = 16;
  scheme.time_slices = 5;
  scheme.t_end = 0.01;
  DensityTrajectory rho = solve_hydro(gamma, PotentialSet::zero(2, 0.01), scheme);

  std::string path = temp_path("traj.bin");
  write_trajectory_binary(rho, path);
  DensityTrajectory back = read_trajectory_binary(path);
  CHECK(back.m() == rho.m());
  CHECK(back.k_slices() == rho.k_slices());
  CHECK(back.dt() == rho.dt());
  for (std::size_t k = 0; k < rho.k_slices(); ++k)
    for (int a = 1; a <= 2; ++a)
      for (std::size_t j = 0; j < rho.m(); ++j)
        CHECK(back.value(k, a, j) == rho.value(k, a, j));
  std::remove(path.c_str());

  std::string csv = temp_path("traj.csv");
  write_trajectory_csv(rho, csv);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,u,rho_1,rho_2");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == rho.k_slices() * rho.m());
  std::remove(csv.c_str());
}

TEST_CASE("field export uses density values") {
  Configuration ones = Configuration::constant(2, 4, 1);
  EmpiricalField f = empirical_density(ones);
  std::string path = temp_path("field.csv");
  write_field_csv(f, path);
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "u,rho_1,rho_2");
  std::getline(in, row);
  CHECK(row == "0,1,0");
  std::remove(path.c_str());
}

TEST_CASE("reports are valid json with the expected fields") {
  WeightBreakdown w;
  w.log_rn_event = 0.25;
  w.log_rn_martingale = 0.25;
  w.jump_term = 1.0;
  w.compensator = 0.75;
  auto parsed = nlohmann::json::parse(weight_report_json(w));
  CHECK(parsed["log_rn_event"] == 0.25);
  CHECK(parsed["boundary_terms"].contains("dt_pairing"));

  RateEvaluation r;
  r.h = 0.1;
  r.i0 = 0.2;
  r.i_total = 0.3;
  auto rate = nlohmann::json::parse(rate_report_json(r, "zero-mean", 1e-6, 64, 33, 0.01));
  CHECK(rate["I_total"] == 0.3);
  CHECK(rate["gauge"] == "zero-mean");
  CHECK(rate["grid"]["M"] == 64);
}

TEST_CASE("fnv hash is stable") {
  CHECK(fnv1a_hash("") == 14695981039346656037ull);
  CHECK(fnv1a_hash("stir") == fnv1a_hash("stir"));
  CHECK(fnv1a_hash("stir") != fnv1a_hash("ring"));
}

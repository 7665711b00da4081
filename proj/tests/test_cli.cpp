#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

std::string binary() {
  const char* bin = std::getenv("STIRLAB_BIN");
  REQUIRE(bin != nullptr);
  return bin;
}

int run(const std::string& args) {
  std::string cmd = binary() + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config() {
  nlohmann::json cfg{
      {"n_species", 2},
      {"profile",
       {{"kind", "fourier"},
        {"grid_points", 64},
        {"species",
         {{{"base", 0.3333},
           {"terms", {{{"m", 1}, {"coef", 0.1}, {"u", "sin"}}}}},
          {{"base", 0.3333},
           {"terms", {{{"m", 1}, {"coef", -0.1}, {"u", "cos"}}}}}}}}},
      {"potentials",
       {{"space_points", 32},
        {"time_points", 1},
        {"species",
         {{{{"m", 1}, {"coef", 0.4}, {"u", "sin"}}},
          {{{"m", 1}, {"coef", -0.3}, {"u", "cos"}}}}}}},
      {"simulate",
       {{"n_sites", 32}, {"t_end", 0.05}, {"smoothing_epsilon", 0.1}}},
      {"hydro",
       {{"space_cells", 32}, {"time_slices", 17}, {"t_end", 0.02}}},
      {"rate", {{"delta_clip", 1e-6}}},
      {"girsanov", {{"n_sites", 8}, {"t_end", 0.05}, {"replicas", 2}}},
      {"blocks",
       {{"phi", "eta1_pair"},
        {"k_values", {1, 2}},
        {"n_values", {10, 20}}}},
      {"sweep",
       {{"command", "simulate"},
        {"n_sites", {8, 16}},
        {"replicas", 2},
        {"t_end", 0.02}}}};
  fs::path path = fs::temp_directory_path() / "stirlab_cli_config.json";
  std::ofstream out(path);
  out << cfg.dump(2);
  return path;
}

}  // namespace

TEST_CASE("cli runs every subcommand and writes manifests") {
  fs::path cfg = write_config();
  fs::path base = fs::temp_directory_path() / "stirlab_cli_out";
  fs::remove_all(base);

  SUBCASE("simulate") {
    fs::path out = base / "sim";
    REQUIRE(run("simulate --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "events.bin"));
    CHECK(fs::exists(out / "density.csv"));
    CHECK(fs::exists(out / "manifest.json"));
    auto manifest = nlohmann::json::parse(file_bytes(out / "manifest.json"));
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest.contains("config_fnv1a"));
  }

  SUBCASE("simulate outputs are reproducible for a fixed seed") {
    fs::path out1 = base / "rep1";
    fs::path out2 = base / "rep2";
    REQUIRE(run("simulate --config " + cfg.string() + " --seed 7 --out " +
                out1.string()) == 0);
    REQUIRE(run("simulate --config " + cfg.string() + " --seed 7 --out " +
                out2.string()) == 0);
    CHECK(file_bytes(out1 / "events.bin") == file_bytes(out2 / "events.bin"));
    CHECK(file_bytes(out1 / "density.csv") == file_bytes(out2 / "density.csv"));

    fs::path out3 = base / "rep3";
    REQUIRE(run("simulate --config " + cfg.string() + " --seed 8 --out " +
                out3.string()) == 0);
    CHECK(file_bytes(out1 / "events.bin") != file_bytes(out3 / "events.bin"));
  }

  SUBCASE("hydro then rate on the stored trajectory") {
    fs::path out = base / "hydro";
    REQUIRE(run("hydro --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "trajectory.bin"));
    CHECK(fs::exists(out / "trajectory.csv"));

    // point the rate command at the emitted trajectory
    auto cfg_json = nlohmann::json::parse(file_bytes(cfg));
    cfg_json["rate"]["trajectory"] = (out / "trajectory.bin").string();
    fs::path cfg2 = fs::temp_directory_path() / "stirlab_cli_config2.json";
    std::ofstream(cfg2) << cfg_json.dump();
    fs::path rout = base / "rate";
    REQUIRE(run("rate --config " + cfg2.string() + " --out " + rout.string()) == 0);
    auto report = nlohmann::json::parse(file_bytes(rout / "rate_report.json"));
    CHECK(report.contains("I0"));
    CHECK(report["gauge"] == "zero-mean");
    CHECK(report["grid"]["M"] == 32);
  }

  SUBCASE("girsanov") {
    fs::path out = base / "gir";
    REQUIRE(run("girsanov --config " + cfg.string() + " --out " + out.string()) == 0);
    auto weights = nlohmann::json::parse(file_bytes(out / "weights.json"));
    REQUIRE(weights.size() == 2);
    CHECK(weights[0].contains("log_rn_event"));
  }

  SUBCASE("blocks") {
    fs::path out = base / "blocks";
    REQUIRE(run("blocks --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "equivalence_gap.csv"));
    CHECK(fs::exists(out / "block_gaps.csv"));
  }

  SUBCASE("sweep") {
    fs::path out = base / "sweep";
    REQUIRE(run("sweep --config " + cfg.string() + " --out " + out.string()) == 0);
    std::string summary = file_bytes(out / "summary.csv");
    CHECK(summary.find("n_sites,replica,events") == 0);
  }

  SUBCASE("verify einstein and equivalence") {
    REQUIRE(run("verify einstein --out " + (base / "ve").string()) == 0);
    REQUIRE(run("verify equivalence --out " + (base / "vq").string()) == 0);
  }

  SUBCASE("schema violations exit nonzero") {
    fs::path bad = fs::temp_directory_path() / "stirlab_bad.json";
    std::ofstream(bad) << "{\"n_species\": 2}";
    CHECK(run("simulate --config " + bad.string() + " --out " +
              (base / "bad").string()) != 0);
  }
}

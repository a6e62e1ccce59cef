#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "rlp/errors.hpp"
#include "rlp/experiments.hpp"
#include "rlp/manifest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using rlp::cli::parse_manifest;
using rlp::cli::run_experiment;
using rlp::cli::RunOutcome;

namespace {

std::string tmp_path(const std::string& name) {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "rlp_exp_ut";
    fs::create_directories(d);
    return d;
  }();
  return (dir / name).string();
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<double> split_csv_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

json read_json(const std::string& path) { return json::parse(read_file(path)); }

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("simulate without noise writes the exact drift line") {
  const std::string out = tmp_path("drift.csv");
  const RunOutcome rc = run_experiment(parse_manifest(
      "command = \"simulate\"\nsteps = 100\ndt = 0.01\nseed = 7\n"
      "v0 = 2.0\nnoise = false\nmode = \"exact\"\nout = \"" + out + "\"\n"));
  CHECK(rc.status == 0);
  REQUIRE(rc.files.size() == 2);  // csv + report

  const std::vector<std::string> lines = read_lines(out);
  REQUIRE(lines.size() == 102);
  CHECK(lines[0] == "t,w,y");
  for (std::size_t k = 0; k <= 100; ++k) {
    const std::vector<double> row = split_csv_row(lines[k + 1]);
    REQUIRE(row.size() == 3);
    const double t = static_cast<double>(k) * 0.01;
    CHECK(row[0] == t);    // %.17g round-trips doubles exactly
    CHECK(row[1] == 2.0);  // velocity never moves without noise
    CHECK(row[2] == doctest::Approx(2.0 * t).epsilon(1e-12));
  }

  const json rep = read_json(out + ".report.json");
  CHECK(rep["command"] == "simulate");
  CHECK(rep["status"] == 0);
  CHECK(rep["seed"] == 7);
  CHECK(rep["results"]["n_steps"] == 100);
  CHECK(rep["manifest"]["steps"] == 100);
  CHECK(rep["manifest"]["noise"] == false);
  CHECK(rep["manifest"]["v0"] == 2.0);  // defaults echoed after filling
  CHECK(rep["files"][0] == out);
  CHECK(rep.contains("wall_time_seconds"));
}

TEST_CASE("one manifest produces byte-identical data files on rerun") {
  const std::string out1 = tmp_path("rerun_a.csv");
  const std::string out2 = tmp_path("rerun_b.csv");
  const std::string tail =
      "command = \"simulate\"\nsteps = 2000\ndt = 1e-3\nseed = 99\n"
      "mode = \"bridge\"\nout = \"";
  run_experiment(parse_manifest(tail + out1 + "\"\n"));
  run_experiment(parse_manifest(tail + out2 + "\"\n"));
  const std::string a = read_file(out1);
  CHECK(a == read_file(out2));
  CHECK(a.size() > 1000);
}

TEST_CASE("simulate can emit the reflected and time-changed views") {
  const std::string out = tmp_path("sim_full.csv");
  const std::string rout = tmp_path("sim_full_reflected.csv");
  const std::string sout = tmp_path("sim_full_stable.csv");
  const RunOutcome rc = run_experiment(parse_manifest(
      "command = \"simulate\"\nsteps = 20000\ndt = 1e-3\nseed = 3\n"
      "out = \"" + out + "\"\nreflected_out = \"" + rout +
      "\"\nstable_out = \"" + sout + "\"\n"));
  CHECK(rc.status == 0);
  REQUIRE(rc.files.size() == 4);

  const std::vector<std::string> rl = read_lines(rout);
  REQUIRE(rl.size() >= 2);
  CHECK(rl[0] == "t_reflected,x,v,source_index");
  const std::vector<std::string> sl = read_lines(sout);
  REQUIRE(sl.size() >= 2);
  CHECK(sl[0] == "local_time,sigma");

  const json rep = read_json(out + ".report.json");
  CHECK(rep["results"]["kept_samples"].get<std::size_t>() > 0);
  CHECK(rep["results"]["kept_samples"].get<std::size_t>() + 1 == rl.size());
  CHECK(rep["results"]["total_local_time"].get<double>() > 0.0);
}

TEST_CASE("stopped run reports its lifetime") {
  const std::string out = tmp_path("stopped.csv");
  const RunOutcome rc = run_experiment(parse_manifest(
      "command = \"simulate\"\nsteps = 1000000\ndt = 1e-3\nseed = 17\n"
      "stopped_from = 1.0\nout = \"" + out + "\"\n"));
  CHECK(rc.status == 0);
  const json rep = read_json(out + ".report.json");
  REQUIRE(rep["results"].contains("lifetime"));
  if (!rep["results"]["lifetime_censored"].get<bool>())
    CHECK(rep["results"]["lifetime"].get<double>() > 0.0);
}

TEST_CASE("excursions ensemble writes per-excursion rows and tail stats") {
  const std::string out = tmp_path("exc.csv");
  const std::string stats = tmp_path("exc_stats.json");
  const RunOutcome rc = run_experiment(parse_manifest(
      "command = \"excursions\"\nsteps = 100000\ndt = 1e-3\nseed = 11\n"
      "replicas = 30\nout = \"" + out + "\"\nstats = \"" + stats + "\"\n"));
  CHECK(rc.status == 0);

  const json st = read_json(stats);
  const std::size_t n_exc = st["n_excursions"].get<std::size_t>();
  CHECK(n_exc > 100);
  CHECK(st["censored_count"].get<std::size_t>() <= 30);
  CHECK(st["discarded_count"] == 0);

  const std::vector<std::string> lines = read_lines(out);
  REQUIRE(!lines.empty());
  CHECK(lines[0] == "replica,start_time,zeta,height,v_end,d_first_zero");
  CHECK(lines.size() == n_exc + 1);

  REQUIRE(st["tails"].contains("heights"));
  REQUIRE(st["tails"].contains("lifetimes"));
  REQUIRE(st["tails"].contains("terminal_speeds"));
  REQUIRE(st["tails"].contains("energy_jumps"));
  const json& hh = st["tails"]["heights"]["hill"];
  REQUIRE(hh.contains("index"));  // enough data for the default k
  CHECK(hh["index"].get<double>() > 0.0);
  CHECK(st["tails"]["heights"]["n"] == n_exc);

  // a rerun of the same manifest reproduces both data files byte for byte
  const std::string out2 = tmp_path("exc2.csv");
  const std::string stats2 = tmp_path("exc_stats2.json");
  run_experiment(parse_manifest(
      "command = \"excursions\"\nsteps = 100000\ndt = 1e-3\nseed = 11\n"
      "replicas = 30\nout = \"" + out2 + "\"\nstats = \"" + stats2 + "\"\n"));
  CHECK(read_file(out) == read_file(out2));
  CHECK(read_file(stats) == read_file(stats2));
}

TEST_CASE("exit law run matches the analytic exit mass and overshoot shape") {
  const std::string out = tmp_path("exit.csv");
  const std::string gof = tmp_path("exit_gof.json");
  const RunOutcome rc = run_experiment(parse_manifest(
      "command = \"exit_law\"\nx = 0.5\neps = 1.0\nreplicas = 3000\n"
      "seed = 9\nout = \"" + out + "\"\ngof = \"" + gof + "\"\n"));
  CHECK(rc.status == 0);

  const json g = read_json(gof);
  CHECK(g["pass"] == true);
  CHECK(g["above_probability_analytic"].get<double>() ==
        doctest::Approx(0.5).epsilon(1e-12));  // symmetric start
  CHECK(std::abs(g["above_probability_z"].get<double>()) <= 4.0);
  CHECK(g["p_value"].get<double>() >= 0.01);
  CHECK(g["n_censored"] == 0);
  CHECK(g["n_windowed"].get<std::size_t>() >= 150);

  const std::vector<std::string> lines = read_lines(out);
  CHECK(lines.size() == 3001);
  CHECK(lines[0] == "x,eps,side,position,steps_used,censored");
}

TEST_CASE("scaling run compares the base and rescaled marginals") {
  const std::string out = tmp_path("scaling.csv");
  const RunOutcome rc = run_experiment(parse_manifest(
      "command = \"scaling\"\nfactor = 4.0\nsteps = 500\ndt = 1e-3\n"
      "seed = 21\nreplicas = 400\nout = \"" + out + "\"\n"));
  CHECK(rc.status == 0);

  const std::vector<std::string> lines = read_lines(out);
  REQUIRE(lines.size() == 801);
  CHECK(lines[0] == "group,value");
  std::size_t n_base = 0, n_rescaled = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].rfind("base,", 0) == 0) ++n_base;
    if (lines[i].rfind("rescaled,", 0) == 0) ++n_rescaled;
  }
  CHECK(n_base == 400);
  CHECK(n_rescaled == 400);

  const json rep = read_json(out + ".report.json");
  CHECK(rep["results"]["kept_index"] == 500);
  CHECK(rep["results"]["base_dt"].get<double>() == 1e-3);
  CHECK(rep["results"]["scaled_dt"].get<double>() == 4e-3);
  CHECK(rep["results"]["reflected_time"].get<double>() ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep["results"]["slide_budget"] == 1000000);
  CHECK(rep["results"]["redraws_base"].get<std::size_t>() < 20);
  CHECK(rep["results"]["redraws_rescaled"].get<std::size_t>() < 20);
  CHECK(rep["results"]["pass"] == true);
  CHECK(rep["results"]["ks_p_value"].get<double>() >= 0.01);

  // the dilated grid step must stay inside the manifest bound for dt
  CHECK_THROWS_AS(
      run_experiment(parse_manifest(
          "command = \"scaling\"\nfactor = 2000.0\nsteps = 500\n"
          "dt = 1e-3\nseed = 21\nreplicas = 400\nout = \"" + out + "\"\n")),
      rlp::config_error);
}

TEST_CASE("dimension run pools zero sets and checks the slope") {
  const std::string out = tmp_path("dimension.csv");
  const RunOutcome rc = run_experiment(parse_manifest(
      "command = \"dimension\"\nsteps = 1000000\ndt = 1e-3\nseed = 5\n"
      "replicas = 5\nexpected_slope = 0.25\nslope_tol = 0.2\n"
      "out = \"" + out + "\"\n"));
  CHECK(rc.status == 0);

  const std::vector<std::string> lines = read_lines(out);
  REQUIRE(lines.size() == 13);  // 12 default scales
  CHECK(lines[0] == "scale,count");

  const json rep = read_json(out + ".report.json");
  CHECK(rep["results"]["pass"] == true);
  const double dim = rep["results"]["dimension"].get<double>();
  CHECK(dim > 0.05);
  CHECK(dim < 0.45);
  CHECK(rep["results"]["n_zero_times"].get<std::size_t>() > 20);
}

TEST_CASE("entrance run fits the probability growth exponent") {
  const std::string out = tmp_path("entrance.csv");
  const RunOutcome rc = run_experiment(parse_manifest(
      "command = \"entrance\"\nxs = [0.04, 0.16]\nreplicas = 1500\n"
      "dt = 1e-3\nseed = 13\nout = \"" + out + "\"\n"));
  CHECK(rc.status == 0);

  const std::vector<std::string> lines = read_lines(out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "x,probability");

  const json rep = read_json(out + ".report.json");
  CHECK(rep["results"]["n_fit_points"] == 2);
  REQUIRE(rep["results"].contains("slope"));
  const double slope = rep["results"]["slope"].get<double>();
  CHECK(slope > 0.03);
  CHECK(slope < 0.35);
  CHECK_FALSE(rep["results"].contains("pass"));  // no expected_slope given
}

TEST_CASE("unknown command objects are rejected before any output") {
  rlp::cli::ExperimentManifest m;
  m.command = "warp";
  CHECK_THROWS_AS(run_experiment(m), rlp::config_error);
}

}  // TEST_SUITE

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "arcroll/hybrid_sim.hpp"
#include "arcroll/telemetry.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace arcroll;
namespace fs = std::filesystem;

namespace {

const std::string kScratch = "cli_scratch";

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
}

int run_cli(const std::string& args, std::string* stdout_text = nullptr,
            std::string* stderr_text = nullptr) {
  fs::create_directories(kScratch);
  const std::string cmd = std::string(ARCROLL_CLI_PATH) + " " + args + " > " + kScratch +
                          "/stdout.txt 2> " + kScratch + "/stderr.txt";
  const int status = std::system(cmd.c_str());
  if (stdout_text) *stdout_text = slurp(kScratch + "/stdout.txt");
  if (stderr_text) *stderr_text = slurp(kScratch + "/stderr.txt");
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const std::string kGaitSchedule =
    R"({"start": {"state": "S1", "theta1_deg": 90, "theta2_deg": 0},
        "segments": [{"arc": "arc1", "from_deg": 90, "to_deg": 180},
                     {"arc": "arc2", "from_deg": 0, "to_deg": 180},
                     {"arc": "arc1", "from_deg": 180, "to_deg": 0},
                     {"arc": "arc2", "from_deg": 180, "to_deg": 0}]})";

size_t count_occurrences(const std::string& text, const std::string& needle) {
  size_t n = 0;
  for (size_t at = text.find(needle); at != std::string::npos;
       at = text.find(needle, at + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("steps command converts degrees using the configured gearing") {
  std::string out;
  CHECK(run_cli("steps --deg 180", &out) == 0);
  CHECK(out == "steps=1200\n");
  CHECK(run_cli("steps --deg -15", &out) == 0);
  CHECK(out == "steps=-100\n");
  CHECK(run_cli("steps --deg 200", &out) == 2);
  CHECK(run_cli("steps", &out) == 2);  // neither --deg nor --schedule
}

TEST_CASE("simulate writes trajectory artifacts and reports events") {
  fs::create_directories(kScratch);
  spit(kScratch + "/gait.json", kGaitSchedule);
  std::string out;
  const int code =
      run_cli("--out " + kScratch + "/a simulate --schedule " + kScratch + "/gait.json", &out);
  CHECK(code == 0);
  CHECK(out.find("samples=64 events=4") == 0);

  const std::string csv = slurp(kScratch + "/a_trajectory.csv");
  CHECK(count_occurrences(csv, "\n") == 65u);  // header + 64 samples
  CHECK(count_occurrences(csv, "IntuitiveEndpoint:") == 4u);
  CHECK(slurp(kScratch + "/a_top.svg").find("<svg") == 0u);
  CHECK(slurp(kScratch + "/a_side.svg").find("<svg") == 0u);

  // identical invocation, different prefix: byte-identical artifacts
  CHECK(run_cli("--out " + kScratch + "/b simulate --schedule " + kScratch + "/gait.json") == 0);
  CHECK(slurp(kScratch + "/b_trajectory.csv") == csv);
  CHECK(slurp(kScratch + "/b_top.svg") == slurp(kScratch + "/a_top.svg"));
}

TEST_CASE("simulate handles empty and ill-posed schedules") {
  fs::create_directories(kScratch);
  spit(kScratch + "/empty.json",
       R"({"start": {"state": "S1", "theta1_deg": 90, "theta2_deg": 0}, "segments": []})");
  std::string out;
  CHECK(run_cli("--out " + kScratch + "/e simulate --schedule " + kScratch + "/empty.json",
                &out) == 0);
  CHECK(out.find("samples=1 events=0") == 0);
  CHECK(count_occurrences(slurp(kScratch + "/e_trajectory.csv"), "\n") == 2u);

  spit(kScratch + "/pivot.json",
       R"({"start": {"state": "S1", "theta1_deg": 90, "theta2_deg": 0},
           "segments": [{"arc": "arc2", "from_deg": 0, "to_deg": 50}]})");
  std::string err;
  CHECK(run_cli("--out " + kScratch + "/p simulate --schedule " + kScratch + "/pivot.json",
                nullptr, &err) == 2);
  CHECK(err.find("pivot arc") != std::string::npos);

  spit(kScratch + "/range.json",
       R"({"start": {"state": "S1", "theta1_deg": 90, "theta2_deg": 0},
           "segments": [{"arc": "arc1", "from_deg": 90, "to_deg": 200}]})");
  CHECK(run_cli("--out " + kScratch + "/r simulate --schedule " + kScratch + "/range.json",
                nullptr, &err) == 2);
  CHECK(err.find("input error") == 0);

  CHECK(run_cli("simulate --schedule " + kScratch + "/no_such_file.json") == 2);
}

TEST_CASE("map writes grid artifacts identically for any worker count") {
  std::string out;
  CHECK(run_cli("--out " + kScratch + "/m1 --workers 1 map --state S1 --res 10", &out) == 0);
  CHECK(out.find("nodes=19x19") == 0);
  CHECK(out.find("no_equilibrium=1") != std::string::npos);
  const std::string csv = slurp(kScratch + "/m1_map.csv");
  CHECK(count_occurrences(csv, "\n") == 362u);
  CHECK(slurp(kScratch + "/m1_map.svg").find("<svg") == 0u);

  CHECK(run_cli("--out " + kScratch + "/m4 --workers 4 map --state S1 --res 10") == 0);
  CHECK(slurp(kScratch + "/m4_map.csv") == csv);
  CHECK(slurp(kScratch + "/m4_map.svg") == slurp(kScratch + "/m1_map.svg"));

  CHECK(run_cli("map --state S7 --res 10") == 2);
  CHECK(run_cli("map --state S1 --res 3") == 2);
}

TEST_CASE("plan compares intuitive and non-intuitive costs") {
  std::string out;
  const int code = run_cli(
      "--out " + kScratch + "/pl plan --from S1 --t1 130 --t2 40 --target S4 --mode both", &out);
  CHECK(code == 0);
  CHECK(out.find("intuitive cost_deg=50 ") == 0);
  CHECK(out.find("non_intuitive cost_deg=5 ") != std::string::npos);
  CHECK(out.find("saves_deg=45") != std::string::npos);
  CHECK(slurp(kScratch + "/pl_plan.txt") == out);

  CHECK(run_cli("plan --from S1 --t1 130 --t2 40 --target S2") == 2);   // not adjacent
  CHECK(run_cli("plan --from S1 --t1 90 --t2 90 --target S4") == 2);    // degenerate start
  CHECK(run_cli("plan --from S1 --t1 130 --t2 40 --target S4 --mode sideways") == 2);
}

TEST_CASE("compare aligns an exported capture against its own trajectory") {
  fs::create_directories(kScratch);
  ControlSchedule sched;
  sched.segments.push_back({ArcId::Arc1, deg_to_rad(90), kPi, deg_to_rad(10)});
  sched.segments.push_back({ArcId::Arc2, 0.0, kPi, deg_to_rad(10)});
  const RobotParams params = RobotParams::prototype();
  const EquilibriumConfig start = solve_equilibrium(
      params, LocomotionState::S1, ControlInput(kPi / 2, 0.0), PivotAnchor{0.0, 0.0});
  const Trajectory traj = run_sequence(params, start, sched);
  {
    std::ofstream out(kScratch + "/sim_trajectory.csv");
    write_trajectory_csv(out, traj);
  }
  {
    std::ofstream out(kScratch + "/capture.csv");
    write_mocap_csv(out, traj, deg_to_rad(10));
  }
  std::string out;
  const int code = run_cli("--out " + kScratch + "/cmp compare --trajectory " + kScratch +
                               "/sim_trajectory.csv --mocap " + kScratch + "/capture.csv",
                           &out);
  CHECK(code == 0);
  // The capture was exported from the same trajectory, so the fitted transform
  // is the identity up to round-off from the CSV round trip.
  REQUIRE(out.find("yaw_deg=") == 0);
  CHECK(std::abs(std::stod(out.substr(8))) < 1e-12);
  REQUIRE(out.find("rmse_mm=") != std::string::npos);
  CHECK(std::stod(out.substr(out.find("rmse_mm=") + 8)) < 1e-9 * 272.5);
  CHECK(out.find("matched=28") != std::string::npos);
  const std::string residuals = slurp(kScratch + "/cmp_residuals.csv");
  REQUIRE(residuals.find("sample,residual_mm\n0,") == 0);
  CHECK(std::stod(residuals.substr(21)) < 1e-9 * 272.5);

  CHECK(run_cli("compare --trajectory " + kScratch + "/sim_trajectory.csv --mocap " + kScratch +
                "/sim_trajectory.csv") == 2);  // wrong format
}

TEST_CASE("impact finds the settling time from an IMU file") {
  fs::create_directories(kScratch);
  std::vector<ImuSample> samples;
  const double lambda = std::log(80.0) / 5.0;
  for (int i = 0; i < 2000; ++i) {
    const double t = i / 200.0;
    ImuSample s;
    s.time_s = t;
    s.accel_ms2 = Vec3(0.0, 0.0, 9.81);
    if (t >= 2.0) {
      const double u = t - 2.0;
      s.accel_ms2.x() += 40.0 * std::exp(-lambda * u) * std::sin(2.0 * kPi * 3.0 * u);
    }
    samples.push_back(s);
  }
  {
    std::ofstream out(kScratch + "/imu.csv");
    write_imu_csv(out, samples);
  }
  std::string out;
  CHECK(run_cli("--out " + kScratch + "/imp impact --imu " + kScratch + "/imu.csv", &out) == 0);
  REQUIRE(out.find("impact_time_s=") == 0);
  CHECK(std::stod(out.substr(14)) == doctest::Approx(2.005).epsilon(0.03));
  REQUIRE(out.find("settle_duration_s=") != std::string::npos);
  const double settle = std::stod(out.substr(out.find("settle_duration_s=") + 18));
  CHECK(settle > 4.8);
  CHECK(settle < 5.2);
  CHECK(slurp(kScratch + "/imp_impact.txt") == out);

  std::vector<ImuSample> flat(samples.begin(), samples.begin() + 300);
  {
    std::ofstream out_f(kScratch + "/flat.csv");
    write_imu_csv(out_f, flat);
  }
  std::string err;
  CHECK(run_cli("impact --imu " + kScratch + "/flat.csv", nullptr, &err) == 3);
  CHECK(err.find("solver error") == 0);
}

TEST_CASE("steps converts a whole schedule to a command file") {
  fs::create_directories(kScratch);
  spit(kScratch + "/gait2.json", kGaitSchedule);
  std::string out;
  CHECK(run_cli("--out " + kScratch + "/st steps --schedule " + kScratch + "/gait2.json",
                &out) == 0);
  CHECK(out.find("commands=4") == 0);
  const std::string csv = slurp(kScratch + "/st_steps.csv");
  CHECK(csv.find("arc,steps,rate_sps\narc1,600,") == 0);
  CHECK(count_occurrences(csv, "\n") == 5u);
}

TEST_CASE("config problems exit with the input error code") {
  fs::create_directories(kScratch);
  spit(kScratch + "/bad.json", R"({"radius_mm": 272.5, "bogus": 1})");
  std::string err;
  CHECK(run_cli("--config " + kScratch + "/bad.json steps --deg 10", nullptr, &err) == 2);
  CHECK(err.find("input error") == 0);
  CHECK(run_cli("--config " + kScratch + "/no_config.json steps --deg 10") == 2);
  CHECK(run_cli("definitely-not-a-command") == 2);
}

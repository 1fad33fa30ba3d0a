#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "egaa/csv.hpp"
#include "egaa/ode.hpp"
#include "egaa/rng.hpp"

using namespace egaa;
namespace fs = std::filesystem;

TEST_CASE("format_double is shortest round-trip") {
  SUBCASE("random magnitudes parse back bit-exactly") {
    Rng rng(99);
    for (int trial = 0; trial < 2000; ++trial) {
      const double mag = std::pow(10.0, rng.uniform(-300.0, 300.0));
      const double v = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.normal() * mag;
      const std::string s = format_double(v);
      const double back = std::strtod(s.c_str(), nullptr);
      CHECK(back == v);
    }
  }
  SUBCASE("specials") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.1) == "0.1");  // not 0.1000000000000000055...
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(std::strtod(format_double(inf).c_str(), nullptr) == inf);
    CHECK(std::isnan(std::strtod(
        format_double(std::numeric_limits<double>::quiet_NaN()).c_str(), nullptr)));
  }
}

TEST_CASE("trace csv round trip") {
  std::vector<IterationRecord> records;
  for (long k = 1; k <= 4; ++k) {
    IterationRecord r;
    r.k = k;
    r.f_value = 1.0 / (3.0 * k);
    r.grad_norm = std::pow(10.0, -k);
    if (k % 2 == 0) {
      StepDiagnostics d;
      d.effective_mass_M = 0.5 + 0.1 * k;
      d.delta_M = 0.01 * k;
      d.guard_rho = 1.0;
      d.damping_c = 2.0 / k;
      d.gain_delta = 0.9;
      d.consistency_sum = 1.0 - 0.001 * k;
      r.diagnostics = d;
    }
    r.wall_nanos = 1000 + k;
    records.push_back(r);
  }

  const auto path = (fs::temp_directory_path() / "egaa_trace_rt.csv").string();
  write_trace_csv(path, records);
  const auto back = read_trace_csv(path);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].k == records[i].k);
    CHECK(back[i].f_value == records[i].f_value);
    CHECK(back[i].grad_norm == records[i].grad_norm);
    CHECK(back[i].diagnostics.has_value() == records[i].diagnostics.has_value());
    if (records[i].diagnostics) {
      CHECK(back[i].diagnostics->effective_mass_M ==
            records[i].diagnostics->effective_mass_M);
      CHECK(back[i].diagnostics->damping_c == records[i].diagnostics->damping_c);
      CHECK(back[i].diagnostics->consistency_sum ==
            records[i].diagnostics->consistency_sum);
    }
    CHECK(back[i].wall_nanos == 0);  // zeroed on disk
  }

  SUBCASE("header is the documented schema") {
    std::ostringstream os;
    write_trace_csv(os, records);
    const std::string header = os.str().substr(0, os.str().find('\n'));
    CHECK(header ==
          "k,f,grad_norm,M_eff,delta_M,rho,c_k,gain_delta,consistency_sum,wall_nanos");
  }
}

TEST_CASE("iterates csv round trip") {
  Rng rng(17);
  std::vector<Eigen::VectorXd> xs;
  for (int k = 0; k < 5; ++k) xs.push_back(rng.normal_vector(3));
  const auto path = (fs::temp_directory_path() / "egaa_iter_rt.csv").string();
  write_iterates_csv(path, xs);
  const auto back = read_iterates_csv(path);
  REQUIRE(back.size() == xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(back[i] == xs[i]);
}

TEST_CASE("trajectory csv schema") {
  std::vector<OdeState> traj(2);
  traj[0].t = 0.0;
  traj[0].x = Eigen::Vector2d(1.0, 2.0);
  traj[0].v = Eigen::Vector2d(0.0, 0.0);
  traj[1].t = 0.5;
  traj[1].x = Eigen::Vector2d(0.9, 1.9);
  traj[1].v = Eigen::Vector2d(-0.2, -0.2);
  traj[1].energy_E = 1.5;
  traj[1].dissipation = -0.25;
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  std::istringstream is(os.str());
  std::string header, row0, row1;
  std::getline(is, header);
  std::getline(is, row0);
  std::getline(is, row1);
  CHECK(header == "t,x0,x1,v_norm,energy_E,dissipation_rate");
  CHECK(row1.rfind("0.5,0.9,1.9,", 0) == 0);
}

#include "doctest.h"

#include <cmath>
#include <cstdint>

#include "lawnma/rng.hpp"
#include "lawnma/scenario.hpp"

using namespace lawnma;

TEST_CASE("scenario: full-scale defaults") {
  const Scenario s = default_scenario();
  CHECK(s.mission_period_s == doctest::Approx(40.0));
  CHECK(s.num_slots == 20);
  CHECK(s.slot_duration_s == doctest::Approx(2.0));
  CHECK(s.num_users == 4);
  CHECK(s.altitude_m == doctest::Approx(50.0));
  CHECK(s.area_side_m == doctest::Approx(800.0));
  CHECK(s.v_max_mps == doctest::Approx(30.0));
  CHECK(s.a_max_mps2 == doctest::Approx(10.0));
  CHECK(s.num_antennas == 4);
  CHECK(s.region_side_m == doctest::Approx(0.4));
  CHECK(s.min_spacing_m == doctest::Approx(0.05));
  CHECK(s.wavelength_m == doctest::Approx(0.1));
  CHECK(s.num_paths == 4);
  CHECK(s.rician_kappa == doctest::Approx(15.0));
  CHECK(s.reference_gain == doctest::Approx(1e-6));
  CHECK(s.noise_power_w == doctest::Approx(1e-14));
  CHECK(s.p_max_w == doctest::Approx(1.0));
  CHECK(s.pso.num_particles == 100);
  CHECK(s.pso.max_iters == 100);
  CHECK(s.pso.l1 == doctest::Approx(1.4));
  CHECK(s.pso.l2 == doctest::Approx(1.4));
  CHECK(s.pso.chi_min == doctest::Approx(0.4));
  CHECK(s.pso.chi_max == doctest::Approx(0.9));
  CHECK(s.pso.penalty == doctest::Approx(20.0));
  CHECK(s.sca_phi0() == doctest::Approx(30.0));  // v_max * tau / 2
  CHECK(validate(s).ok());
}

TEST_CASE("scenario: desk preset is lighter and valid") {
  const Scenario s = desk_scenario();
  CHECK(s.num_slots == 10);
  CHECK(s.pso.num_particles == 40);
  CHECK(s.pso.max_iters == 40);
  // discrete endpoint reachability: (N-1) hops of v_max * tau
  const double span = (s.end_position - s.start_position).norm();
  CHECK(span <= s.v_max_mps * s.slot_duration_s * (s.num_slots - 1));
  CHECK(validate(s).ok());
}

TEST_CASE("scenario: dB round trips") {
  for (double db : {-110.0, -60.0, -30.0, 0.0, 10.0, 27.5}) {
    CHECK(linear_to_db(db_to_linear(db)) == doctest::Approx(db).epsilon(1e-12));
  }
  CHECK(db_to_linear(-60.0) == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK(dbm_to_watts(-110.0) == doctest::Approx(1e-14).epsilon(1e-12));
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(watts_to_dbm(dbm_to_watts(-73.25)) == doctest::Approx(-73.25).epsilon(1e-12));
}

TEST_CASE("scenario: construction is deterministic") {
  const Scenario a = materialized(default_scenario());
  const Scenario b = materialized(default_scenario());
  REQUIRE(a.user_positions.size() == b.user_positions.size());
  REQUIRE(a.user_positions.size() == static_cast<std::size_t>(a.num_users));
  for (std::size_t i = 0; i < a.user_positions.size(); ++i) {
    CHECK(a.user_positions[i].x() == b.user_positions[i].x());
    CHECK(a.user_positions[i].y() == b.user_positions[i].y());
    CHECK(a.user_positions[i].x() >= 0.0);
    CHECK(a.user_positions[i].x() <= a.area_side_m);
    CHECK(a.user_positions[i].y() >= 0.0);
    CHECK(a.user_positions[i].y() <= a.area_side_m);
  }
  // materialization is idempotent
  const Scenario c = materialized(a);
  CHECK(c.user_positions[0].x() == a.user_positions[0].x());
}

TEST_CASE("scenario: validation failures") {
  SUBCASE("endpoint unreachable") {
    Scenario s = default_scenario();
    s.v_max_mps = 1.0;  // 40 m total budget, 1131 m needed
    const auto rep = validate(s);
    CHECK_FALSE(rep.ok());
    bool found = false;
    for (const auto& f : rep.failures) found |= f.find("endpoint unreachable") != std::string::npos;
    CHECK(found);
  }
  SUBCASE("placement infeasible") {
    Scenario s = default_scenario();
    s.min_spacing_m = 10.0 * s.region_side_m;
    const auto rep = validate(s);
    CHECK_FALSE(rep.ok());
    bool found = false;
    for (const auto& f : rep.failures) found |= f.find("placement infeasible") != std::string::npos;
    CHECK(found);
  }
  SUBCASE("two antennas on the diagonal are allowed") {
    Scenario s = default_scenario();
    s.num_antennas = 2;
    s.min_spacing_m = 1.3 * s.region_side_m;  // below sqrt(2) * L
    CHECK(validate(s).ok());
  }
  SUBCASE("bad slot count") {
    Scenario s = default_scenario();
    s.num_slots = 1;
    CHECK_FALSE(validate(s).ok());
  }
  SUBCASE("deadband schedule") {
    Scenario s = default_scenario();
    s.ao.placement_deadband = -0.1;
    CHECK_FALSE(validate(s).ok());
    s = default_scenario();
    s.ao.placement_deadband_growth = 0.9;  // a falling bar re-enables the crawl
    CHECK_FALSE(validate(s).ok());
  }
}

TEST_CASE("scenario: json config loading") {
  const char* text = R"({
    "num_slots": 8,
    "mission_period_s": 48.0,
    "num_users": 2,
    "user_positions": [[100.0, 200.0], [300.0, 400.0]],
    "reference_gain_db": -60.0,
    "noise_power_dbm": -110.0,
    "rng_seed": 7,
    "pso": {"num_particles": 10, "max_iters": 5},
    "ao": {"placement_deadband": 0.1, "placement_deadband_growth": 1.5}
  })";
  const Scenario s = load_scenario_json(text);
  CHECK(s.num_slots == 8);
  CHECK(s.slot_duration_s == doctest::Approx(6.0));
  CHECK(s.num_users == 2);
  CHECK(s.user_positions.size() == 2);
  CHECK(s.user_positions[1].y() == doctest::Approx(400.0));
  CHECK(s.reference_gain == doctest::Approx(1e-6));
  CHECK(s.noise_power_w == doctest::Approx(1e-14));
  CHECK(s.rng_seed == 7);
  CHECK(s.pso.num_particles == 10);
  CHECK(s.pso.l1 == doctest::Approx(1.4));  // untouched default
  CHECK(s.ao.placement_deadband == doctest::Approx(0.1));
  CHECK(s.ao.placement_deadband_growth == doctest::Approx(1.5));
}

TEST_CASE("scenario: unknown config keys rejected") {
  CHECK_THROWS((void)load_scenario_json(R"({"nmu_slots": 8})"));
  CHECK_THROWS((void)load_scenario_json(R"({"pso": {"swarm": 3}})"));
  CHECK_THROWS((void)load_scenario_json("not json"));
}

TEST_CASE("rng: substreams are deterministic and distinct") {
  Rng a(derive_seed(7, stream::kPathOffsets, 2));
  Rng b(derive_seed(7, stream::kPathOffsets, 2));
  Rng c(derive_seed(7, stream::kPathOffsets, 3));
  bool all_equal = true;
  bool any_equal_cross = false;
  for (int i = 0; i < 32; ++i) {
    const double va = a.uniform(), vb = b.uniform(), vc = c.uniform();
    all_equal &= (va == vb);
    any_equal_cross |= (va == vc);
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_cross);
}

TEST_CASE("rng: distribution sanity") {
  Rng r(123);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));

  double csum = 0.0;
  for (int i = 0; i < n; ++i) csum += std::norm(r.cnormal());
  CHECK(csum / n == doctest::Approx(1.0).epsilon(0.02));
}

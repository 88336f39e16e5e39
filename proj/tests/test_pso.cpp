#include "doctest.h"

#include <cmath>

#include "lawnma/ma_pso.hpp"
#include "lawnma/rate.hpp"
#include "lawnma/rng.hpp"

using namespace lawnma;

namespace {

Scenario pso_scenario(int antennas, int users) {
  Scenario s = default_scenario();
  s.num_users = users;
  s.user_positions.clear();
  for (int m = 0; m < users; ++m) {
    s.user_positions.emplace_back(150.0 + 300.0 * m, 500.0 - 150.0 * m);
  }
  s.num_antennas = antennas;
  s.num_paths = 2;
  s.pso.num_particles = 24;
  s.pso.max_iters = 30;
  s.rng_seed = 11;
  return s;
}

struct SlotSetup {
  ChannelModel model;
  SlotContext ctx;
  Eigen::MatrixXcd W;
  Eigen::VectorXd p;
};

SlotSetup make_setup(const Scenario& s, const MALayout& reference) {
  ChannelModel model(s);
  SlotContext ctx = make_slot_context(model, Vec2(400.0, 300.0));
  const Eigen::MatrixXcd H = channels_for_layout(ctx, reference);
  Eigen::MatrixXcd W(s.num_antennas, s.num_users);
  for (int m = 0; m < s.num_users; ++m) W.col(m) = H.col(m).normalized();
  Eigen::VectorXd p = Eigen::VectorXd::Constant(s.num_users, s.p_max_w);
  return SlotSetup{std::move(model), std::move(ctx), std::move(W), std::move(p)};
}

}  // namespace

TEST_CASE("pso: layout flattening") {
  MALayout l{{Vec2(0.1, 0.2), Vec2(0.3, 0.05)}};
  const Eigen::VectorXd v = flatten_layout(l);
  REQUIRE(v.size() == 4);
  CHECK(v(0) == 0.1);
  CHECK(v(1) == 0.2);
  CHECK(v(2) == 0.3);
  CHECK(v(3) == 0.05);
  const MALayout back = unflatten_layout(v);
  REQUIRE(back.positions.size() == 2);
  CHECK(back.positions[1].x() == 0.3);
  CHECK(back.positions[1].y() == 0.05);
}

TEST_CASE("pso: spacing violations") {
  CHECK(count_violations(MALayout{{Vec2(0, 0), Vec2(0.2, 0.2)}}, 0.05) == 0);
  CHECK(count_violations(MALayout{{Vec2(0, 0), Vec2(0.03, 0.0)}}, 0.05) == 1);
  CHECK(count_violations(MALayout{{Vec2(0, 0), Vec2(0.01, 0), Vec2(0, 0.01)}}, 0.05) == 3);
  CHECK(count_violations(MALayout{{Vec2(0, 0)}}, 0.05) == 0);
}

TEST_CASE("pso: fitness equals penalized slot rate") {
  const Scenario s = pso_scenario(2, 2);
  MALayout good{{Vec2(0.05, 0.1), Vec2(0.3, 0.25)}};
  const SlotSetup setup = make_setup(s, good);

  const Eigen::MatrixXcd H = channels_for_layout(setup.ctx, good);
  const double rate = slot_sum_rate(setup.W, setup.p, H, s.noise_power_w);
  CHECK(pso_fitness(setup.ctx, good, setup.W, setup.p, s.pso.penalty, s.min_spacing_m) ==
        doctest::Approx(rate).epsilon(1e-12));

  MALayout bad{{Vec2(0.1, 0.1), Vec2(0.12, 0.1)}};
  const Eigen::MatrixXcd Hb = channels_for_layout(setup.ctx, bad);
  const double rate_b = slot_sum_rate(setup.W, setup.p, Hb, s.noise_power_w);
  CHECK(pso_fitness(setup.ctx, bad, setup.W, setup.p, s.pso.penalty, s.min_spacing_m) ==
        doctest::Approx(rate_b - s.pso.penalty).epsilon(1e-12));
}

TEST_CASE("pso: inertia schedule") {
  CHECK(pso_inertia(0, 100, 0.4, 0.9) == doctest::Approx(0.9));
  CHECK(pso_inertia(100, 100, 0.4, 0.9) == doctest::Approx(0.4));
  CHECK(pso_inertia(50, 100, 0.4, 0.9) == doctest::Approx(0.65));
}

TEST_CASE("pso: velocity and position steps") {
  PsoParticle p;
  p.pos = Eigen::VectorXd::Constant(1, 0.1);
  p.vel = Eigen::VectorXd::Constant(1, 0.02);
  p.best_pos = Eigen::VectorXd::Constant(1, 0.2);
  Eigen::VectorXd global = Eigen::VectorXd::Constant(1, 0.3);

  SUBCASE("hand-computed update") {
    pso_step_velocity(p, global, 0.5, 1.0, 2.0, 0.5, 0.25, 1.0);
    CHECK(p.vel(0) == doctest::Approx(0.16).epsilon(1e-12));
  }
  SUBCASE("component clamp") {
    pso_step_velocity(p, global, 0.5, 1.0, 2.0, 0.5, 0.25, 0.1);
    CHECK(p.vel(0) == doctest::Approx(0.1));  // 0.16 clipped from above
    pso_step_velocity(p, global, -20.0, 1.0, 2.0, 0.5, 0.25, 0.1);
    CHECK(p.vel(0) == doctest::Approx(-0.1));  // -1.85 clipped from below
  }
  SUBCASE("position clamp") {
    p.vel = Eigen::VectorXd::Constant(1, 0.5);
    pso_step_position(p, 0.4);
    CHECK(p.pos(0) == doctest::Approx(0.4));
    p.vel = Eigen::VectorXd::Constant(1, -2.0);
    pso_step_position(p, 0.4);
    CHECK(p.pos(0) == doctest::Approx(0.0));
  }
}

TEST_CASE("pso: slot solver") {
  const Scenario s = pso_scenario(2, 2);
  MALayout incumbent{{Vec2(0.0, 0.0), Vec2(0.0, 0.05)}};
  const SlotSetup setup = make_setup(s, incumbent);

  SUBCASE("deterministic under the seed and never worse than the incumbent") {
    const PsoSlotResult a = pso_solve_slot(setup.ctx, incumbent, setup.W, setup.p, s, 42);
    const PsoSlotResult b = pso_solve_slot(setup.ctx, incumbent, setup.W, setup.p, s, 42);
    REQUIRE(a.layout.positions.size() == b.layout.positions.size());
    for (std::size_t k = 0; k < a.layout.positions.size(); ++k) {
      CHECK(a.layout.positions[k] == b.layout.positions[k]);
    }
    CHECK(count_violations(a.layout, s.min_spacing_m) == 0);
    const double inc_fit =
        pso_fitness(setup.ctx, incumbent, setup.W, setup.p, s.pso.penalty, s.min_spacing_m);
    const double out_fit =
        pso_fitness(setup.ctx, a.layout, setup.W, setup.p, s.pso.penalty, s.min_spacing_m);
    CHECK(out_fit >= inc_fit - 1e-12);
    // a crowded corner start leaves plenty of room to improve
    CHECK(out_fit > inc_fit);
    // positions stay inside the region
    for (const auto& u : a.layout.positions) {
      CHECK(u.x() >= 0.0);
      CHECK(u.x() <= s.region_side_m);
      CHECK(u.y() >= 0.0);
      CHECK(u.y() <= s.region_side_m);
    }
  }
  SUBCASE("best-fitness trace is monotone") {
    const PsoSlotResult res = pso_solve_slot(setup.ctx, incumbent, setup.W, setup.p, s, 7);
    REQUIRE(res.best_trace.size() == static_cast<std::size_t>(s.pso.max_iters) + 1);
    for (std::size_t i = 1; i < res.best_trace.size(); ++i) {
      CHECK(res.best_trace[i] >= res.best_trace[i - 1]);
    }
  }
  SUBCASE("per-coordinate draws change the search but stay deterministic") {
    Scenario pc = s;
    pc.pso.per_coordinate_rand = true;
    const PsoSlotResult a = pso_solve_slot(setup.ctx, incumbent, setup.W, setup.p, pc, 42);
    const PsoSlotResult b = pso_solve_slot(setup.ctx, incumbent, setup.W, setup.p, pc, 42);
    for (std::size_t k = 0; k < a.layout.positions.size(); ++k) {
      CHECK(a.layout.positions[k] == b.layout.positions[k]);
    }
    CHECK(count_violations(a.layout, pc.min_spacing_m) == 0);
  }
  SUBCASE("infeasible winners fall back to the incumbent") {
    Scenario hard = s;
    hard.min_spacing_m = 0.54;  // only near-diagonal corner pairs qualify
    hard.pso.penalty = 0.0;     // nothing discourages violations
    MALayout corners{{Vec2(0.0, 0.0), Vec2(0.4, 0.4)}};
    const PsoSlotResult res = pso_solve_slot(setup.ctx, corners, setup.W, setup.p, hard, 3);
    if (res.fell_back) {
      for (std::size_t k = 0; k < corners.positions.size(); ++k) {
        CHECK(res.layout.positions[k] == corners.positions[k]);
      }
    }
    CHECK(count_violations(res.layout, hard.min_spacing_m) == 0);
  }
}

TEST_CASE("pso: single antenna approaches the sampled optimum") {
  const Scenario s = [] {
    Scenario sc = pso_scenario(1, 1);
    sc.pso.num_particles = 30;
    sc.pso.max_iters = 60;
    return sc;
  }();
  MALayout incumbent{{Vec2(0.2, 0.2)}};
  const SlotSetup setup = make_setup(s, incumbent);

  double grid_best = -1e300;
  const int grid = 41;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      MALayout cand{{Vec2(s.region_side_m * i / (grid - 1), s.region_side_m * j / (grid - 1))}};
      grid_best = std::max(grid_best, pso_fitness(setup.ctx, cand, setup.W, setup.p,
                                                  s.pso.penalty, s.min_spacing_m));
    }
  }
  const PsoSlotResult res = pso_solve_slot(setup.ctx, incumbent, setup.W, setup.p, s, 99);
  const double fit =
      pso_fitness(setup.ctx, res.layout, setup.W, setup.p, s.pso.penalty, s.min_spacing_m);
  CHECK(fit >= grid_best - 0.05);
}

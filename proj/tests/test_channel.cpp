#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "lawnma/channel.hpp"

using namespace lawnma;
using std::numbers::pi;

namespace {

Scenario tiny_scenario() {
  Scenario s = default_scenario();
  s.num_users = 2;
  s.user_positions = {Vec2(100.0, 200.0), Vec2(500.0, 300.0)};
  s.num_antennas = 2;
  s.num_paths = 3;
  return s;
}

}  // namespace

TEST_CASE("channel: distances") {
  CHECK(distance(Vec2(0, 0), Vec2(0, 0), 50.0) == doctest::Approx(50.0));
  CHECK(distance(Vec2(30, 40), Vec2(0, 0), 50.0) == doctest::Approx(70.7107).epsilon(1e-4));
  CHECK(distance(Vec2(0, 100), Vec2(0, 0), 50.0) == doctest::Approx(111.8034).epsilon(1e-4));
}

TEST_CASE("channel: nominal angles") {
  SUBCASE("directly overhead") {
    const auto [theta, phi] = nominal_angles(Vec2(0, 0), Vec2(0, 0), 50.0);
    CHECK(theta == doctest::Approx(pi / 2));
    CHECK(phi == doctest::Approx(0.0));
  }
  SUBCASE("3-4-5 offset") {
    const auto [theta, phi] = nominal_angles(Vec2(30, 40), Vec2(0, 0), 50.0);
    CHECK(theta == doctest::Approx(pi / 4).epsilon(1e-10));
    CHECK(phi == doctest::Approx(0.6435011088).epsilon(1e-8));
  }
  SUBCASE("along +y") {
    const auto [theta, phi] = nominal_angles(Vec2(0, 100), Vec2(0, 0), 50.0);
    CHECK(theta == doctest::Approx(0.46364761).epsilon(1e-6));
    CHECK(phi == doctest::Approx(0.0));
  }
  SUBCASE("sign of the x offset") {
    const auto [theta_p, phi_p] = nominal_angles(Vec2(30, 40), Vec2(0, 0), 50.0);
    const auto [theta_m, phi_m] = nominal_angles(Vec2(-30, 40), Vec2(0, 0), 50.0);
    CHECK(theta_p == doctest::Approx(theta_m));
    CHECK(phi_m == doctest::Approx(-phi_p));
    // the direction reconstructs from (cos phi, sin phi)
    CHECK(std::cos(phi_m) == doctest::Approx(40.0 / 50.0));
    CHECK(std::sin(phi_m) == doctest::Approx(-30.0 / 50.0));
  }
  SUBCASE("unsigned mode collapses the quadrants") {
    const auto [theta, phi] = nominal_angles(Vec2(-30, 40), Vec2(0, 0), 50.0, true);
    (void)theta;
    CHECK(phi == doctest::Approx(0.6435011088).epsilon(1e-8));
  }
}

TEST_CASE("channel: path angle sampling") {
  SUBCASE("zero spread reproduces the nominals") {
    Rng rng(3);
    const PathAngles a = sample_path_angles(rng, 0.7, -0.2, 0.0, 5);
    for (int i = 0; i < 5; ++i) {
      CHECK(a.theta(i) == doctest::Approx(0.7));
      CHECK(a.phi(i) == doctest::Approx(-0.2));
    }
  }
  SUBCASE("offsets stay inside the spread") {
    Rng rng(11);
    const double spread = 0.3;
    const PathAngles a = sample_path_angles(rng, 1.0, 0.5, spread, 64);
    for (int i = 0; i < 64; ++i) {
      CHECK(std::abs(a.theta(i) - 1.0) <= spread / 2);
      CHECK(std::abs(a.phi(i) - 0.5) <= spread / 2);
    }
  }
  SUBCASE("seeded draws repeat") {
    Rng r1(7), r2(7);
    const PathAngles a = sample_path_angles(r1, 1.0, 0.5, 0.3, 8);
    const PathAngles b = sample_path_angles(r2, 1.0, 0.5, 0.3, 8);
    for (int i = 0; i < 8; ++i) {
      CHECK(a.theta(i) == b.theta(i));
      CHECK(a.phi(i) == b.phi(i));
    }
  }
}

TEST_CASE("channel: phase difference") {
  CHECK(phase_difference(Vec2(0, 0), 1.1, 2.2) == 0.0);
  CHECK(phase_difference(Vec2(0.1, 0.2), pi / 4, pi / 3) ==
        doctest::Approx(0.157829826).epsilon(1e-8));
  // half-wavelength offset along the arrival direction
  CHECK(phase_difference(Vec2(0.05, 0.0), pi / 2, 0.0) == doctest::Approx(0.05));
}

TEST_CASE("channel: receive field-response vector") {
  PathAngles ang;
  ang.theta = Eigen::ArrayXd::Constant(3, pi / 2);
  ang.phi = Eigen::ArrayXd::Zero(3);
  SUBCASE("origin gives all ones") {
    const Eigen::ArrayXcd g = receive_frv(Vec2(0, 0), ang, 0.1);
    for (int i = 0; i < 3; ++i) {
      CHECK(g(i).real() == doctest::Approx(1.0));
      CHECK(g(i).imag() == doctest::Approx(0.0));
    }
  }
  SUBCASE("unit modulus everywhere") {
    Rng rng(5);
    PathAngles r;
    r.theta = Eigen::ArrayXd::NullaryExpr(4, [&](int) { return rng.uniform(0.1, 1.5); });
    r.phi = Eigen::ArrayXd::NullaryExpr(4, [&](int) { return rng.uniform(-3.0, 3.0); });
    const Eigen::ArrayXcd g = receive_frv(Vec2(0.123, 0.321), r, 0.1);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(g(i)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("half-wavelength offset flips the sign") {
    const Eigen::ArrayXcd g = receive_frv(Vec2(0.05, 0.0), ang, 0.1);
    CHECK(g(0).real() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(g(0).imag()) < 1e-12);
  }
}

TEST_CASE("channel: small-scale response") {
  SUBCASE("dominant line of sight") {
    Rng rng(1);
    const PathResponse r = path_response(rng, 4e-10, 1e12, 1);
    CHECK(std::abs(r.sigma(0)) == doctest::Approx(std::sqrt(4e-10)).epsilon(1e-6));
    CHECK(r.sigma(0).imag() == doctest::Approx(0.0));
  }
  SUBCASE("average energy matches the distance law") {
    // E[sum_i |sigma_i|^2] = alpha for paths >= 2
    Rng rng(42);
    const double alpha = 2.5e-9;
    const int paths = 4, draws = 100000;
    double acc = 0.0;
    for (int d = 0; d < draws; ++d) {
      const PathResponse r = path_response(rng, alpha, 15.0, paths);
      acc += r.sigma.abs2().sum();
    }
    CHECK(acc / draws == doctest::Approx(alpha).epsilon(0.02));
  }
  SUBCASE("seeded draws repeat") {
    Rng r1(9), r2(9);
    const PathResponse a = path_response(r1, 1e-9, 15.0, 4);
    const PathResponse b = path_response(r2, 1e-9, 15.0, 4);
    for (int i = 0; i < 4; ++i) CHECK(a.sigma(i) == b.sigma(i));
  }
}

TEST_CASE("channel: channel vector") {
  SUBCASE("single antenna, single path, origin") {
    MALayout layout{{Vec2(0, 0)}};
    PathAngles ang;
    ang.theta = Eigen::ArrayXd::Constant(1, 0.8);
    ang.phi = Eigen::ArrayXd::Constant(1, 0.3);
    PathResponse resp;
    resp.sigma = Eigen::ArrayXcd::Constant(1, cd(3e-5, -4e-5));
    resp.alpha = 2.5e-9;
    const Eigen::VectorXcd h = channel_vector(layout, ang, resp, 0.1);
    CHECK(h(0).real() == doctest::Approx(3e-5));
    CHECK(h(0).imag() == doctest::Approx(-4e-5));
  }
  SUBCASE("direct sum agrees with the matrix assembly") {
    Rng rng(17);
    MALayout layout{{Vec2(0.05, 0.31), Vec2(0.2, 0.11), Vec2(0.33, 0.4)}};
    PathAngles ang;
    ang.theta = Eigen::ArrayXd::NullaryExpr(4, [&](int) { return rng.uniform(0.2, 1.4); });
    ang.phi = Eigen::ArrayXd::NullaryExpr(4, [&](int) { return rng.uniform(-2.0, 2.0); });
    PathResponse resp;
    resp.sigma =
        Eigen::ArrayXcd::NullaryExpr(4, [&](int) { return rng.cnormal() * 1e-5; });
    const Eigen::VectorXcd a = channel_vector(layout, ang, resp, 0.1);
    const Eigen::VectorXcd b = channel_vector_matrix_form(layout, ang, resp, 0.1);
    CHECK((a - b).norm() <= 1e-12 * a.norm());
  }
  SUBCASE("translating a single-path array keeps the gains") {
    MALayout layout{{Vec2(0.0, 0.0), Vec2(0.1, 0.2)}};
    MALayout shifted{{Vec2(0.07, 0.03), Vec2(0.17, 0.23)}};
    PathAngles ang;
    ang.theta = Eigen::ArrayXd::Constant(1, 0.9);
    ang.phi = Eigen::ArrayXd::Constant(1, 1.1);
    PathResponse resp;
    resp.sigma = Eigen::ArrayXcd::Constant(1, cd(2e-5, 1e-5));
    const Eigen::VectorXcd a = channel_vector(layout, ang, resp, 0.1);
    const Eigen::VectorXcd b = channel_vector(shifted, ang, resp, 0.1);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(a(k)) == doctest::Approx(std::abs(b(k))));
  }
}

TEST_CASE("channel: mission model") {
  const Scenario s = tiny_scenario();
  const ChannelModel model(s);

  SUBCASE("construction is bitwise deterministic") {
    const ChannelModel other(s);
    for (int m = 0; m < s.num_users; ++m) {
      for (int i = 0; i < s.num_paths; ++i) {
        CHECK(model.small_scale(m)(i) == other.small_scale(m)(i));
      }
    }
  }
  SUBCASE("angles track the platform, offsets stay put") {
    const Vec2 q1(100.0, 100.0), q2(400.0, 600.0);
    const PathAngles a1 = model.angles(0, q1);
    const PathAngles a2 = model.angles(0, q2);
    const auto [t1, p1] = nominal_angles(q1, s.user_positions[0], s.altitude_m);
    const auto [t2, p2] = nominal_angles(q2, s.user_positions[0], s.altitude_m);
    for (int i = 0; i < s.num_paths; ++i) {
      CHECK(a1.theta(i) - t1 == doctest::Approx(a2.theta(i) - t2).epsilon(1e-12));
      CHECK(std::abs(a1.theta(i) - t1) <= s.angular_spread_rad / 2 + 1e-12);
    }
  }
  SUBCASE("response scales with distance") {
    const PathResponse r1 = model.response(0, 100.0);
    const PathResponse r2 = model.response(0, 200.0);
    CHECK(r1.alpha == doctest::Approx(s.reference_gain / 1e4));
    // alpha ~ d^-2, sigma ~ d^-1
    CHECK(r1.alpha == doctest::Approx(4.0 * r2.alpha));
    CHECK(std::abs(r1.sigma(0)) == doctest::Approx(2.0 * std::abs(r2.sigma(0))));
  }
  SUBCASE("per-entry power bound") {
    MALayout layout{{Vec2(0.1, 0.1), Vec2(0.3, 0.2)}};
    const Vec2 q(250.0, 250.0);
    const Eigen::VectorXcd h = model.channel(0, q, layout);
    const double d = distance(q, s.user_positions[0], s.altitude_m);
    const double alpha = s.reference_gain / (d * d);
    const double gmax = model.small_scale(0).abs2().maxCoeff();
    for (int k = 0; k < 2; ++k) {
      CHECK(std::norm(h(k)) <= alpha * s.num_paths * gmax * (1 + 1e-12));
    }
  }
  SUBCASE("slot context reproduces the model channels") {
    MALayout layout{{Vec2(0.02, 0.4), Vec2(0.37, 0.05)}};
    const Vec2 q(321.0, 123.0);
    const SlotContext ctx = make_slot_context(model, q);
    const Eigen::MatrixXcd H = channels_for_layout(ctx, layout);
    for (int m = 0; m < s.num_users; ++m) {
      const Eigen::VectorXcd h = model.channel(m, q, layout);
      CHECK((H.col(m) - h).norm() <= 1e-12 * h.norm());
    }
  }
}

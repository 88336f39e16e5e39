#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "lawnma/rate.hpp"

using namespace lawnma;

namespace {

// Two users, two antennas, orthogonal channels plus a leakage term.
SlotChannels leaky_channels() {
  SlotChannels H(2, 2);
  H << cd(1, 0), cd(1, 0),
       cd(0, 0), cd(1, 0);
  return H;
}

}  // namespace

TEST_CASE("rate: single-user sinr") {
  SlotChannels H(1, 1);
  H(0, 0) = cd(3e-7, 0.0);
  Eigen::MatrixXcd W(1, 1);
  W(0, 0) = cd(1, 0);
  Eigen::VectorXd p(1);
  p << 2.0;
  const double sinr = user_sinr(0, W, p, H, 1e-14);
  CHECK(sinr == doctest::Approx(18.0).epsilon(1e-12));
  CHECK(user_rate(0, W, p, H, 1e-14) == doctest::Approx(std::log2(19.0)).epsilon(1e-12));
}

TEST_CASE("rate: interference accounting") {
  const SlotChannels H = leaky_channels();
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Identity(2, 2);
  Eigen::VectorXd p(2);
  p << 4.0, 9.0;
  const double noise = 1.0;
  // user 0 hears user 1 at full strength, user 1 hears nothing
  CHECK(user_sinr(0, W, p, H, noise) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(user_sinr(1, W, p, H, noise) == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(slot_sum_rate(W, p, H, noise) ==
        doctest::Approx(std::log2(1.4) + std::log2(10.0)).epsilon(1e-12));
}

TEST_CASE("rate: beamformer scale invariance") {
  const SlotChannels H = leaky_channels();
  Eigen::MatrixXcd W(2, 2);
  W << cd(0.6, 0.2), cd(-0.3, 0.4),
       cd(0.1, -0.5), cd(0.7, 0.1);
  Eigen::VectorXd p(2);
  p << 0.5, 1.5;
  const double a = user_sinr(0, W, p, H, 0.3);
  W.col(0) *= cd(0.0, 2.0);  // phase and magnitude both cancel
  const double b = user_sinr(0, W, p, H, 0.3);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("rate: degenerate inputs") {
  const SlotChannels H = leaky_channels();
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Identity(2, 2);
  Eigen::VectorXd p(2);
  p << 1.0, 0.0;
  SUBCASE("zero power means zero rate") {
    CHECK(user_rate(1, W, p, H, 1.0) == doctest::Approx(0.0));
  }
  SUBCASE("zero beamformer is rejected") {
    W.col(0).setZero();
    CHECK_THROWS_AS((void)user_sinr(0, W, p, H, 1.0), std::invalid_argument);
  }
}

TEST_CASE("rate: mission aggregation") {
  // two slots with hand-built channels
  ChannelSet channels(2);
  channels[0] = leaky_channels();
  channels[1] = leaky_channels() * 2.0;

  Iterate it;
  it.W.assign(2, Eigen::MatrixXcd::Identity(2, 2));
  it.P = Eigen::MatrixXd::Ones(2, 2);

  const double noise = 1.0;
  const double s0 = std::log2(1.5) + std::log2(2.0);
  const double s1 = std::log2(1.8) + std::log2(5.0);
  CHECK(sum_rate(it, channels, noise) == doctest::Approx(s0 + s1).epsilon(1e-12));
  CHECK(mean_sum_rate(it, channels, noise) == doctest::Approx((s0 + s1) / 2).epsilon(1e-12));

  const Eigen::MatrixXd R = per_user_rates(it, channels, noise);
  CHECK(R.rows() == 2);
  CHECK(R.cols() == 2);
  CHECK(R(0, 0) == doctest::Approx(std::log2(1.5)));
  CHECK(R(1, 1) == doctest::Approx(std::log2(5.0)));
  CHECK(R.sum() == doctest::Approx(s0 + s1));
}

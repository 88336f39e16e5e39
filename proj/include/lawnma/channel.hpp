// Far-field channel model for a movable-antenna receive array on an aerial
// platform: per-path angles with a bounded angular spread around the nominal
// geometry, Rician small-scale response, distance-dependent average power.
// Per-user path offsets and small-scale coefficients are drawn once per
// mission and held fixed, so every optimizer sees the same propagation
// environment across slots and candidate trajectories.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <vector>

#include "lawnma/rng.hpp"
#include "lawnma/scenario.hpp"

namespace lawnma {

using cd = std::complex<double>;

struct PathAngles {
  Eigen::ArrayXd theta;  // elevation per path
  Eigen::ArrayXd phi;    // azimuth per path
};

struct PathOffsets {
  Eigen::ArrayXd theta;
  Eigen::ArrayXd phi;
};

struct PathResponse {
  Eigen::ArrayXcd sigma;  // per-path response entries (diagonal of the PRM)
  double alpha = 0.0;     // average channel power at this distance
};

struct MALayout {
  std::vector<Vec2> positions;  // antenna coordinates in [0, region]^2
};

[[nodiscard]] double distance(const Vec2& q, const Vec2& s, double altitude);

// (theta, phi): elevation from arcsin(H/d); azimuth measured from the +y
// axis, signed by the x offset (or unsigned arccos when asked).
[[nodiscard]] std::pair<double, double> nominal_angles(const Vec2& q, const Vec2& s,
                                                       double altitude,
                                                       bool unsigned_azimuth = false);

[[nodiscard]] PathOffsets sample_path_offsets(Rng& rng, double spread, int paths);
[[nodiscard]] PathAngles apply_offsets(double theta_nom, double phi_nom,
                                       const PathOffsets& off);
[[nodiscard]] PathAngles sample_path_angles(Rng& rng, double theta_nom, double phi_nom,
                                            double spread, int paths);

// Propagation distance difference of antenna position u relative to the
// region origin for a path arriving from (theta, phi).
[[nodiscard]] double phase_difference(const Vec2& u, double theta, double phi);

// Receive field-response vector, entries exp(+j 2 pi rho / lambda).
[[nodiscard]] Eigen::ArrayXcd receive_frv(const Vec2& u, const PathAngles& ang,
                                          double wavelength);

// Rician small-scale coefficients: deterministic LoS entry plus CN-distributed
// scattered entries; E[sum |g|^2] = paths for paths >= 2.
[[nodiscard]] Eigen::ArrayXcd small_scale_coeffs(Rng& rng, double kappa, int paths);
[[nodiscard]] PathResponse scale_response(const Eigen::ArrayXcd& g, double alpha);
[[nodiscard]] PathResponse path_response(Rng& rng, double alpha, double kappa, int paths);

// h_k = sum_i sigma_i exp(-j 2 pi rho(u_k, i) / lambda)
[[nodiscard]] Eigen::VectorXcd channel_vector(const MALayout& layout, const PathAngles& ang,
                                              const PathResponse& resp, double wavelength);
// Same quantity assembled as G^H Sigma 1; cross-check route.
[[nodiscard]] Eigen::VectorXcd channel_vector_matrix_form(const MALayout& layout,
                                                          const PathAngles& ang,
                                                          const PathResponse& resp,
                                                          double wavelength);

class ChannelModel {
 public:
  explicit ChannelModel(const Scenario& s);

  [[nodiscard]] const Scenario& scenario() const { return scen_; }
  [[nodiscard]] PathAngles angles(int user, const Vec2& q) const;
  [[nodiscard]] PathResponse response(int user, double dist) const;
  [[nodiscard]] Eigen::VectorXcd channel(int user, const Vec2& q, const MALayout& layout) const;
  [[nodiscard]] const Eigen::ArrayXcd& small_scale(int user) const { return g_[user]; }
  [[nodiscard]] const PathOffsets& offsets(int user) const { return offsets_[user]; }
  // max over users of sum_i |g_i|^2; feeds the sum-rate ceiling
  [[nodiscard]] double max_small_scale_energy() const;

 private:
  Scenario scen_;
  std::vector<PathOffsets> offsets_;
  std::vector<Eigen::ArrayXcd> g_;
};

// Layout-independent channel data for one slot (AAV position fixed), reused
// by the placement optimizers' inner loops.
struct SlotContext {
  std::vector<PathAngles> angles;      // per user
  std::vector<Eigen::ArrayXcd> sigma;  // per user
  std::vector<Eigen::ArrayXd> dir_x;   // sin(theta) cos(phi) per path
  std::vector<Eigen::ArrayXd> dir_y;   // sin(theta) sin(phi) per path
  double wavelength = 0.0;
  double noise = 0.0;
};

[[nodiscard]] SlotContext make_slot_context(const ChannelModel& model, const Vec2& q);
[[nodiscard]] cd context_channel_entry(const SlotContext& ctx, int user, const Vec2& antenna);
[[nodiscard]] Eigen::VectorXcd context_channel(const SlotContext& ctx, int user,
                                               const MALayout& layout);
// K x M matrix, column m = channel of user m
[[nodiscard]] Eigen::MatrixXcd channels_for_layout(const SlotContext& ctx,
                                                   const MALayout& layout);

}  // namespace lawnma

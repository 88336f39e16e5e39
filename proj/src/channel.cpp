#include "lawnma/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lawnma {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double distance(const Vec2& q, const Vec2& s, double altitude) {
  return std::sqrt((q - s).squaredNorm() + altitude * altitude);
}

std::pair<double, double> nominal_angles(const Vec2& q, const Vec2& s, double altitude,
                                         bool unsigned_azimuth) {
  const Vec2 d = q - s;
  const double ground = d.norm();
  const double theta = std::asin(altitude / std::sqrt(ground * ground + altitude * altitude));
  if (ground == 0.0) return {theta, 0.0};
  if (unsigned_azimuth) {
    const double c = std::clamp(d.y() / ground, -1.0, 1.0);
    return {theta, std::acos(c)};
  }
  return {theta, std::atan2(d.x(), d.y())};
}

PathOffsets sample_path_offsets(Rng& rng, double spread, int paths) {
  PathOffsets off;
  off.theta.resize(paths);
  off.phi.resize(paths);
  for (int i = 0; i < paths; ++i) off.theta(i) = rng.uniform(-spread / 2, spread / 2);
  for (int i = 0; i < paths; ++i) off.phi(i) = rng.uniform(-spread / 2, spread / 2);
  return off;
}

PathAngles apply_offsets(double theta_nom, double phi_nom, const PathOffsets& off) {
  PathAngles a;
  a.theta = theta_nom + off.theta;
  a.phi = phi_nom + off.phi;
  return a;
}

PathAngles sample_path_angles(Rng& rng, double theta_nom, double phi_nom, double spread,
                              int paths) {
  return apply_offsets(theta_nom, phi_nom, sample_path_offsets(rng, spread, paths));
}

double phase_difference(const Vec2& u, double theta, double phi) {
  const double st = std::sin(theta);
  return u.x() * st * std::cos(phi) + u.y() * st * std::sin(phi);
}

Eigen::ArrayXcd receive_frv(const Vec2& u, const PathAngles& ang, double wavelength) {
  const int paths = static_cast<int>(ang.theta.size());
  Eigen::ArrayXcd g(paths);
  for (int i = 0; i < paths; ++i) {
    const double rho = phase_difference(u, ang.theta(i), ang.phi(i));
    const double arg = kTwoPi * rho / wavelength;
    g(i) = cd(std::cos(arg), std::sin(arg));
  }
  return g;
}

Eigen::ArrayXcd small_scale_coeffs(Rng& rng, double kappa, int paths) {
  Eigen::ArrayXcd g(paths);
  g(0) = std::sqrt(kappa * paths / (kappa + 1.0));
  if (paths > 1) {
    const double scatter = std::sqrt(static_cast<double>(paths) / ((kappa + 1.0) * (paths - 1)));
    for (int i = 1; i < paths; ++i) g(i) = scatter * rng.cnormal();
  }
  return g;
}

PathResponse scale_response(const Eigen::ArrayXcd& g, double alpha) {
  PathResponse r;
  r.alpha = alpha;
  r.sigma = std::sqrt(alpha / static_cast<double>(g.size())) * g;
  return r;
}

PathResponse path_response(Rng& rng, double alpha, double kappa, int paths) {
  return scale_response(small_scale_coeffs(rng, kappa, paths), alpha);
}

Eigen::VectorXcd channel_vector(const MALayout& layout, const PathAngles& ang,
                                const PathResponse& resp, double wavelength) {
  const int k = static_cast<int>(layout.positions.size());
  Eigen::VectorXcd h(k);
  for (int a = 0; a < k; ++a) {
    const Eigen::ArrayXcd g = receive_frv(layout.positions[a], ang, wavelength);
    h(a) = (g.conjugate() * resp.sigma).sum();
  }
  return h;
}

Eigen::VectorXcd channel_vector_matrix_form(const MALayout& layout, const PathAngles& ang,
                                            const PathResponse& resp, double wavelength) {
  const int k = static_cast<int>(layout.positions.size());
  const int paths = static_cast<int>(ang.theta.size());
  Eigen::MatrixXcd G(paths, k);  // column a = field-response vector of antenna a
  for (int a = 0; a < k; ++a) G.col(a) = receive_frv(layout.positions[a], ang, wavelength);
  const Eigen::MatrixXcd Sigma = resp.sigma.matrix().asDiagonal();
  return G.adjoint() * Sigma * Eigen::VectorXcd::Ones(paths);
}

ChannelModel::ChannelModel(const Scenario& s) : scen_(materialized(s)) {
  const auto rep = validate(scen_);
  if (!rep.ok()) throw std::invalid_argument("invalid scenario:\n" + rep.to_string());
  offsets_.reserve(scen_.num_users);
  g_.reserve(scen_.num_users);
  for (int m = 0; m < scen_.num_users; ++m) {
    Rng off_rng(derive_seed(scen_.rng_seed, stream::kPathOffsets, static_cast<std::uint64_t>(m)));
    offsets_.push_back(sample_path_offsets(off_rng, scen_.angular_spread_rad, scen_.num_paths));
    Rng ss_rng(derive_seed(scen_.rng_seed, stream::kSmallScale, static_cast<std::uint64_t>(m)));
    g_.push_back(small_scale_coeffs(ss_rng, scen_.rician_kappa, scen_.num_paths));
  }
}

PathAngles ChannelModel::angles(int user, const Vec2& q) const {
  const auto [theta, phi] = nominal_angles(q, scen_.user_positions[user], scen_.altitude_m,
                                           scen_.unsigned_azimuth);
  return apply_offsets(theta, phi, offsets_[user]);
}

PathResponse ChannelModel::response(int user, double dist) const {
  return scale_response(g_[user], scen_.reference_gain / (dist * dist));
}

Eigen::VectorXcd ChannelModel::channel(int user, const Vec2& q, const MALayout& layout) const {
  const double d = distance(q, scen_.user_positions[user], scen_.altitude_m);
  return channel_vector(layout, angles(user, q), response(user, d), scen_.wavelength_m);
}

double ChannelModel::max_small_scale_energy() const {
  double best = 0.0;
  for (const auto& g : g_) best = std::max(best, g.abs2().sum());
  return best;
}

SlotContext make_slot_context(const ChannelModel& model, const Vec2& q) {
  const Scenario& s = model.scenario();
  SlotContext ctx;
  ctx.wavelength = s.wavelength_m;
  ctx.noise = s.noise_power_w;
  ctx.angles.reserve(s.num_users);
  ctx.sigma.reserve(s.num_users);
  ctx.dir_x.reserve(s.num_users);
  ctx.dir_y.reserve(s.num_users);
  for (int m = 0; m < s.num_users; ++m) {
    PathAngles ang = model.angles(m, q);
    const double d = distance(q, s.user_positions[m], s.altitude_m);
    ctx.sigma.push_back(model.response(m, d).sigma);
    ctx.dir_x.push_back(ang.theta.sin() * ang.phi.cos());
    ctx.dir_y.push_back(ang.theta.sin() * ang.phi.sin());
    ctx.angles.push_back(std::move(ang));
  }
  return ctx;
}

cd context_channel_entry(const SlotContext& ctx, int user, const Vec2& antenna) {
  const Eigen::ArrayXd& dx = ctx.dir_x[user];
  const Eigen::ArrayXd& dy = ctx.dir_y[user];
  const Eigen::ArrayXcd& sigma = ctx.sigma[user];
  cd acc(0.0, 0.0);
  for (int i = 0; i < sigma.size(); ++i) {
    const double arg = -kTwoPi * (antenna.x() * dx(i) + antenna.y() * dy(i)) / ctx.wavelength;
    acc += sigma(i) * cd(std::cos(arg), std::sin(arg));
  }
  return acc;
}

Eigen::VectorXcd context_channel(const SlotContext& ctx, int user, const MALayout& layout) {
  const int k = static_cast<int>(layout.positions.size());
  Eigen::VectorXcd h(k);
  for (int a = 0; a < k; ++a) h(a) = context_channel_entry(ctx, user, layout.positions[a]);
  return h;
}

Eigen::MatrixXcd channels_for_layout(const SlotContext& ctx, const MALayout& layout) {
  const int k = static_cast<int>(layout.positions.size());
  const int users = static_cast<int>(ctx.sigma.size());
  Eigen::MatrixXcd H(k, users);
  for (int m = 0; m < users; ++m) H.col(m) = context_channel(ctx, m, layout);
  return H;
}

}  // namespace lawnma

#include "lawnma/rate.hpp"

#include <cmath>
#include <stdexcept>

namespace lawnma {

ChannelSet compute_channels(const ChannelModel& model, const std::vector<Vec2>& Q,
                            const std::vector<MALayout>& U) {
  const int slots = static_cast<int>(Q.size());
  const int users = model.scenario().num_users;
  ChannelSet channels(slots);
  for (int n = 0; n < slots; ++n) {
    const SlotContext ctx = make_slot_context(model, Q[n]);
    channels[n].resize(static_cast<int>(U[n].positions.size()), users);
    channels[n] = channels_for_layout(ctx, U[n]);
  }
  return channels;
}

double user_sinr(int m, const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                 const SlotChannels& H_n, double noise) {
  const Eigen::VectorXcd w = W_n.col(m);
  const double wnorm2 = w.squaredNorm();
  if (wnorm2 == 0.0) throw std::invalid_argument("zero beamformer");
  const int users = static_cast<int>(H_n.cols());
  double interference = 0.0;
  for (int r = 0; r < users; ++r) {
    if (r == m) continue;
    interference += p_n(r) * std::norm(w.dot(H_n.col(r)));
  }
  const double signal = p_n(m) * std::norm(w.dot(H_n.col(m)));
  return signal / (interference + wnorm2 * noise);
}

double user_rate(int m, const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                 const SlotChannels& H_n, double noise) {
  return std::log2(1.0 + user_sinr(m, W_n, p_n, H_n, noise));
}

double slot_sum_rate(const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                     const SlotChannels& H_n, double noise) {
  double acc = 0.0;
  for (int m = 0; m < H_n.cols(); ++m) acc += user_rate(m, W_n, p_n, H_n, noise);
  return acc;
}

double sum_rate(const Iterate& it, const ChannelSet& channels, double noise) {
  double acc = 0.0;
  for (std::size_t n = 0; n < channels.size(); ++n) {
    const Eigen::VectorXd p_n = it.P.row(static_cast<int>(n)).transpose();
    acc += slot_sum_rate(it.W[n], p_n, channels[n], noise);
  }
  return acc;
}

double mean_sum_rate(const Iterate& it, const ChannelSet& channels, double noise) {
  return sum_rate(it, channels, noise) / static_cast<double>(channels.size());
}

Eigen::MatrixXd per_user_rates(const Iterate& it, const ChannelSet& channels, double noise) {
  const int slots = static_cast<int>(channels.size());
  const int users = static_cast<int>(channels.front().cols());
  Eigen::MatrixXd R(slots, users);
  for (int n = 0; n < slots; ++n) {
    const Eigen::VectorXd p_n = it.P.row(n).transpose();
    for (int m = 0; m < users; ++m) R(n, m) = user_rate(m, it.W[n], p_n, channels[n], noise);
  }
  return R;
}

}  // namespace lawnma

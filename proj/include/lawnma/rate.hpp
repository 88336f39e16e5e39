// Uplink SINR and achievable-rate evaluation for a full design iterate
// (trajectory, beamformers, powers, antenna layouts).
#pragma once

#include <Eigen/Dense>

#include <vector>

#include "lawnma/channel.hpp"
#include "lawnma/scenario.hpp"

namespace lawnma {

struct Iterate {
  std::vector<Vec2> Q;               // N waypoints
  std::vector<Eigen::MatrixXcd> W;   // per slot: K x M, column m = w_m
  Eigen::MatrixXd P;                 // N x M transmit powers
  std::vector<MALayout> U;           // per slot antenna layout
};

using SlotChannels = Eigen::MatrixXcd;        // K x M, column m = h_m
using ChannelSet = std::vector<SlotChannels>;

[[nodiscard]] ChannelSet compute_channels(const ChannelModel& model,
                                          const std::vector<Vec2>& Q,
                                          const std::vector<MALayout>& U);

// SINR of user m in one slot; throws on a zero beamformer.
[[nodiscard]] double user_sinr(int m, const Eigen::MatrixXcd& W_n,
                               const Eigen::VectorXd& p_n, const SlotChannels& H_n,
                               double noise);
[[nodiscard]] double user_rate(int m, const Eigen::MatrixXcd& W_n,
                               const Eigen::VectorXd& p_n, const SlotChannels& H_n,
                               double noise);
[[nodiscard]] double slot_sum_rate(const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                                   const SlotChannels& H_n, double noise);

// Sum over all slots and users.
[[nodiscard]] double sum_rate(const Iterate& it, const ChannelSet& channels, double noise);
// Slot-averaged sum rate; the reporting unit everywhere.
[[nodiscard]] double mean_sum_rate(const Iterate& it, const ChannelSet& channels, double noise);
// N x M matrix of per-user rates.
[[nodiscard]] Eigen::MatrixXd per_user_rates(const Iterate& it, const ChannelSet& channels,
                                             double noise);

}  // namespace lawnma

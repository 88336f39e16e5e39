// Weighted-MMSE surrogate for the per-slot beamforming / power subproblem and
// the block-coordinate solver built on its closed-form updates.
#pragma once

#include <Eigen/Dense>

#include <vector>

#include "lawnma/rate.hpp"

namespace lawnma {

struct SlotAux {
  Eigen::VectorXcd beta;  // receive scalar per user
  Eigen::VectorXd omega;  // rate weight per user
};

// Surrogate rate of user m for given auxiliaries; equals log2(1 + sinr) at
// the optimal (beta, omega). omega must be positive.
[[nodiscard]] double surrogate_rate(int m, const Eigen::MatrixXcd& W_n,
                                    const Eigen::VectorXd& p_n, const SlotChannels& H_n,
                                    double noise, cd beta, double omega);
[[nodiscard]] double slot_surrogate(const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                                    const SlotChannels& H_n, double noise,
                                    const SlotAux& aux);

[[nodiscard]] cd update_beta(int m, const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                             const SlotChannels& H_n, double noise);
[[nodiscard]] double update_omega(int m, const Eigen::MatrixXcd& W_n,
                                  const Eigen::VectorXd& p_n, const SlotChannels& H_n,
                                  double noise);
[[nodiscard]] SlotAux update_aux(const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                                 const SlotChannels& H_n, double noise);

// Norm-constrained quadratic maximizer: w = (omega |beta|^2 (sum_r p_r h_r h_r^H
// + noise I) + lambda I)^{-1} omega sqrt(p_m) beta^* h_m with lambda >= 0
// chosen by bisection so that ||w|| <= 1.
[[nodiscard]] Eigen::VectorXcd update_beamformer(int m, const SlotChannels& H_n,
                                                 const Eigen::VectorXd& p_n, cd beta,
                                                 double omega, double noise,
                                                 double* lambda_out = nullptr);

struct PowerDiag {
  bool zero_denominator = false;
  int negative_stationary = 0;  // stationary points projected to zero power
};

// Exact per-user box solution in the sqrt-power variable.
[[nodiscard]] Eigen::VectorXd update_powers(const Eigen::MatrixXcd& W_n,
                                            const SlotChannels& H_n, const SlotAux& aux,
                                            double noise, double p_max,
                                            PowerDiag* diag = nullptr);

struct BcaSweepRow {
  int slot = 0;
  int sweep = 0;
  double surrogate = 0.0;
  double true_rate = 0.0;
};

struct BcaSlotResult {
  Eigen::MatrixXcd W;
  Eigen::VectorXd p;
  std::vector<BcaSweepRow> trace;
  PowerDiag diag;
  int sweeps = 0;
};

[[nodiscard]] BcaSlotResult bca_solve_slot(int slot, Eigen::MatrixXcd W0, Eigen::VectorXd p0,
                                           const SlotChannels& H_n, double noise,
                                           double p_max, double eps, int max_sweeps);

// Runs the per-slot solver for every slot (slots are independent) and writes
// the results back into the iterate.
void bca_solve(Iterate& it, const ChannelSet& channels, const Scenario& s, int threads,
               std::vector<BcaSweepRow>* trace = nullptr, PowerDiag* diag = nullptr);

}  // namespace lawnma

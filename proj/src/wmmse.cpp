#include "lawnma/wmmse.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lawnma/parallel.hpp"

namespace lawnma {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// D = sum_r p_r |w^H h_r|^2 + ||w||^2 noise; the total received energy seen
// through user m's beamformer.
double received_energy(const Eigen::VectorXcd& w, const Eigen::VectorXd& p,
                       const SlotChannels& H, double noise) {
  double acc = w.squaredNorm() * noise;
  for (int r = 0; r < H.cols(); ++r) acc += p(r) * std::norm(w.dot(H.col(r)));
  return acc;
}

}  // namespace

double surrogate_rate(int m, const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                      const SlotChannels& H_n, double noise, cd beta, double omega) {
  if (omega <= 0.0) throw std::invalid_argument("rate weight must be positive");
  const Eigen::VectorXcd w = W_n.col(m);
  const double D = received_energy(w, p_n, H_n, noise);
  const double e = 1.0 - 2.0 * std::real(std::conj(beta) * (std::sqrt(p_n(m)) * w.dot(H_n.col(m)))) +
                   std::norm(beta) * D;
  return std::log2(omega) - (omega * e - 1.0) / kLn2;
}

double slot_surrogate(const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                      const SlotChannels& H_n, double noise, const SlotAux& aux) {
  double acc = 0.0;
  for (int m = 0; m < H_n.cols(); ++m) {
    acc += surrogate_rate(m, W_n, p_n, H_n, noise, aux.beta(m), aux.omega(m));
  }
  return acc;
}

cd update_beta(int m, const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
               const SlotChannels& H_n, double noise) {
  const Eigen::VectorXcd w = W_n.col(m);
  const double D = received_energy(w, p_n, H_n, noise);
  if (D == 0.0) return cd(0.0, 0.0);
  return std::sqrt(p_n(m)) * w.dot(H_n.col(m)) / D;
}

double update_omega(int m, const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                    const SlotChannels& H_n, double noise) {
  const Eigen::VectorXcd w = W_n.col(m);
  const double signal = p_n(m) * std::norm(w.dot(H_n.col(m)));
  const double rest = received_energy(w, p_n, H_n, noise) - signal;
  if (rest <= 0.0) return 1.0;
  return 1.0 + signal / rest;
}

SlotAux update_aux(const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                   const SlotChannels& H_n, double noise) {
  const int users = static_cast<int>(H_n.cols());
  SlotAux aux;
  aux.beta.resize(users);
  aux.omega.resize(users);
  for (int m = 0; m < users; ++m) {
    aux.beta(m) = update_beta(m, W_n, p_n, H_n, noise);
    aux.omega(m) = update_omega(m, W_n, p_n, H_n, noise);
  }
  return aux;
}

Eigen::VectorXcd update_beamformer(int m, const SlotChannels& H_n, const Eigen::VectorXd& p_n,
                                   cd beta, double omega, double noise, double* lambda_out) {
  const int k = static_cast<int>(H_n.rows());
  if (lambda_out) *lambda_out = 0.0;
  const Eigen::VectorXcd b = omega * std::sqrt(p_n(m)) * std::conj(beta) * H_n.col(m);
  if (b.norm() == 0.0) return Eigen::VectorXcd::Zero(k);

  Eigen::MatrixXcd A0 = noise * Eigen::MatrixXcd::Identity(k, k);
  for (int r = 0; r < H_n.cols(); ++r) A0 += p_n(r) * H_n.col(r) * H_n.col(r).adjoint();
  A0 *= omega * std::norm(beta);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(A0);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const Eigen::VectorXd d = eig.eigenvalues();
  const double d_max = d.maxCoeff();
  if (d.minCoeff() <= d_max * 1e-12) {
    throw std::runtime_error("ill-conditioned beamforming system");
  }
  const Eigen::VectorXcd c = eig.eigenvectors().adjoint() * b;

  const auto norm_at = [&](double lambda) {
    double acc = 0.0;
    for (int i = 0; i < k; ++i) acc += std::norm(c(i)) / ((d(i) + lambda) * (d(i) + lambda));
    return std::sqrt(acc);
  };

  double lambda = 0.0;
  if (norm_at(0.0) > 1.0) {
    // ||w(lambda)|| is strictly decreasing and <= ||b|| / lambda, so the root
    // lies in (0, ||b||]
    double lo = 0.0, hi = b.norm();
    for (int it = 0; it < 200; ++it) {
      lambda = 0.5 * (lo + hi);
      const double v = norm_at(lambda);
      if (std::abs(v - 1.0) <= 1e-10) break;
      (v > 1.0 ? lo : hi) = lambda;
    }
  }
  if (lambda_out) *lambda_out = lambda;

  Eigen::VectorXcd scaled(k);
  for (int i = 0; i < k; ++i) scaled(i) = c(i) / (d(i) + lambda);
  return eig.eigenvectors() * scaled;
}

Eigen::VectorXd update_powers(const Eigen::MatrixXcd& W_n, const SlotChannels& H_n,
                              const SlotAux& aux, double noise, double p_max,
                              PowerDiag* diag) {
  (void)noise;  // the stationary point does not involve the noise term
  const int users = static_cast<int>(H_n.cols());
  const double x_max = std::sqrt(p_max);
  Eigen::VectorXd p(users);
  for (int m = 0; m < users; ++m) {
    double den = 0.0;
    for (int r = 0; r < users; ++r) {
      den += aux.omega(r) * std::norm(aux.beta(r)) * std::norm(W_n.col(r).dot(H_n.col(m)));
    }
    if (den == 0.0) {
      if (diag) diag->zero_denominator = true;
      p(m) = p_max;
      continue;
    }
    const double num =
        aux.omega(m) * std::real(std::conj(aux.beta(m)) * W_n.col(m).dot(H_n.col(m)));
    double x = num / den;
    if (x < 0.0) {
      if (diag) ++diag->negative_stationary;
      x = 0.0;
    }
    // A user being shut off approaches zero geometrically, never exactly; the
    // amplitude would decay into subnormal territory and products like
    // sqrt(p) * beta * h underflow to hard zeros downstream. Snap far below
    // any meaningful operating point so shut-off is reached in finitely many
    // sweeps with beta exactly zero afterwards.
    if (x < x_max * 1e-60) x = 0.0;
    x = std::min(x, x_max);
    p(m) = x * x;
  }
  return p;
}

BcaSlotResult bca_solve_slot(int slot, Eigen::MatrixXcd W0, Eigen::VectorXd p0,
                             const SlotChannels& H_n, double noise, double p_max, double eps,
                             int max_sweeps) {
  BcaSlotResult res;
  res.W = std::move(W0);
  res.p = std::move(p0);
  const int users = static_cast<int>(H_n.cols());
  double prev_rate = 0.0;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    res.sweeps = sweep;
    const SlotAux aux = update_aux(res.W, res.p, H_n, noise);
    for (int m = 0; m < users; ++m) {
      // beta = 0 makes user m's surrogate independent of w_m; keep the old
      // direction instead of collapsing to the zero vector. The same applies
      // when the update degenerates to zero through underflow.
      if (aux.beta(m) == cd(0.0, 0.0)) continue;
      Eigen::VectorXcd w_new =
          update_beamformer(m, H_n, res.p, aux.beta(m), aux.omega(m), noise);
      if (w_new.squaredNorm() > 0.0) res.W.col(m) = std::move(w_new);
    }
    res.p = update_powers(res.W, H_n, aux, noise, p_max, &res.diag);

    BcaSweepRow row;
    row.slot = slot;
    row.sweep = sweep;
    row.surrogate = slot_surrogate(res.W, res.p, H_n, noise, aux);
    row.true_rate = slot_sum_rate(res.W, res.p, H_n, noise);
    res.trace.push_back(row);
    if (sweep >= 2 && std::abs(row.true_rate - prev_rate) < eps) break;
    prev_rate = row.true_rate;
  }
  return res;
}

void bca_solve(Iterate& it, const ChannelSet& channels, const Scenario& s, int threads,
               std::vector<BcaSweepRow>* trace, PowerDiag* diag) {
  const int slots = static_cast<int>(channels.size());
  std::vector<BcaSlotResult> results(slots);
  parallel_for(slots, threads, [&](int n) {
    const Eigen::VectorXd p_n = it.P.row(n).transpose();
    results[n] = bca_solve_slot(n, it.W[n], p_n, channels[n], s.noise_power_w, s.p_max_w,
                                s.bca.eps, s.bca.max_iters);
  });
  for (int n = 0; n < slots; ++n) {
    it.W[n] = std::move(results[n].W);
    it.P.row(n) = results[n].p.transpose();
    if (trace) {
      trace->insert(trace->end(), results[n].trace.begin(), results[n].trace.end());
    }
    if (diag) {
      diag->zero_denominator |= results[n].diag.zero_denominator;
      diag->negative_stationary += results[n].diag.negative_stationary;
    }
  }
}

}  // namespace lawnma

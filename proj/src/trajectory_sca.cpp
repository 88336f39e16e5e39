#include "lawnma/trajectory_sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace lawnma {

namespace {
constexpr double kLn2 = std::numbers::ln2;
}

ScaExpansion build_expansion(const ChannelModel& model, const Iterate& it) {
  const Scenario& s = model.scenario();
  const int slots = static_cast<int>(it.Q.size());
  const int users = s.num_users;

  ScaExpansion e;
  e.Q_l = it.Q;
  e.users = s.user_positions;
  e.altitude = s.altitude_m;
  e.noise = s.noise_power_w;
  e.h_xi.resize(slots);
  e.d_l.resize(slots);
  e.t.resize(slots);
  e.csigma.resize(slots);
  e.S_l.resize(slots);
  e.E.resize(slots);

  for (int n = 0; n < slots; ++n) {
    const SlotContext ctx = make_slot_context(model, it.Q[n]);
    const Eigen::MatrixXcd H = channels_for_layout(ctx, it.U[n]);
    e.d_l[n].resize(users);
    for (int r = 0; r < users; ++r) {
      e.d_l[n](r) = distance(it.Q[n], s.user_positions[r], s.altitude_m);
    }
    e.h_xi[n].resize(users);
    for (int r = 0; r < users; ++r) e.h_xi[n][r] = e.d_l[n](r) * H.col(r);

    e.t[n].resize(users, users);
    e.csigma[n].resize(users);
    e.S_l[n].resize(users);
    e.E[n].resize(users, users);
    for (int m = 0; m < users; ++m) {
      const Eigen::VectorXcd w = it.W[n].col(m);
      e.csigma[n](m) = w.squaredNorm() * s.noise_power_w;
      double total = e.csigma[n](m);
      for (int r = 0; r < users; ++r) {
        e.t[n](m, r) = it.P(n, r) * std::norm(w.dot(e.h_xi[n][r]));
        total += e.t[n](m, r) / (e.d_l[n](r) * e.d_l[n](r));
      }
      e.S_l[n](m) = total;
      for (int r = 0; r < users; ++r) {
        const double d2 = e.d_l[n](r) * e.d_l[n](r);
        e.E[n](m, r) = e.t[n](m, r) / (d2 * d2 * e.S_l[n](m) * kLn2);
      }
    }
  }
  return e;
}

double first_term_lb(const ScaExpansion& e, int n, int m, const Eigen::VectorXd& d2) {
  double acc = std::log2(e.S_l[n](m));
  for (int r = 0; r < d2.size(); ++r) {
    acc += e.E[n](m, r) * (e.d_l[n](r) * e.d_l[n](r) - d2(r));
  }
  return acc;
}

double first_term_frozen(const ScaExpansion& e, int n, int m, const Eigen::VectorXd& d2) {
  double acc = e.csigma[n](m);
  for (int r = 0; r < d2.size(); ++r) acc += e.t[n](m, r) / d2(r);
  return std::log2(acc);
}

double second_term_ub(const ScaExpansion& e, int n, int m, const Eigen::VectorXd& eta) {
  double acc = e.csigma[n](m);
  for (int r = 0; r < eta.size(); ++r) {
    if (r == m) continue;
    acc += e.t[n](m, r) * std::exp(eta(r));
  }
  return std::log2(acc);
}

double second_term_frozen(const ScaExpansion& e, int n, int m, const Eigen::VectorXd& d2) {
  double acc = e.csigma[n](m);
  for (int r = 0; r < d2.size(); ++r) {
    if (r == m) continue;
    acc += e.t[n](m, r) / d2(r);
  }
  return std::log2(acc);
}

double linearized_d2(const ScaExpansion& e, int n, int r, const Vec2& q) {
  const double d2 = e.d_l[n](r) * e.d_l[n](r);
  return d2 + 2.0 * (e.Q_l[n] - e.users[r]).dot(q - e.Q_l[n]);
}

Eigen::VectorXd eta_tight(const ScaExpansion& e, int n, const Vec2& q, bool* valid) {
  const int users = static_cast<int>(e.users.size());
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(users);
  bool ok = true;
  for (int r = 0; r < users; ++r) {
    const double lin = linearized_d2(e, n, r, q);
    if (lin <= 0.0) {
      ok = false;
      continue;
    }
    eta(r) = -std::log(lin);
  }
  if (valid) *valid = ok;
  return eta;
}

Eigen::VectorXd squared_distances(const ScaExpansion& e, int n, const Vec2& q) {
  (void)n;
  const int users = static_cast<int>(e.users.size());
  Eigen::VectorXd d2(users);
  for (int r = 0; r < users; ++r) {
    d2(r) = (q - e.users[r]).squaredNorm() + e.altitude * e.altitude;
  }
  return d2;
}

double surrogate_slot(const ScaExpansion& e, int n, const Vec2& q, bool* valid) {
  bool ok = false;
  const Eigen::VectorXd eta = eta_tight(e, n, q, &ok);
  if (valid) *valid = ok;
  if (!ok) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd d2 = squared_distances(e, n, q);
  double acc = 0.0;
  const int users = static_cast<int>(e.users.size());
  for (int m = 0; m < users; ++m) {
    acc += first_term_lb(e, n, m, d2) - second_term_ub(e, n, m, eta);
  }
  return acc;
}

double frozen_rate_slot(const ScaExpansion& e, int n, const Vec2& q) {
  const Eigen::VectorXd d2 = squared_distances(e, n, q);
  double acc = 0.0;
  const int users = static_cast<int>(e.users.size());
  for (int m = 0; m < users; ++m) {
    acc += first_term_frozen(e, n, m, d2) - second_term_frozen(e, n, m, d2);
  }
  return acc;
}

double surrogate_total(const ScaExpansion& e, const std::vector<Vec2>& Q, bool* valid) {
  double acc = 0.0;
  bool ok = true;
  for (std::size_t n = 0; n < Q.size(); ++n) {
    bool slot_ok = false;
    acc += surrogate_slot(e, static_cast<int>(n), Q[n], &slot_ok);
    ok &= slot_ok;
  }
  if (valid) *valid = ok;
  return ok ? acc : -std::numeric_limits<double>::infinity();
}

Vec2 surrogate_slot_gradient(const ScaExpansion& e, int n, const Vec2& q) {
  const int users = static_cast<int>(e.users.size());
  Vec2 g = Vec2::Zero();
  for (int m = 0; m < users; ++m) {
    for (int r = 0; r < users; ++r) {
      g -= e.E[n](m, r) * 2.0 * (q - e.users[r]);
    }
    double X = e.csigma[n](m);
    Vec2 dX = Vec2::Zero();
    for (int r = 0; r < users; ++r) {
      if (r == m) continue;
      const double lin = linearized_d2(e, n, r, q);
      X += e.t[n](m, r) / lin;
      dX -= e.t[n](m, r) / (lin * lin) * 2.0 * (e.Q_l[n] - e.users[r]);
    }
    g -= dX / (X * kLn2);
  }
  return g;
}

namespace {

// Minimal-norm correction of the second difference Q[i-1] - 2 Q[i] + Q[i+1]
// over the non-pinned nodes of the triple.
void correct_acceleration(std::vector<Vec2>& Q, int i, double budget, bool pin_first,
                          bool pin_last) {
  const Vec2 v = Q[i + 1] - 2.0 * Q[i] + Q[i - 1];
  const double norm = v.norm();
  if (norm <= budget) return;
  const Vec2 dv = v * (budget / norm - 1.0);
  double scale = 4.0;  // the center coefficient is always free
  if (!pin_first) scale += 1.0;
  if (!pin_last) scale += 1.0;
  if (!pin_first) Q[i - 1] += dv / scale;
  Q[i] -= 2.0 * dv / scale;
  if (!pin_last) Q[i + 1] += dv / scale;
}

}  // namespace

std::vector<Vec2> project_trajectory(std::vector<Vec2> Q, const Scenario& s,
                                     const std::vector<Vec2>& Q_l, double phi,
                                     int max_passes) {
  const int n_slots = static_cast<int>(Q.size());
  const double hop_budget = s.v_max_mps * s.slot_duration_s;
  const double acc_budget = s.a_max_mps2 * s.slot_duration_s * s.slot_duration_s;
  const double tol = 1e-12;

  for (int pass = 0; pass < max_passes; ++pass) {
    Q.front() = s.start_position;
    Q.back() = s.end_position;
    // trust region around the expansion trajectory
    for (int i = 1; i + 1 < n_slots; ++i) {
      const Vec2 d = Q[i] - Q_l[i];
      const double norm = d.norm();
      if (norm > phi) Q[i] = Q_l[i] + d * (phi / norm);
    }
    // per-hop speed
    for (int i = 0; i + 1 < n_slots; ++i) {
      const Vec2 d = Q[i + 1] - Q[i];
      const double norm = d.norm();
      if (norm <= hop_budget) continue;
      const Vec2 excess = d * ((norm - hop_budget) / norm);
      const bool pin_a = (i == 0);
      const bool pin_b = (i + 1 == n_slots - 1);
      if (pin_a && pin_b) continue;  // nothing movable
      if (pin_a) {
        Q[i + 1] -= excess;
      } else if (pin_b) {
        Q[i] += excess;
      } else {
        Q[i] += 0.5 * excess;
        Q[i + 1] -= 0.5 * excess;
      }
    }
    // acceleration triples
    for (int i = 1; i + 1 < n_slots; ++i) {
      correct_acceleration(Q, i, acc_budget, i - 1 == 0, i + 1 == n_slots - 1);
    }

    // converged when every set is already satisfied
    bool ok = (Q.front() - s.start_position).norm() <= tol &&
              (Q.back() - s.end_position).norm() <= tol;
    for (int i = 1; ok && i + 1 < n_slots; ++i) ok = (Q[i] - Q_l[i]).norm() <= phi + tol;
    for (int i = 0; ok && i + 1 < n_slots; ++i) {
      ok = (Q[i + 1] - Q[i]).norm() <= hop_budget + tol;
    }
    for (int i = 1; ok && i + 1 < n_slots; ++i) {
      ok = (Q[i + 1] - 2.0 * Q[i] + Q[i - 1]).norm() <= acc_budget + tol;
    }
    if (ok) break;
  }
  Q.front() = s.start_position;
  Q.back() = s.end_position;
  return Q;
}

std::vector<std::string> kinematics_violations(const std::vector<Vec2>& Q, const Scenario& s,
                                               double tol) {
  std::vector<std::string> out;
  const int n_slots = static_cast<int>(Q.size());
  const double hop_budget = s.v_max_mps * s.slot_duration_s;
  const double acc_budget = s.a_max_mps2 * s.slot_duration_s * s.slot_duration_s;
  auto report = [&out](const std::string& msg) { out.push_back(msg); };

  if ((Q.front() - s.start_position).norm() > tol) report("endpoint mismatch at the start");
  if ((Q.back() - s.end_position).norm() > tol) report("endpoint mismatch at the end");
  for (int i = 0; i + 1 < n_slots; ++i) {
    const double hop = (Q[i + 1] - Q[i]).norm();
    if (hop > hop_budget * (1.0 + tol) + tol) {
      std::ostringstream os;
      os << "hop " << i << " speed " << hop / s.slot_duration_s << " exceeds "
         << s.v_max_mps;
      report(os.str());
    }
  }
  for (int i = 1; i + 1 < n_slots; ++i) {
    const double acc = (Q[i + 1] - 2.0 * Q[i] + Q[i - 1]).norm();
    if (acc > acc_budget * (1.0 + tol) + tol) {
      std::ostringstream os;
      os << "node " << i << " acceleration " << acc / (s.slot_duration_s * s.slot_duration_s)
         << " exceeds " << s.a_max_mps2;
      report(os.str());
    }
  }
  return out;
}

std::vector<Vec2> solve_subproblem(const ScaExpansion& e, const Scenario& s, double phi) {
  const int n_slots = static_cast<int>(e.Q_l.size());
  std::vector<Vec2> Q = e.Q_l;
  double F = surrogate_total(e, Q);

  // scale the first step to the trust radius
  double grad_max = 0.0;
  for (int n = 1; n + 1 < n_slots; ++n) {
    grad_max = std::max(grad_max, surrogate_slot_gradient(e, n, Q[n]).norm());
  }
  if (grad_max == 0.0) return Q;
  double alpha = phi / grad_max;

  for (int pass = 0; pass < 50 && alpha > 1e-14 * phi; ++pass) {
    std::vector<Vec2> cand = Q;
    for (int n = 1; n + 1 < n_slots; ++n) {
      cand[n] += alpha * surrogate_slot_gradient(e, n, Q[n]);
    }
    cand = project_trajectory(std::move(cand), s, e.Q_l, phi);
    bool valid = false;
    const double Fc = surrogate_total(e, cand, &valid);
    if (valid && Fc > F + 1e-12 && kinematics_violations(cand, s).empty()) {
      Q = std::move(cand);
      F = Fc;
      alpha *= 1.5;
    } else {
      alpha *= 0.5;
    }
  }
  if (!kinematics_violations(Q, s).empty()) return e.Q_l;
  return Q;
}

ScaResult sca_solve(const Iterate& it, const ChannelModel& model, const Scenario& s) {
  ScaResult res;
  res.Q = it.Q;

  Iterate cur = it;
  ChannelSet channels = compute_channels(model, cur.Q, cur.U);
  double rate = mean_sum_rate(cur, channels, s.noise_power_w);
  res.trace.push_back(rate);

  const int n_slots = static_cast<int>(cur.Q.size());
  double phi = s.sca_phi0();
  for (int iter = 1; iter <= s.sca.max_iters; ++iter) {
    if (phi < s.sca.phi_min) break;
    const ScaExpansion e = build_expansion(model, cur);
    std::vector<Vec2> Q_new = solve_subproblem(e, s, phi);

    Iterate cand = cur;
    cand.Q = std::move(Q_new);
    ChannelSet cand_channels = compute_channels(model, cand.Q, cand.U);
    double cand_rate = mean_sum_rate(cand, cand_channels, s.noise_power_w);

    if (cand_rate < rate - 1e-12) {
      // The joint step lost: the frozen-phase model cannot see how the
      // receive vectors rotate with q, and a few unlucky slots can veto the
      // rest. Salvage the slots that individually improved, restore the
      // kinematic coupling by projection, and gate the result on the true
      // rate like any other candidate. A slot only counts as a winner when
      // the distance model agrees with the measured gain; a move that wins
      // purely through phase alignment against the current beamformers does
      // not survive the next beamforming update and is not worth locking in.
      std::vector<Vec2> mix = cur.Q;
      int winners = 0;
      for (int n = 0; n < n_slots; ++n) {
        const Eigen::VectorXd p_n = cur.P.row(n).transpose();
        const double before = slot_sum_rate(cur.W[n], p_n, channels[n], s.noise_power_w);
        const double after = slot_sum_rate(cur.W[n], p_n, cand_channels[n], s.noise_power_w);
        const double model_gain =
            frozen_rate_slot(e, n, cand.Q[n]) - frozen_rate_slot(e, n, cur.Q[n]);
        if (after > before + 1e-12 && model_gain > 1e-12) {
          mix[n] = cand.Q[n];
          ++winners;
        }
      }
      if (winners > 0) {
        cand.Q = project_trajectory(std::move(mix), s, cur.Q, phi);
        if (kinematics_violations(cand.Q, s).empty()) {
          cand_channels = compute_channels(model, cand.Q, cand.U);
          cand_rate = mean_sum_rate(cand, cand_channels, s.noise_power_w);
        }
      }
    }

    if (cand_rate >= rate - 1e-12) {
      cur = std::move(cand);
      channels = std::move(cand_channels);
      res.iterations = iter;
      res.trace.push_back(cand_rate);
      const double delta = std::abs(cand_rate - rate);
      rate = cand_rate;
      if (delta < s.sca.eps) break;
    } else {
      phi *= s.sca.shrink;
    }
  }
  res.Q = cur.Q;
  return res;
}

}  // namespace lawnma

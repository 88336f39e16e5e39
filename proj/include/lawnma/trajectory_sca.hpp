// Successive convex approximation for the trajectory block: field-response
// vectors are frozen at the expansion trajectory, the rate is bounded below
// by a concave model in the waypoints (tangent in the squared distances for
// the desired-signal term, slack-variable linearization for interference),
// and the resulting subproblem is solved by projected gradient ascent inside
// a shrinking trust region.
#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "lawnma/rate.hpp"

namespace lawnma {

// All frozen data and bound coefficients for one expansion point.
struct ScaExpansion {
  std::vector<Vec2> Q_l;      // expansion trajectory
  std::vector<Vec2> users;    // ground node positions
  double altitude = 0.0;
  double noise = 0.0;
  // Indexing: [n] slots; matrices are (m, r) with m the decoded user.
  std::vector<std::vector<Eigen::VectorXcd>> h_xi;  // [n][m] frozen FRV channel, K-dim
  std::vector<Eigen::VectorXd> d_l;     // [n], per user r: distance at expansion
  std::vector<Eigen::MatrixXd> t;       // [n], (m, r): p_r |w_m^H h_xi_r|^2
  std::vector<Eigen::VectorXd> csigma;  // [n], per m: ||w_m||^2 noise
  std::vector<Eigen::VectorXd> S_l;     // [n], per m: frozen total receive power
  std::vector<Eigen::MatrixXd> E;       // [n], (m, r): tangent coefficients, >= 0
};

[[nodiscard]] ScaExpansion build_expansion(const ChannelModel& model, const Iterate& it);

// Concave-in-q lower bound on the total-receive-power term of user m;
// d2 holds the candidate squared distances per user r.
[[nodiscard]] double first_term_lb(const ScaExpansion& e, int n, int m,
                                   const Eigen::VectorXd& d2);
// Same term without the tangent step (frozen FRVs, exact distances).
[[nodiscard]] double first_term_frozen(const ScaExpansion& e, int n, int m,
                                       const Eigen::VectorXd& d2);
// Convex upper bound on the interference-plus-noise term at slack eta.
[[nodiscard]] double second_term_ub(const ScaExpansion& e, int n, int m,
                                    const Eigen::VectorXd& eta);
[[nodiscard]] double second_term_frozen(const ScaExpansion& e, int n, int m,
                                        const Eigen::VectorXd& d2);

// Linearized squared distance of user r at q around Q_l[n]; a global lower
// bound on d_r(q)^2.
[[nodiscard]] double linearized_d2(const ScaExpansion& e, int n, int r, const Vec2& q);
// Tight slack values eta_r = -ln(linearized d^2); valid=false when some
// linearization is nonpositive (candidate left the model's domain).
[[nodiscard]] Eigen::VectorXd eta_tight(const ScaExpansion& e, int n, const Vec2& q,
                                        bool* valid = nullptr);

[[nodiscard]] Eigen::VectorXd squared_distances(const ScaExpansion& e, int n, const Vec2& q);

// Per-slot surrogate (sum over users) at candidate waypoint q, slacks tight.
[[nodiscard]] double surrogate_slot(const ScaExpansion& e, int n, const Vec2& q,
                                    bool* valid = nullptr);
// Rate with frozen FRVs but exact distances; the quantity the surrogate
// lower-bounds.
[[nodiscard]] double frozen_rate_slot(const ScaExpansion& e, int n, const Vec2& q);
[[nodiscard]] double surrogate_total(const ScaExpansion& e, const std::vector<Vec2>& Q,
                                     bool* valid = nullptr);
[[nodiscard]] Vec2 surrogate_slot_gradient(const ScaExpansion& e, int n, const Vec2& q);

// Cyclic projection onto {endpoints fixed, per-hop speed, acceleration,
// trust region around Q_l}; returns the projected trajectory (feasibility is
// re-checked separately by the caller).
[[nodiscard]] std::vector<Vec2> project_trajectory(std::vector<Vec2> Q, const Scenario& s,
                                                   const std::vector<Vec2>& Q_l, double phi,
                                                   int max_passes = 50);
// Empty when Q satisfies endpoints, speed, and acceleration within tol.
[[nodiscard]] std::vector<std::string> kinematics_violations(const std::vector<Vec2>& Q,
                                                             const Scenario& s,
                                                             double tol = 1e-9);

// Projected gradient ascent with Armijo backtracking from Q_l.
[[nodiscard]] std::vector<Vec2> solve_subproblem(const ScaExpansion& e, const Scenario& s,
                                                 double phi);

struct ScaResult {
  std::vector<Vec2> Q;
  std::vector<double> trace;  // slot-averaged true sum rate, entry 0 = initial
  int iterations = 0;
};

// Outer loop: freeze, solve, accept on true-rate improvement else shrink the
// trust radius. Beamformers, powers, and layouts are taken from the iterate
// and held fixed.
[[nodiscard]] ScaResult sca_solve(const Iterate& it, const ChannelModel& model,
                                  const Scenario& s);

}  // namespace lawnma

// Minorization-maximization placement benchmark: the per-antenna WMMSE
// surrogate is written exactly as a sum over users of quadratics in that
// user's field-response vector, minorized twice (affine in the FRV, then a
// concave isotropic quadratic in the antenna position), and maximized in
// closed form over the box intersected with linearized spacing constraints.
//
// The per-user decomposition is the exact form: collapsing all users onto a
// single FRV is only valid when they share path angles (e.g. one user), and
// the aggregate matrices exposed below reduce to that published single-
// quadratic in such cases.
#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "lawnma/channel.hpp"
#include "lawnma/scenario.hpp"
#include "lawnma/wmmse.hpp"

namespace lawnma {

// Quadratic in the FRV of user r at the antenna under update:
// contribution = g^H E g + Re{F^H g} (+ constant absorbed in upsilon_tilde).
struct MmUserQuad {
  Eigen::MatrixXcd A;  // |w_k|^2 s_r s_r^H, PSD rank-1
  Eigen::VectorXcd b;
  double c = 0.0;
  Eigen::MatrixXcd E;  // negative semidefinite
  Eigen::VectorXcd F;
  double zeta = 0.0;   // <= lambda_min(E)
};

struct MmTerms {
  int m = 0;  // decoded user
  int k = 0;  // antenna under update
  std::vector<MmUserQuad> per_user;  // indexed by r
  double upsilon = 0.0;        // log2(omega) - omega - omega |beta|^2 noise ||w||^2 + 1
  double upsilon_tilde = 0.0;  // constant completing the exact decomposition
  // Sums over r; equal to the single-FRV form when users share angles.
  Eigen::MatrixXcd E_total;
  Eigen::VectorXcd F_total;
  double zeta_total = 0.0;
};

[[nodiscard]] MmTerms mm_build_terms(int m, int k, const SlotContext& ctx,
                                     const MALayout& layout, const Eigen::MatrixXcd& W_n,
                                     const Eigen::VectorXd& p_n, cd beta, double omega);
// Same decomposition with the layout's channel matrix already at hand
// (H = channels_for_layout(ctx, layout)); the sweep loop keeps H current and
// should not pay for a rebuild per decoded stream.
[[nodiscard]] MmTerms mm_build_terms(int m, int k, const SlotContext& ctx,
                                     const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& W_n,
                                     const Eigen::VectorXd& p_n, cd beta, double omega);

// Exact surrogate value from the decomposition, given the FRV of each user at
// the antenna position (g_rk[r] = receive_frv for user r).
[[nodiscard]] double mm_terms_value(const MmTerms& terms,
                                    const std::vector<Eigen::ArrayXcd>& g_rk);

// Affine minorizer of g^H E g + Re{F^H g} on the unit-modulus manifold,
// tight at g_l: returns (J, constant) with J = 2 (E - zeta I) g_l + F.
[[nodiscard]] std::pair<Eigen::VectorXcd, double> mm_lemma1(const Eigen::MatrixXcd& E,
                                                            const Eigen::VectorXcd& F,
                                                            double zeta,
                                                            const Eigen::VectorXcd& g_l);

struct MmQuadModel {
  double value0 = 0.0;  // Psi(u_l)
  Vec2 grad{0.0, 0.0};
  double curvature = 0.0;  // model = value0 + grad.(u - u_l) - curvature ||u - u_l||^2
};

// Concave quadratic minorizer of Psi(u) = Re{J^H g(u)} around u_l, curvature
// (4 pi^2 / lambda^2) ||J||_1.
[[nodiscard]] MmQuadModel mm_lemma2(const Eigen::VectorXcd& J, const PathAngles& ang,
                                    const Vec2& u_l, double wavelength);
// Variant for callers that already hold g = receive_frv(u_l, ang, wavelength).
[[nodiscard]] MmQuadModel mm_lemma2(const Eigen::VectorXcd& J, const PathAngles& ang,
                                    const Vec2& u_l, double wavelength,
                                    const Eigen::ArrayXcd& g);

struct HalfPlane {
  Vec2 a;       // unit normal
  double b = 0.0;  // feasible iff a.dot(u) >= b
};

// Affine sufficient conditions for the pairwise spacing constraints
// (Cauchy-Schwarz direction at u_l); coincident antennas get a deterministic
// nudge before linearizing.
[[nodiscard]] std::vector<HalfPlane> mm_distance_planes(const Vec2& u_l,
                                                        const std::vector<Vec2>& others,
                                                        double d_min);

// Exact maximizer of an isotropic concave quadratic centered at u_free over
// [0, region]^2 intersected with the half-planes, i.e. the Euclidean
// projection of u_free, by active-set enumeration. u_fallback must be
// feasible and is returned if numerics leave no candidate.
[[nodiscard]] Vec2 mm_solve_qp(const Vec2& u_free, double region,
                               const std::vector<HalfPlane>& planes, const Vec2& u_fallback);

struct MmSlotResult {
  MALayout layout;
  int sweeps = 0;
  std::vector<double> trace;  // slot sum rate per sweep, entry 0 = incumbent
};

// Cyclic per-antenna sweeps with (beta, omega) refreshed per sweep (or per
// antenna when configured). The incumbent must satisfy the spacing
// constraints; every accepted step keeps them satisfied exactly.
[[nodiscard]] MmSlotResult mm_solve_slot(const SlotContext& ctx, const MALayout& incumbent,
                                         const Eigen::MatrixXcd& W_n,
                                         const Eigen::VectorXd& p_n, const Scenario& s);

}  // namespace lawnma

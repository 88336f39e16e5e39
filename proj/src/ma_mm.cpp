#include "lawnma/ma_mm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "lawnma/ma_pso.hpp"
#include "lawnma/rate.hpp"

namespace lawnma {

namespace {
constexpr double kStepTol = 1e-12;
}

MmTerms mm_build_terms(int m, int k, const SlotContext& ctx, const Eigen::MatrixXcd& H,
                       const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n, cd beta,
                       double omega) {
  const int users = static_cast<int>(ctx.sigma.size());
  const int paths = static_cast<int>(ctx.sigma[0].size());
  const Eigen::VectorXcd w = W_n.col(m);
  const cd wk = w(k);
  const double beta2 = std::norm(beta);

  MmTerms terms;
  terms.m = m;
  terms.k = k;
  terms.per_user.reserve(users);
  terms.E_total = Eigen::MatrixXcd::Zero(paths, paths);
  terms.F_total = Eigen::VectorXcd::Zero(paths);
  terms.upsilon =
      std::log2(omega) - omega - omega * beta2 * ctx.noise * w.squaredNorm() + 1.0;
  double tilde = terms.upsilon;

  for (int r = 0; r < users; ++r) {
    const Eigen::VectorXcd sr = ctx.sigma[r].matrix();
    const auto hr = H.col(r);
    // received contribution of the antennas that stay fixed
    const cd cr = w.dot(hr) - std::conj(wk) * hr(k);

    MmUserQuad q;
    q.A = std::norm(wk) * (sr * sr.adjoint());
    q.b = 2.0 * std::conj(wk) * std::conj(cr) * sr;
    q.c = std::norm(cr);
    q.E = -omega * beta2 * p_n(r) * q.A;
    q.F = -omega * beta2 * p_n(r) * q.b;
    q.zeta = -omega * beta2 * p_n(r) * std::norm(wk) * sr.squaredNorm();
    tilde -= omega * beta2 * p_n(r) * q.c;
    if (r == m) {
      const double sp = std::sqrt(p_n(m));
      q.F += 2.0 * omega * sp * std::conj(beta) * std::conj(wk) * sr;
      tilde += 2.0 * omega * sp * std::real(std::conj(beta) * cr);
    }
    terms.E_total += q.E;
    terms.F_total += q.F;
    terms.zeta_total += q.zeta;
    terms.per_user.push_back(std::move(q));
  }
  terms.upsilon_tilde = tilde;
  return terms;
}

MmTerms mm_build_terms(int m, int k, const SlotContext& ctx, const MALayout& layout,
                       const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n, cd beta,
                       double omega) {
  return mm_build_terms(m, k, ctx, channels_for_layout(ctx, layout), W_n, p_n, beta, omega);
}

double mm_terms_value(const MmTerms& terms, const std::vector<Eigen::ArrayXcd>& g_rk) {
  double acc = terms.upsilon_tilde;
  for (std::size_t r = 0; r < terms.per_user.size(); ++r) {
    const Eigen::VectorXcd g = g_rk[r].matrix();
    const auto& q = terms.per_user[r];
    acc += std::real(g.dot(q.E * g)) + std::real(q.F.dot(g));
  }
  return acc;
}

std::pair<Eigen::VectorXcd, double> mm_lemma1(const Eigen::MatrixXcd& E,
                                              const Eigen::VectorXcd& F, double zeta,
                                              const Eigen::VectorXcd& g_l) {
  const double manifold_norm2 = static_cast<double>(g_l.size());
  Eigen::VectorXcd J = 2.0 * (E * g_l - zeta * g_l) + F;
  const double c0 =
      zeta * manifold_norm2 - std::real(g_l.dot(E * g_l)) + zeta * g_l.squaredNorm();
  return {std::move(J), c0};
}

MmQuadModel mm_lemma2(const Eigen::VectorXcd& J, const PathAngles& ang, const Vec2& u_l,
                      double wavelength) {
  return mm_lemma2(J, ang, u_l, wavelength, receive_frv(u_l, ang, wavelength));
}

MmQuadModel mm_lemma2(const Eigen::VectorXcd& J, const PathAngles& ang, const Vec2& u_l,
                      double wavelength, const Eigen::ArrayXcd& g) {
  const double tp = 2.0 * std::numbers::pi / wavelength;

  MmQuadModel model;
  model.value0 = std::real(J.dot(g.matrix()));
  Vec2 grad(0.0, 0.0);
  for (Eigen::Index i = 0; i < J.size(); ++i) {
    const double coeff = tp * std::real(cd(0.0, 1.0) * std::conj(J(i)) * g(i));
    const double st = std::sin(ang.theta(i));
    grad += coeff * Vec2(st * std::cos(ang.phi(i)), st * std::sin(ang.phi(i)));
  }
  model.grad = grad;
  model.curvature = (tp * tp) * J.cwiseAbs().sum();
  return model;
}

std::vector<HalfPlane> mm_distance_planes(const Vec2& u_l, const std::vector<Vec2>& others,
                                          double d_min) {
  std::vector<HalfPlane> planes;
  planes.reserve(others.size());
  for (const auto& v : others) {
    Vec2 diff = u_l - v;
    if (diff.norm() == 0.0) diff = Vec2(1e-6 * d_min, 0.0);
    const Vec2 a = diff.normalized();
    planes.push_back({a, d_min + a.dot(v)});
  }
  return planes;
}

Vec2 mm_solve_qp(const Vec2& u_free, double region, const std::vector<HalfPlane>& planes,
                 const Vec2& u_fallback) {
  constexpr double kFeasTol = 1e-9;
  std::vector<HalfPlane> all;
  all.reserve(planes.size() + 4);
  all.push_back({Vec2(1.0, 0.0), 0.0});
  all.push_back({Vec2(-1.0, 0.0), -region});
  all.push_back({Vec2(0.0, 1.0), 0.0});
  all.push_back({Vec2(0.0, -1.0), -region});
  all.insert(all.end(), planes.begin(), planes.end());

  const auto feasible = [&](const Vec2& u) {
    for (const auto& pl : all) {
      if (pl.a.dot(u) < pl.b - kFeasTol) return false;
    }
    return true;
  };
  const auto snap_box = [&](Vec2 u) {
    u.x() = std::clamp(u.x(), 0.0, region);
    u.y() = std::clamp(u.y(), 0.0, region);
    return u;
  };

  if (feasible(u_free)) return snap_box(u_free);

  bool found = false;
  Vec2 best = u_fallback;
  double best_d = std::numeric_limits<double>::infinity();
  const auto consider = [&](const Vec2& u) {
    if (!feasible(u)) return;
    const double d = (u - u_free).norm();
    if (d < best_d) {
      best_d = d;
      best = u;
      found = true;
    }
  };

  // The projection lies on a face of the polygon: enumerate single-constraint
  // foot points and pairwise vertices.
  const int n = static_cast<int>(all.size());
  for (int i = 0; i < n; ++i) {
    consider(u_free - (all[i].a.dot(u_free) - all[i].b) * all[i].a);
    for (int j = i + 1; j < n; ++j) {
      const double det = all[i].a.x() * all[j].a.y() - all[i].a.y() * all[j].a.x();
      if (std::abs(det) < 1e-12) continue;
      consider(Vec2((all[i].b * all[j].a.y() - all[j].b * all[i].a.y()) / det,
                    (all[i].a.x() * all[j].b - all[j].a.x() * all[i].b) / det));
    }
  }
  return found ? snap_box(best) : u_fallback;
}

namespace {

// Gradient and curvature of the double minorizer at antenna k, algebraically
// equal to accumulating mm_lemma2(mm_lemma1(mm_build_terms(...))) over all
// (m, r) pairs, but exploiting that E is rank-1 in sigma_r: J reduces to a
// two-term combination of sigma_r and the FRV, so nothing quadratic in the
// path count is ever formed and the inner loop does not allocate.
struct StepModel {
  Vec2 grad{0.0, 0.0};
  double curvature = 0.0;
};

StepModel antenna_step_model(int k, const SlotContext& ctx, const Eigen::MatrixXcd& H,
                             const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                             const SlotAux& aux, const std::vector<Eigen::ArrayXcd>& gl,
                             Eigen::VectorXcd& J_buf) {
  const int users = static_cast<int>(ctx.sigma.size());
  const double tp = 2.0 * std::numbers::pi / ctx.wavelength;
  StepModel out;
  for (int m = 0; m < users; ++m) {
    const auto w = W_n.col(m);
    const cd wk = w(k);
    const double wk2 = std::norm(wk);
    const cd beta = aux.beta(m);
    const double beta2 = std::norm(beta);
    const double omega = aux.omega(m);
    for (int r = 0; r < users; ++r) {
      const Eigen::ArrayXcd& sr = ctx.sigma[r];
      const auto hr = H.col(r);
      const cd cr = w.dot(hr) - std::conj(wk) * hr(k);
      const double scale = -omega * beta2 * p_n(r);
      // E = scale * wk2 * sr sr^H, F = scale * 2 conj(wk) conj(cr) sr
      // (plus the decoded-stream cross term when r == m), zeta = scale *
      // wk2 * ||sr||^2; J = 2 (E - zeta I) g + F collapses to coefficients
      // on sr and on g.
      const cd sr_dot_g = (sr.conjugate() * gl[r]).sum();
      cd coef_sr = 2.0 * scale * wk2 * sr_dot_g + 2.0 * scale * std::conj(wk) * std::conj(cr);
      if (r == m) {
        coef_sr += 2.0 * omega * std::sqrt(p_n(m)) * std::conj(beta) * std::conj(wk);
      }
      const double coef_g = -2.0 * scale * wk2 * sr.abs2().sum();
      J_buf = coef_sr * sr.matrix() + coef_g * gl[r].matrix();
      const auto& ang = ctx.angles[r];
      for (Eigen::Index i = 0; i < J_buf.size(); ++i) {
        const double coeff = tp * std::real(cd(0.0, 1.0) * std::conj(J_buf(i)) * gl[r](i));
        const double st = std::sin(ang.theta(i));
        out.grad += coeff * Vec2(st * std::cos(ang.phi(i)), st * std::sin(ang.phi(i)));
        out.curvature += (tp * tp) * std::abs(J_buf(i));
      }
    }
  }
  return out;
}

}  // namespace

MmSlotResult mm_solve_slot(const SlotContext& ctx, const MALayout& incumbent,
                           const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                           const Scenario& s) {
  const int users = s.num_users;
  const int antennas = s.num_antennas;

  MmSlotResult res;
  res.layout = incumbent;
  Eigen::MatrixXcd H = channels_for_layout(ctx, res.layout);
  res.trace.push_back(slot_sum_rate(W_n, p_n, H, ctx.noise));

  std::vector<Eigen::ArrayXcd> gl(users);
  Eigen::VectorXcd J_buf(static_cast<int>(ctx.sigma[0].size()));
  Eigen::MatrixXcd Hc(H.rows(), H.cols());

  for (int sweep = 1; sweep <= s.mm.max_sweeps; ++sweep) {
    SlotAux aux = update_aux(W_n, p_n, H, ctx.noise);
    double cur_surr = slot_surrogate(W_n, p_n, H, ctx.noise, aux);

    for (int k = 0; k < antennas; ++k) {
      if (s.mm.refresh_per_antenna) {
        aux = update_aux(W_n, p_n, H, ctx.noise);
        cur_surr = slot_surrogate(W_n, p_n, H, ctx.noise, aux);
      }
      const Vec2 u_l = res.layout.positions[k];
      // FRVs at the current position depend on the user alone, not on which
      // stream is being decoded; evaluate them once per antenna step.
      for (int r = 0; r < users; ++r) gl[r] = receive_frv(u_l, ctx.angles[r], ctx.wavelength);
      const StepModel model = antenna_step_model(k, ctx, H, W_n, p_n, aux, gl, J_buf);
      if (!(model.curvature > 0.0)) continue;

      const Vec2 u_free = u_l + model.grad / (2.0 * model.curvature);
      std::vector<Vec2> others;
      others.reserve(antennas - 1);
      for (int i = 0; i < antennas; ++i) {
        if (i != k) others.push_back(res.layout.positions[i]);
      }
      const Vec2 u_new =
          mm_solve_qp(u_free, s.region_side_m, mm_distance_planes(u_l, others, s.min_spacing_m),
                      u_l);

      if ((u_new - u_l).squaredNorm() == 0.0) continue;
      MALayout cand = res.layout;
      cand.positions[k] = u_new;
      if (count_violations(cand, s.min_spacing_m) != 0) continue;
      // only antenna k moved, so only row k of the channel matrix changes
      Hc = H;
      for (int r = 0; r < users; ++r) Hc(k, r) = context_channel_entry(ctx, r, u_new);
      const double cand_surr = slot_surrogate(W_n, p_n, Hc, ctx.noise, aux);
      if (cand_surr >= cur_surr - kStepTol) {
        res.layout = std::move(cand);
        std::swap(H, Hc);
        cur_surr = cand_surr;
      }
    }

    res.trace.push_back(slot_sum_rate(W_n, p_n, H, ctx.noise));
    res.sweeps = sweep;
    if (std::abs(res.trace[sweep] - res.trace[sweep - 1]) < s.mm.eps) break;
  }
  return res;
}

}  // namespace lawnma

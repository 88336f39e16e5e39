#include "lawnma/ma_pso.hpp"

#include <algorithm>
#include <cmath>

#include "lawnma/rate.hpp"

namespace lawnma {

Eigen::VectorXd flatten_layout(const MALayout& layout) {
  const int k = static_cast<int>(layout.positions.size());
  Eigen::VectorXd v(2 * k);
  for (int a = 0; a < k; ++a) {
    v(2 * a) = layout.positions[a].x();
    v(2 * a + 1) = layout.positions[a].y();
  }
  return v;
}

MALayout unflatten_layout(const Eigen::VectorXd& v) {
  MALayout layout;
  const int k = static_cast<int>(v.size()) / 2;
  layout.positions.reserve(k);
  for (int a = 0; a < k; ++a) layout.positions.emplace_back(v(2 * a), v(2 * a + 1));
  return layout;
}

int count_violations(const MALayout& layout, double d_min) {
  const int k = static_cast<int>(layout.positions.size());
  int count = 0;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      if ((layout.positions[a] - layout.positions[b]).norm() < d_min) ++count;
    }
  }
  return count;
}

double pso_fitness(const SlotContext& ctx, const MALayout& layout,
                   const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n, double penalty,
                   double d_min) {
  const Eigen::MatrixXcd H = channels_for_layout(ctx, layout);
  const double rate = slot_sum_rate(W_n, p_n, H, ctx.noise);
  return rate - penalty * count_violations(layout, d_min);
}

double pso_inertia(int t, int t_max, double chi_min, double chi_max) {
  return chi_max - (chi_max - chi_min) * static_cast<double>(t) / t_max;
}

void pso_step_velocity(PsoParticle& p, const Eigen::VectorXd& global_best, double chi,
                       double l1, double l2, double r1, double r2, double vclamp) {
  p.vel = chi * p.vel + l1 * r1 * (p.best_pos - p.pos) + l2 * r2 * (global_best - p.pos);
  for (int i = 0; i < p.vel.size(); ++i) p.vel(i) = std::clamp(p.vel(i), -vclamp, vclamp);
}

void pso_step_velocity_rng(PsoParticle& p, const Eigen::VectorXd& global_best, double chi,
                           double l1, double l2, Rng& rng, bool per_coordinate,
                           double vclamp) {
  if (!per_coordinate) {
    const double r1 = rng.uniform();
    const double r2 = rng.uniform();
    pso_step_velocity(p, global_best, chi, l1, l2, r1, r2, vclamp);
    return;
  }
  for (int i = 0; i < p.vel.size(); ++i) {
    const double r1 = rng.uniform();
    const double r2 = rng.uniform();
    p.vel(i) = chi * p.vel(i) + l1 * r1 * (p.best_pos(i) - p.pos(i)) +
               l2 * r2 * (global_best(i) - p.pos(i));
    p.vel(i) = std::clamp(p.vel(i), -vclamp, vclamp);
  }
}

void pso_step_position(PsoParticle& p, double region) {
  p.pos += p.vel;
  for (int i = 0; i < p.pos.size(); ++i) p.pos(i) = std::clamp(p.pos(i), 0.0, region);
}

PsoSlotResult pso_solve_slot(const SlotContext& ctx, const MALayout& incumbent,
                             const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                             const Scenario& s, std::uint64_t seed) {
  const PsoParams& pp = s.pso;
  const int dim = 2 * static_cast<int>(incumbent.positions.size());
  const double vclamp = s.region_side_m / 2.0;
  Rng rng(seed);

  const auto fitness = [&](const Eigen::VectorXd& pos) {
    return pso_fitness(ctx, unflatten_layout(pos), W_n, p_n, pp.penalty, s.min_spacing_m);
  };

  std::vector<PsoParticle> swarm(pp.num_particles);
  for (int i = 0; i < pp.num_particles; ++i) {
    PsoParticle& p = swarm[i];
    if (i == 0) {
      p.pos = flatten_layout(incumbent);
    } else {
      p.pos.resize(dim);
      for (int d = 0; d < dim; ++d) p.pos(d) = rng.uniform(0.0, s.region_side_m);
    }
    p.vel = Eigen::VectorXd::Zero(dim);
    p.best_pos = p.pos;
    p.best_fit = fitness(p.pos);
  }

  int best_index = 0;
  for (int i = 1; i < pp.num_particles; ++i) {
    if (swarm[i].best_fit > swarm[best_index].best_fit) best_index = i;
  }
  Eigen::VectorXd global_pos = swarm[best_index].best_pos;
  double global_fit = swarm[best_index].best_fit;

  PsoSlotResult res;
  res.best_trace.reserve(pp.max_iters + 1);
  res.best_trace.push_back(global_fit);

  for (int t = 1; t <= pp.max_iters; ++t) {
    const double chi = pso_inertia(t, pp.max_iters, pp.chi_min, pp.chi_max);
    for (auto& p : swarm) {
      pso_step_velocity_rng(p, global_pos, chi, pp.l1, pp.l2, rng, pp.per_coordinate_rand,
                            vclamp);
      pso_step_position(p, s.region_side_m);
      const double fit = fitness(p.pos);
      if (fit > p.best_fit) {
        p.best_fit = fit;
        p.best_pos = p.pos;
      }
      if (fit > global_fit) {
        global_fit = fit;
        global_pos = p.pos;
      }
    }
    res.best_trace.push_back(global_fit);
  }

  res.layout = unflatten_layout(global_pos);
  if (count_violations(res.layout, s.min_spacing_m) > 0) {
    res.fell_back = true;
    res.layout = incumbent;
  }
  return res;
}

}  // namespace lawnma

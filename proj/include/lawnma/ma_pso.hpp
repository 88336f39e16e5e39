// Particle-swarm placement of the movable receive antennas, one slot at a
// time: penalized sum-rate fitness, linearly decaying inertia, incumbent
// seeding, and a feasibility fallback.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "lawnma/channel.hpp"
#include "lawnma/scenario.hpp"

namespace lawnma {

struct PsoParticle {
  Eigen::VectorXd pos;       // flattened layout [x1, y1, ..., xK, yK]
  Eigen::VectorXd vel;
  Eigen::VectorXd best_pos;
  double best_fit = 0.0;
};

[[nodiscard]] Eigen::VectorXd flatten_layout(const MALayout& layout);
[[nodiscard]] MALayout unflatten_layout(const Eigen::VectorXd& v);

// Unordered antenna pairs closer than d_min.
[[nodiscard]] int count_violations(const MALayout& layout, double d_min);

// Slot sum rate minus penalty * violating pairs.
[[nodiscard]] double pso_fitness(const SlotContext& ctx, const MALayout& layout,
                                 const Eigen::MatrixXcd& W_n, const Eigen::VectorXd& p_n,
                                 double penalty, double d_min);

// chi_max at t = 0 decaying linearly to chi_min at t = t_max.
[[nodiscard]] double pso_inertia(int t, int t_max, double chi_min, double chi_max);

// Velocity update with explicit draws (r1, r2 scalars applied to every
// coordinate); components clamped to |v| <= vclamp.
void pso_step_velocity(PsoParticle& p, const Eigen::VectorXd& global_best, double chi,
                       double l1, double l2, double r1, double r2, double vclamp);
// Draws r1, r2 from rng (scalar or per-coordinate) and applies the update.
void pso_step_velocity_rng(PsoParticle& p, const Eigen::VectorXd& global_best, double chi,
                           double l1, double l2, Rng& rng, bool per_coordinate,
                           double vclamp);
// pos += vel, then clamp each coordinate into [0, region].
void pso_step_position(PsoParticle& p, double region);

struct PsoSlotResult {
  MALayout layout;
  bool fell_back = false;            // best was infeasible; incumbent kept
  std::vector<double> best_trace;    // global-best fitness per iteration
};

// Runs the swarm for one slot. Particle 0 is the incumbent layout with zero
// velocity; remaining particles start uniform in the region, all velocities
// zero. The returned layout never violates the spacing constraint.
[[nodiscard]] PsoSlotResult pso_solve_slot(const SlotContext& ctx, const MALayout& incumbent,
                                           const Eigen::MatrixXcd& W_n,
                                           const Eigen::VectorXd& p_n, const Scenario& s,
                                           std::uint64_t seed);

}  // namespace lawnma

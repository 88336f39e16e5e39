#include "lawnma/ao_driver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "lawnma/ma_mm.hpp"
#include "lawnma/parallel.hpp"
#include "lawnma/rng.hpp"
#include "lawnma/trajectory_sca.hpp"

namespace lawnma {

MALayout initial_layout(const Scenario& s) {
  const int K = s.num_antennas;
  const int per_axis = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(K))));
  // the spacing floor is padded one part in 1e9 against grid-arithmetic rounding
  const double spacing = std::max(s.min_spacing_m * (1.0 + 1e-9), s.region_side_m / per_axis);
  const int cols_used = std::min(K, per_axis);
  const int rows_used = (K + per_axis - 1) / per_axis;
  const double extent_x = (cols_used - 1) * spacing;
  const double extent_y = (rows_used - 1) * spacing;

  MALayout u;
  u.positions.reserve(K);
  if (extent_x <= s.region_side_m + 1e-12 && extent_y <= s.region_side_m + 1e-12) {
    const double off_x = (s.region_side_m - extent_x) / 2.0;
    const double off_y = (s.region_side_m - extent_y) / 2.0;
    for (int i = 0; i < K; ++i) {
      u.positions.emplace_back(off_x + (i % per_axis) * spacing,
                               off_y + (i / per_axis) * spacing);
    }
    return u;
  }
  // grid pitch exceeds the side; stretch along the diagonal instead
  for (int i = 0; i < K; ++i) {
    const double f = K == 1 ? 0.5 : static_cast<double>(i) / (K - 1);
    u.positions.emplace_back(f * s.region_side_m, f * s.region_side_m);
  }
  return u;
}

std::vector<Vec2> straight_line_trajectory(const Scenario& s) {
  std::vector<Vec2> Q(s.num_slots);
  const int hops = s.num_slots - 1;
  for (int n = 0; n < s.num_slots; ++n) {
    const double f = hops == 0 ? 0.0 : static_cast<double>(n) / hops;
    Q[n] = s.start_position + f * (s.end_position - s.start_position);
  }
  return Q;
}

Eigen::MatrixXcd matched_filter(const SlotChannels& H_n) {
  Eigen::MatrixXcd W = H_n;
  for (Eigen::Index m = 0; m < W.cols(); ++m) {
    const double norm = W.col(m).norm();
    if (norm > 0.0) {
      W.col(m) /= norm;
    } else {
      W.col(m).setZero();
      W(0, m) = 1.0;
    }
  }
  return W;
}

Iterate initial_iterate(const Scenario& s_in, const ChannelModel& model,
                        const AoOptions& opts) {
  const Scenario s = materialized(s_in);
  Iterate it;
  it.Q = straight_line_trajectory(s);
  const MALayout base = opts.layout_override ? *opts.layout_override : initial_layout(s);
  it.U.assign(s.num_slots, base);
  it.P = Eigen::MatrixXd::Constant(s.num_slots, s.num_users, s.p_max_w);
  const ChannelSet ch = compute_channels(model, it.Q, it.U);
  it.W.reserve(s.num_slots);
  for (int n = 0; n < s.num_slots; ++n) it.W.push_back(matched_filter(ch[n]));
  return it;
}

std::vector<std::string> feasibility_violations(const Iterate& it, const Scenario& s,
                                                double tol) {
  std::vector<std::string> out = kinematics_violations(it.Q, s, tol);
  for (int n = 0; n < s.num_slots; ++n) {
    for (int m = 0; m < s.num_users; ++m) {
      const double norm = it.W[n].col(m).norm();
      if (norm > 1.0 + tol) {
        std::ostringstream oss;
        oss << "slot " << n << ": beamformer " << m << " norm " << norm << " exceeds 1";
        out.push_back(oss.str());
      }
      if (it.P(n, m) < -tol || it.P(n, m) > s.p_max_w + tol) {
        std::ostringstream oss;
        oss << "slot " << n << ": power " << m << " = " << it.P(n, m) << " outside [0, "
            << s.p_max_w << "]";
        out.push_back(oss.str());
      }
    }
    const auto& pos = it.U[n].positions;
    for (std::size_t k = 0; k < pos.size(); ++k) {
      if (pos[k].x() < -tol || pos[k].x() > s.region_side_m + tol || pos[k].y() < -tol ||
          pos[k].y() > s.region_side_m + tol) {
        std::ostringstream oss;
        oss << "slot " << n << ": antenna " << k << " outside the region box";
        out.push_back(oss.str());
      }
      for (std::size_t j = k + 1; j < pos.size(); ++j) {
        if ((pos[k] - pos[j]).norm() < s.min_spacing_m - tol) {
          std::ostringstream oss;
          oss << "slot " << n << ": spacing between antennas " << k << " and " << j
              << " below minimum";
          out.push_back(oss.str());
        }
      }
    }
  }
  return out;
}

double sum_rate_ceiling(const ChannelModel& model) {
  const Scenario& s = model.scenario();
  const double gain = s.reference_gain / (s.altitude_m * s.altitude_m);
  const double snr =
      s.p_max_w * s.num_antennas * gain * model.max_small_scale_energy() / s.noise_power_w;
  return s.num_users * std::log2(1.0 + snr);
}

bool convergence_check(const std::vector<double>& trace, double eps) {
  if (trace.size() < 2) return false;
  return std::abs(trace.back() - trace[trace.size() - 2]) < eps;
}

AoResult ao_solve(const Scenario& s_in, const ChannelModel& model, const AoOptions& opts) {
  const Scenario s = materialized(s_in);

  AoResult res;
  res.iterate = initial_iterate(s, model, opts);
  res.channels = compute_channels(model, res.iterate.Q, res.iterate.U);
  {
    const auto v = feasibility_violations(res.iterate, s);
    if (!v.empty()) throw std::runtime_error("infeasible starting point: " + v.front());
  }
  // Beamforming warm start. The trajectory surrogate expands around the
  // current receive vectors, and matched filters at full power are a poor
  // stand-in for the tuned operating point: moves that look good against
  // them routinely die after the first proper beamforming pass. Tune the
  // beamformers once up front so every block starts from a point it would
  // have kept.
  bca_solve(res.iterate, res.channels, s, opts.threads, nullptr, &res.power_diag);
  res.trace.push_back(mean_sum_rate(res.iterate, res.channels, s.noise_power_w));
  if (opts.collect_history) res.history.push_back(res.iterate);

  for (int outer = 1; outer <= s.ao.max_iters; ++outer) {
    // Annealed acceptance bar for the placement blocks; see AoParams.
    const double placement_bar =
        s.ao.placement_deadband * std::pow(s.ao.placement_deadband_growth, outer - 1);
    if (opts.trajectory == TrajectoryEngine::kSca) {
      ScaResult sr = sca_solve(res.iterate, model, s);
      res.iterate.Q = std::move(sr.Q);
      res.channels = compute_channels(model, res.iterate.Q, res.iterate.U);
    }

    bca_solve(res.iterate, res.channels, s, opts.threads,
              opts.collect_traces ? &res.bca_trace : nullptr, &res.power_diag);

    if (opts.placement == PlacementEngine::kPso) {
      std::vector<PsoSlotResult> per_slot(s.num_slots);
      parallel_for(s.num_slots, opts.threads, [&](int n) {
        const SlotContext ctx = make_slot_context(model, res.iterate.Q[n]);
        const Eigen::VectorXd p_n = res.iterate.P.row(n).transpose();
        // one substream per slot, stable across outer iterations: a reseeded
        // swarm would keep finding marginal layouts forever and the outer
        // loop could never settle
        per_slot[n] = pso_solve_slot(ctx, res.iterate.U[n], res.iterate.W[n], p_n, s,
                                     derive_seed(s.rng_seed, stream::kPso,
                                                 static_cast<std::uint64_t>(n)));
      });
      for (int n = 0; n < s.num_slots; ++n) {
        if (per_slot[n].fell_back) ++res.pso_fallbacks;
        if (opts.collect_traces) {
          for (std::size_t t = 0; t < per_slot[n].best_trace.size(); ++t) {
            res.swarm_trace.push_back(
                {outer, n, static_cast<int>(t), per_slot[n].best_trace[t]});
          }
        }
        const Eigen::VectorXd p_n = res.iterate.P.row(n).transpose();
        const double kept = slot_sum_rate(res.iterate.W[n], p_n, res.channels[n],
                                          s.noise_power_w);
        if (!per_slot[n].fell_back &&
            per_slot[n].best_trace.back() >= kept + placement_bar) {
          res.iterate.U[n] = std::move(per_slot[n].layout);
        }
      }
      res.channels = compute_channels(model, res.iterate.Q, res.iterate.U);
    } else if (opts.placement == PlacementEngine::kMm) {
      std::vector<MmSlotResult> per_slot(s.num_slots);
      parallel_for(s.num_slots, opts.threads, [&](int n) {
        const SlotContext ctx = make_slot_context(model, res.iterate.Q[n]);
        const Eigen::VectorXd p_n = res.iterate.P.row(n).transpose();
        per_slot[n] = mm_solve_slot(ctx, res.iterate.U[n], res.iterate.W[n], p_n, s);
      });
      for (int n = 0; n < s.num_slots; ++n) {
        // Same hysteresis as the swarm path: the minorizer keeps finding
        // micrometre moves after every beamforming re-tune, and accepting
        // them would stall outer convergence on noise-level gains.
        if (per_slot[n].trace.back() >= per_slot[n].trace.front() + placement_bar) {
          res.iterate.U[n] = std::move(per_slot[n].layout);
        }
      }
      res.channels = compute_channels(model, res.iterate.Q, res.iterate.U);
    }

    const double rate = mean_sum_rate(res.iterate, res.channels, s.noise_power_w);
    if (rate < res.trace.back() - 1e-6) {
      std::ostringstream oss;
      oss << "sum rate regressed at outer iteration " << outer << ": " << res.trace.back()
          << " -> " << rate;
      throw std::runtime_error(oss.str());
    }
    {
      const auto v = feasibility_violations(res.iterate, s);
      if (!v.empty()) {
        throw std::runtime_error("infeasible iterate at outer iteration " +
                                 std::to_string(outer) + ": " + v.front());
      }
    }
    res.trace.push_back(rate);
    res.iterations = outer;
    if (opts.collect_history) res.history.push_back(res.iterate);
    if (convergence_check(res.trace, s.ao.eps)) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace lawnma

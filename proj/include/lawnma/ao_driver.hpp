// Alternating-optimization driver: trajectory (SCA), beamforming + power
// (WMMSE block-coordinate), antenna placement (PSO or MM), looped until the
// slot-averaged sum rate settles. The trace is checked non-decreasing; a
// violation beyond slack aborts with a diagnostic, since every block is an
// ascent step by construction.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lawnma/ma_pso.hpp"
#include "lawnma/rate.hpp"
#include "lawnma/wmmse.hpp"

namespace lawnma {

enum class PlacementEngine { kPso, kMm, kFixed };
enum class TrajectoryEngine { kSca, kFixed };

struct SwarmTraceRow {
  int outer = 0;
  int slot = 0;
  int t = 0;
  double best_fitness = 0.0;
};

struct AoOptions {
  PlacementEngine placement = PlacementEngine::kPso;
  TrajectoryEngine trajectory = TrajectoryEngine::kSca;
  std::optional<MALayout> layout_override;  // initial layout (all slots)
  int threads = 1;
  bool collect_traces = false;   // keep per-sweep BCA and swarm traces
  bool collect_history = false;  // keep every outer iterate for audits
};

struct AoResult {
  Iterate iterate;
  ChannelSet channels;
  std::vector<double> trace;  // slot-averaged sum rate; entry 0 = initial point
  int iterations = 0;
  bool converged = false;
  int pso_fallbacks = 0;
  PowerDiag power_diag;
  std::vector<BcaSweepRow> bca_trace;
  std::vector<SwarmTraceRow> swarm_trace;
  std::vector<Iterate> history;
};

[[nodiscard]] MALayout initial_layout(const Scenario& s);
[[nodiscard]] std::vector<Vec2> straight_line_trajectory(const Scenario& s);
// Column m = h_m / ||h_m||.
[[nodiscard]] Eigen::MatrixXcd matched_filter(const SlotChannels& H_n);
[[nodiscard]] Iterate initial_iterate(const Scenario& s, const ChannelModel& model,
                                      const AoOptions& opts);

// Empty when the iterate satisfies every constraint within tol: endpoints,
// per-hop speed, acceleration, antenna region box, pairwise spacing,
// beamformer norms, power box.
[[nodiscard]] std::vector<std::string> feasibility_violations(const Iterate& it,
                                                              const Scenario& s,
                                                              double tol = 1e-9);

// Slot-averaged upper bound on the achievable sum rate for this mission's
// realized small-scale coefficients.
[[nodiscard]] double sum_rate_ceiling(const ChannelModel& model);

// True when the last trace step changed by less than eps.
[[nodiscard]] bool convergence_check(const std::vector<double>& trace, double eps);

[[nodiscard]] AoResult ao_solve(const Scenario& s, const ChannelModel& model,
                                const AoOptions& opts);

}  // namespace lawnma

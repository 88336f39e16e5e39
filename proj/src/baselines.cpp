#include "lawnma/baselines.hpp"

#include <algorithm>
#include <cmath>

namespace lawnma {

const char* scheme_tag(Scheme s) {
  switch (s) {
    case Scheme::kProposed:
      return "proposed";
    case Scheme::kAoMm:
      return "ao-mm";
    case Scheme::kFixedTraj:
      return "fixed-traj";
    case Scheme::kFpa:
      return "fpa";
  }
  return "unknown";
}

bool parse_scheme(const std::string& tag, Scheme* out) {
  for (Scheme s : kAllSchemes) {
    if (tag == scheme_tag(s)) {
      *out = s;
      return true;
    }
  }
  return false;
}

MALayout fpa_layout(const Scenario& s) {
  const int K = s.num_antennas;
  const int per_axis = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(K))));
  // padded one part in 1e9 so rounding in the grid arithmetic cannot push a
  // neighbour distance below the spacing floor
  const double spacing = 0.5 * s.wavelength_m * (1.0 + 1e-9);
  const int cols_used = std::min(K, per_axis);
  const int rows_used = (K + per_axis - 1) / per_axis;
  const double off_x = (s.region_side_m - (cols_used - 1) * spacing) / 2.0;
  const double off_y = (s.region_side_m - (rows_used - 1) * spacing) / 2.0;
  MALayout u;
  u.positions.reserve(K);
  for (int i = 0; i < K; ++i) {
    u.positions.emplace_back(off_x + (i % per_axis) * spacing,
                             off_y + (i / per_axis) * spacing);
  }
  return u;
}

std::vector<Vec2> fixed_trajectory(const Scenario& s) { return straight_line_trajectory(s); }

AoOptions scheme_options(Scheme scheme, const Scenario& s, int threads, bool collect_traces,
                         bool collect_history) {
  AoOptions opts;
  opts.threads = threads;
  opts.collect_traces = collect_traces;
  opts.collect_history = collect_history;
  switch (scheme) {
    case Scheme::kProposed:
      break;
    case Scheme::kAoMm:
      opts.placement = PlacementEngine::kMm;
      break;
    case Scheme::kFixedTraj:
      opts.trajectory = TrajectoryEngine::kFixed;
      break;
    case Scheme::kFpa:
      opts.placement = PlacementEngine::kFixed;
      opts.layout_override = fpa_layout(s);
      break;
  }
  return opts;
}

AoResult run_scheme(Scheme scheme, const Scenario& s, const ChannelModel& model, int threads,
                    bool collect_traces, bool collect_history) {
  return ao_solve(s, model,
                  scheme_options(scheme, s, threads, collect_traces, collect_history));
}

}  // namespace lawnma

// Benchmark schemes sharing one channel realization per seed: the proposed
// design (SCA + WMMSE + PSO), the MM placement variant, a fixed straight-line
// trajectory, and a fixed half-wavelength antenna grid.
#pragma once

#include <array>
#include <string>

#include "lawnma/ao_driver.hpp"

namespace lawnma {

enum class Scheme { kProposed, kAoMm, kFixedTraj, kFpa };

inline constexpr std::array<Scheme, 4> kAllSchemes = {Scheme::kProposed, Scheme::kAoMm,
                                                      Scheme::kFixedTraj, Scheme::kFpa};

[[nodiscard]] const char* scheme_tag(Scheme s);  // proposed | ao-mm | fixed-traj | fpa
[[nodiscard]] bool parse_scheme(const std::string& tag, Scheme* out);

// ceil(sqrt(K)) x ceil(sqrt(K)) grid at half-wavelength spacing, centered in
// the region, first K nodes.
[[nodiscard]] MALayout fpa_layout(const Scenario& s);
// Straight line at constant speed between the mission endpoints.
[[nodiscard]] std::vector<Vec2> fixed_trajectory(const Scenario& s);

[[nodiscard]] AoOptions scheme_options(Scheme scheme, const Scenario& s, int threads,
                                       bool collect_traces = false,
                                       bool collect_history = false);
[[nodiscard]] AoResult run_scheme(Scheme scheme, const Scenario& s, const ChannelModel& model,
                                  int threads, bool collect_traces = false,
                                  bool collect_history = false);

}  // namespace lawnma

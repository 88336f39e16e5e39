// Mission scenario: geometry, radio constants, and solver knobs, plus JSON
// config loading and validation.
#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace lawnma {

using Vec2 = Eigen::Vector2d;

struct PsoParams {
  int num_particles = 100;
  int max_iters = 100;
  double l1 = 1.4;
  double l2 = 1.4;
  double chi_min = 0.4;
  double chi_max = 0.9;
  double penalty = 20.0;
  // false: one scalar draw per (particle, iteration) for each of R1/R2,
  // applied to all coordinates; true: independent per-coordinate draws.
  bool per_coordinate_rand = false;
};

struct AoParams {
  double eps = 1e-3;
  int max_iters = 25;
  // A placement re-run almost always scrapes up some marginal layout, the
  // beamformers re-adapt, and the pair crawls forever. Keep a placement
  // result only when it clears the incumbent by this much (per-slot sum
  // rate); below that the block is treated as settled.
  double placement_deadband = 0.02;
  // The bar rises by this factor every outer iteration. A constant bar
  // cannot both admit the early basin hops and refuse the late trickle
  // (the trickle rungs shrink toward whatever the bar is), so the
  // placement blocks are given a deadline instead: cheap moves early,
  // idempotence late. Kept gentle: a steep schedule rejects moves whose
  // potential then accumulates and clears the bar later anyway, in larger
  // and later pulses.
  double placement_deadband_growth = 1.1;
};

struct BcaParams {
  // Markedly tighter than the outer loop's eps: the sweep's late progress is
  // slow but real, and a loosely stopped inner solve leaks the remainder into
  // the next outer iteration's delta, which then never falls below its own
  // threshold.
  double eps = 1e-6;
  int max_iters = 2000;
};

struct ScaParams {
  double eps = 1e-4;
  int max_iters = 25;
  double phi0 = 0.0;  // trust radius; <= 0 means v_max * tau / 2
  double shrink = 0.5;
  double phi_min = 1e-3;  // metres; loop exits once the radius shrinks below
};

struct MmParams {
  double eps = 1e-7;
  // The minorizer's curvature constant is conservative by the 1-norm bound,
  // so individual steps are micrometres; the budget has to be generous or
  // the method stalls long before its stationary point.
  int max_sweeps = 40000;
  bool refresh_per_antenna = false;  // refresh (beta, omega) inside the antenna loop
};

struct Scenario {
  double mission_period_s = 40.0;  // T
  int num_slots = 20;              // N
  double slot_duration_s = 2.0;    // tau = T / N
  int num_users = 4;               // M
  std::vector<Vec2> user_positions;  // drawn from rng_seed when left empty
  double area_side_m = 800.0;
  double altitude_m = 50.0;  // H
  Vec2 start_position{0.0, 0.0};
  Vec2 end_position{800.0, 800.0};
  double v_max_mps = 30.0;
  double a_max_mps2 = 10.0;
  int num_antennas = 4;        // K
  double region_side_m = 0.4;  // movable-antenna region side (4 wavelengths)
  double min_spacing_m = 0.05;       // d_min
  double wavelength_m = 0.1;
  int num_paths = 4;  // L
  double angular_spread_rad = 0.2617993877991494;  // pi / 12
  double rician_kappa = 15.0;
  double reference_gain = 1e-6;   // channel power at 1 m (-60 dB)
  double noise_power_w = 1e-14;   // sigma^2 (-110 dBm)
  double p_max_w = 1.0;
  std::uint64_t rng_seed = 1;
  // true: azimuth from arccos of the normalized y offset only, which drops
  // the sign of the x offset; false: quadrant-corrected via atan2(dx, dy).
  bool unsigned_azimuth = false;

  PsoParams pso;
  AoParams ao;
  BcaParams bca;
  ScaParams sca;
  MmParams mm;

  [[nodiscard]] double sca_phi0() const {
    return sca.phi0 > 0.0 ? sca.phi0 : 0.5 * v_max_mps * slot_duration_s;
  }
};

[[nodiscard]] double db_to_linear(double db);
[[nodiscard]] double linear_to_db(double lin);
[[nodiscard]] double dbm_to_watts(double dbm);
[[nodiscard]] double watts_to_dbm(double watts);

// Full-scale mission configuration.
[[nodiscard]] Scenario default_scenario();
// Smaller setup (fewer slots, lighter swarms) sized for quick studies.
[[nodiscard]] Scenario desk_scenario();

// Copy with user positions drawn from rng_seed if they were left empty.
// Idempotent; every consumer of a Scenario that needs ground nodes calls it.
[[nodiscard]] Scenario materialized(Scenario s);

struct ValidationReport {
  std::vector<std::string> failures;
  [[nodiscard]] bool ok() const { return failures.empty(); }
  [[nodiscard]] std::string to_string() const;
};

[[nodiscard]] ValidationReport validate(const Scenario& s);

// Strict JSON config loading: unknown keys are an error. dB-valued radio
// constants ("reference_gain_db", "noise_power_dbm") are converted on load.
[[nodiscard]] Scenario load_scenario_json(const std::string& text);
[[nodiscard]] Scenario load_scenario_file(const std::string& path);

}  // namespace lawnma

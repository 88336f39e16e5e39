// Experiment harness: full missions, parameter sweeps, and rate CDFs, with
// deterministic CSV/JSON outputs.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lawnma/baselines.hpp"

namespace lawnma {

struct MissionOutputs {
  std::map<Scheme, AoResult> results;  // ordered by enum for stable output
};

[[nodiscard]] MissionOutputs run_mission(const Scenario& s, const std::vector<Scheme>& schemes,
                                         int threads, bool collect_traces = false);

struct RunOptions {
  bool traces = false;         // also write bca_trace.csv and swarm_trace.csv
  bool dump_channels = false;  // write channels.csv for the first scheme's final trajectory
};

// Writes convergence.csv, trajectory.csv, rates.csv, final_state.json (and
// optional trace dumps) into out_dir.
void write_run_outputs(const MissionOutputs& out, const Scenario& s,
                       const ChannelModel& model, const std::vector<Scheme>& schemes,
                       const std::string& out_dir, const RunOptions& opts);

enum class SweepParam { kPMax, kNumAntennas, kNumPaths, kRegionSide, kVMax };

[[nodiscard]] std::optional<SweepParam> parse_sweep_param(const std::string& name);
[[nodiscard]] const char* sweep_param_name(SweepParam p);
[[nodiscard]] Scenario apply_sweep_value(Scenario base, SweepParam param, double value);

struct SweepRow {
  Scheme scheme{};
  double value = 0.0;
  std::uint64_t seed = 0;
  double mean_rate = 0.0;  // slot-averaged final sum rate
};

// Grid = values x seeds (seeds are base.rng_seed .. +num_seeds-1); every
// point runs all schemes on a shared channel realization. Points execute on
// a dynamic work queue; outputs are ordered deterministically regardless of
// thread count.
[[nodiscard]] std::vector<SweepRow> run_sweep(const Scenario& base, SweepParam param,
                                              const std::vector<double>& values,
                                              int num_seeds,
                                              const std::vector<Scheme>& schemes,
                                              int threads);
void write_sweep_outputs(const std::vector<SweepRow>& rows, SweepParam param,
                         const std::string& out_dir);
// Seed means in (scheme, value) order.
[[nodiscard]] std::map<std::pair<Scheme, double>, double> sweep_seed_means(
    const std::vector<SweepRow>& rows);

struct CdfOutputs {
  std::vector<double> thresholds;                    // 200 evenly spaced from 0
  std::map<Scheme, std::vector<double>> fraction_below;  // P(rate <= threshold)
  std::map<Scheme, std::vector<double>> pooled;      // per-(user, slot) rates
};

[[nodiscard]] CdfOutputs run_cdf(const Scenario& base, int num_seeds,
                                 const std::vector<Scheme>& schemes, int threads);
void write_cdf_outputs(const CdfOutputs& out, const std::string& out_dir);

// "%.12g"-formatted value, the one formatter used for every CSV double.
[[nodiscard]] std::string format_double(double v);

}  // namespace lawnma

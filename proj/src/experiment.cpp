#include "lawnma/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "lawnma/parallel.hpp"

namespace lawnma {

namespace {

std::ofstream open_out(const std::string& dir, const char* name) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / name, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(std::string("cannot open output file: ") + name);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

MissionOutputs run_mission(const Scenario& s_in, const std::vector<Scheme>& schemes,
                           int threads, bool collect_traces) {
  const Scenario s = materialized(s_in);
  const ChannelModel model(s);
  MissionOutputs out;
  for (Scheme scheme : schemes) {
    if (out.results.count(scheme)) continue;
    out.results.emplace(scheme, run_scheme(scheme, s, model, threads, collect_traces));
  }
  return out;
}

void write_run_outputs(const MissionOutputs& out, const Scenario& s_in,
                       const ChannelModel& model, const std::vector<Scheme>& schemes,
                       const std::string& out_dir, const RunOptions& opts) {
  const Scenario s = materialized(s_in);

  {
    auto f = open_out(out_dir, "convergence.csv");
    f << "scheme,iteration,mean_sum_rate\n";
    for (const auto& [scheme, r] : out.results) {
      for (std::size_t i = 0; i < r.trace.size(); ++i) {
        f << scheme_tag(scheme) << ',' << i << ',' << format_double(r.trace[i]) << '\n';
      }
    }
  }
  {
    auto f = open_out(out_dir, "trajectory.csv");
    f << "scheme,slot,x,y\n";
    for (const auto& [scheme, r] : out.results) {
      for (int n = 0; n < s.num_slots; ++n) {
        f << scheme_tag(scheme) << ',' << n << ',' << format_double(r.iterate.Q[n].x()) << ','
          << format_double(r.iterate.Q[n].y()) << '\n';
      }
    }
  }
  {
    auto f = open_out(out_dir, "rates.csv");
    f << "scheme,slot,user,rate\n";
    for (const auto& [scheme, r] : out.results) {
      const Eigen::MatrixXd rates = per_user_rates(r.iterate, r.channels, s.noise_power_w);
      for (int n = 0; n < rates.rows(); ++n) {
        for (int m = 0; m < rates.cols(); ++m) {
          f << scheme_tag(scheme) << ',' << n << ',' << m << ','
            << format_double(rates(n, m)) << '\n';
        }
      }
    }
  }
  {
    nlohmann::json doc;
    doc["sum_rate_ceiling"] = sum_rate_ceiling(model);
    nlohmann::json sch = nlohmann::json::object();
    for (const auto& [scheme, r] : out.results) {
      nlohmann::json e;
      e["iterations"] = r.iterations;
      e["converged"] = r.converged;
      e["mean_sum_rate"] = r.trace.back();
      e["trace"] = r.trace;
      e["pso_fallbacks"] = r.pso_fallbacks;
      e["power_zero_denominator"] = r.power_diag.zero_denominator;
      e["power_negative_stationary"] = r.power_diag.negative_stationary;

      nlohmann::json traj = nlohmann::json::array();
      for (const auto& q : r.iterate.Q) traj.push_back({q.x(), q.y()});
      e["trajectory"] = std::move(traj);

      nlohmann::json layouts = nlohmann::json::array();
      for (const auto& u : r.iterate.U) {
        nlohmann::json slot = nlohmann::json::array();
        for (const auto& pos : u.positions) slot.push_back({pos.x(), pos.y()});
        layouts.push_back(std::move(slot));
      }
      e["layouts"] = std::move(layouts);

      nlohmann::json powers = nlohmann::json::array();
      for (int n = 0; n < r.iterate.P.rows(); ++n) {
        nlohmann::json row = nlohmann::json::array();
        for (int m = 0; m < r.iterate.P.cols(); ++m) row.push_back(r.iterate.P(n, m));
        powers.push_back(std::move(row));
      }
      e["powers"] = std::move(powers);

      sch[scheme_tag(scheme)] = std::move(e);
    }
    doc["schemes"] = std::move(sch);
    auto f = open_out(out_dir, "final_state.json");
    f << doc.dump(2) << '\n';
  }
  if (opts.traces) {
    {
      auto f = open_out(out_dir, "bca_trace.csv");
      f << "scheme,slot,sweep,surrogate,true_rate\n";
      for (const auto& [scheme, r] : out.results) {
        for (const auto& row : r.bca_trace) {
          f << scheme_tag(scheme) << ',' << row.slot << ',' << row.sweep << ','
            << format_double(row.surrogate) << ',' << format_double(row.true_rate) << '\n';
        }
      }
    }
    {
      auto f = open_out(out_dir, "swarm_trace.csv");
      f << "scheme,outer,slot,t,best_fitness\n";
      for (const auto& [scheme, r] : out.results) {
        for (const auto& row : r.swarm_trace) {
          f << scheme_tag(scheme) << ',' << row.outer << ',' << row.slot << ',' << row.t << ','
            << format_double(row.best_fitness) << '\n';
        }
      }
    }
  }
  if (opts.dump_channels && !schemes.empty()) {
    auto first = out.results.find(schemes.front());
    if (first == out.results.end()) first = out.results.begin();
    if (first != out.results.end()) {
      auto f = open_out(out_dir, "channels.csv");
      f << "slot,user,antenna,re,im\n";
      const ChannelSet& ch = first->second.channels;
      for (std::size_t n = 0; n < ch.size(); ++n) {
        for (int m = 0; m < ch[n].cols(); ++m) {
          for (int k = 0; k < ch[n].rows(); ++k) {
            f << n << ',' << m << ',' << k << ',' << format_double(ch[n](k, m).real()) << ','
              << format_double(ch[n](k, m).imag()) << '\n';
          }
        }
      }
    }
  }
}

std::optional<SweepParam> parse_sweep_param(const std::string& name) {
  for (SweepParam p : {SweepParam::kPMax, SweepParam::kNumAntennas, SweepParam::kNumPaths,
                       SweepParam::kRegionSide, SweepParam::kVMax}) {
    if (name == sweep_param_name(p)) return p;
  }
  return std::nullopt;
}

const char* sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::kPMax:
      return "p_max";
    case SweepParam::kNumAntennas:
      return "num_antennas";
    case SweepParam::kNumPaths:
      return "num_paths";
    case SweepParam::kRegionSide:
      return "region_side";
    case SweepParam::kVMax:
      return "v_max";
  }
  return "unknown";
}

Scenario apply_sweep_value(Scenario base, SweepParam param, double value) {
  switch (param) {
    case SweepParam::kPMax:
      base.p_max_w = value;
      break;
    case SweepParam::kNumAntennas:
      base.num_antennas = static_cast<int>(std::lround(value));
      break;
    case SweepParam::kNumPaths:
      base.num_paths = static_cast<int>(std::lround(value));
      break;
    case SweepParam::kRegionSide:
      base.region_side_m = value;
      break;
    case SweepParam::kVMax:
      base.v_max_mps = value;
      break;
  }
  return base;
}

std::vector<SweepRow> run_sweep(const Scenario& base, SweepParam param,
                                const std::vector<double>& values, int num_seeds,
                                const std::vector<Scheme>& schemes, int threads) {
  struct Point {
    double value;
    std::uint64_t seed;
  };
  std::vector<Point> points;
  points.reserve(values.size() * static_cast<std::size_t>(num_seeds));
  for (double v : values) {
    for (int i = 0; i < num_seeds; ++i) {
      points.push_back({v, base.rng_seed + static_cast<std::uint64_t>(i)});
    }
  }

  std::vector<std::vector<double>> rates(points.size(),
                                         std::vector<double>(schemes.size(), 0.0));
  const int inner_threads = threads > 1 ? 1 : threads;
  parallel_for(static_cast<int>(points.size()), threads, [&](int i) {
    Scenario s = apply_sweep_value(base, param, points[i].value);
    s.rng_seed = points[i].seed;
    s = materialized(s);
    const ValidationReport report = validate(s);
    if (!report.ok()) {
      throw std::runtime_error("invalid sweep scenario: " + report.to_string());
    }
    const ChannelModel model(s);
    for (std::size_t j = 0; j < schemes.size(); ++j) {
      rates[i][j] = run_scheme(schemes[j], s, model, inner_threads).trace.back();
    }
  });

  std::vector<SweepRow> rows;
  rows.reserve(points.size() * schemes.size());
  for (std::size_t j = 0; j < schemes.size(); ++j) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      rows.push_back({schemes[j], points[i].value, points[i].seed, rates[i][j]});
    }
  }
  return rows;
}

void write_sweep_outputs(const std::vector<SweepRow>& rows, SweepParam param,
                         const std::string& out_dir) {
  {
    auto f = open_out(out_dir, "sweep.csv");
    f << "param,scheme,value,seed,mean_rate\n";
    for (const auto& r : rows) {
      f << sweep_param_name(param) << ',' << scheme_tag(r.scheme) << ','
        << format_double(r.value) << ',' << r.seed << ',' << format_double(r.mean_rate)
        << '\n';
    }
  }
  {
    auto f = open_out(out_dir, "sweep_summary.csv");
    f << "param,scheme,value,mean_rate\n";
    for (const auto& [key, mean] : sweep_seed_means(rows)) {
      f << sweep_param_name(param) << ',' << scheme_tag(key.first) << ','
        << format_double(key.second) << ',' << format_double(mean) << '\n';
    }
  }
}

std::map<std::pair<Scheme, double>, double> sweep_seed_means(
    const std::vector<SweepRow>& rows) {
  std::map<std::pair<Scheme, double>, std::pair<double, int>> acc;
  for (const auto& r : rows) {
    auto& a = acc[{r.scheme, r.value}];
    a.first += r.mean_rate;
    ++a.second;
  }
  std::map<std::pair<Scheme, double>, double> out;
  for (const auto& [key, a] : acc) out[key] = a.first / a.second;
  return out;
}

CdfOutputs run_cdf(const Scenario& base, int num_seeds, const std::vector<Scheme>& schemes,
                   int threads) {
  std::vector<std::map<Scheme, std::vector<double>>> per_seed(num_seeds);
  const int inner_threads = threads > 1 ? 1 : threads;
  parallel_for(num_seeds, threads, [&](int i) {
    Scenario s = base;
    s.rng_seed = base.rng_seed + static_cast<std::uint64_t>(i);
    s = materialized(s);
    const ChannelModel model(s);
    for (Scheme scheme : schemes) {
      const AoResult r = run_scheme(scheme, s, model, inner_threads);
      const Eigen::MatrixXd rates = per_user_rates(r.iterate, r.channels, s.noise_power_w);
      std::vector<double>& dst = per_seed[i][scheme];
      dst.reserve(static_cast<std::size_t>(rates.size()));
      for (int n = 0; n < rates.rows(); ++n) {
        for (int m = 0; m < rates.cols(); ++m) dst.push_back(rates(n, m));
      }
    }
  });

  CdfOutputs out;
  for (const auto& seed_map : per_seed) {
    for (const auto& [scheme, v] : seed_map) {
      auto& pool = out.pooled[scheme];
      pool.insert(pool.end(), v.begin(), v.end());
    }
  }
  double max_rate = 0.0;
  for (const auto& [scheme, pool] : out.pooled) {
    for (double r : pool) max_rate = std::max(max_rate, r);
  }
  if (max_rate <= 0.0) max_rate = 1.0;

  constexpr int kPoints = 200;
  out.thresholds.resize(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    out.thresholds[i] = max_rate * static_cast<double>(i) / (kPoints - 1);
  }
  for (const auto& [scheme, pool] : out.pooled) {
    auto& frac = out.fraction_below[scheme];
    frac.resize(kPoints);
    for (int i = 0; i < kPoints; ++i) {
      std::size_t cnt = 0;
      for (double r : pool) cnt += r <= out.thresholds[i];
      frac[i] = pool.empty() ? 0.0 : static_cast<double>(cnt) / static_cast<double>(pool.size());
    }
  }
  return out;
}

void write_cdf_outputs(const CdfOutputs& out, const std::string& out_dir) {
  auto f = open_out(out_dir, "cdf.csv");
  f << "scheme,threshold,fraction\n";
  for (const auto& [scheme, frac] : out.fraction_below) {
    for (std::size_t i = 0; i < frac.size(); ++i) {
      f << scheme_tag(scheme) << ',' << format_double(out.thresholds[i]) << ','
        << format_double(frac[i]) << '\n';
    }
  }
}

}  // namespace lawnma

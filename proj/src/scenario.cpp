#include "lawnma/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "lawnma/rng.hpp"

namespace lawnma {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
double dbm_to_watts(double dbm) { return db_to_linear(dbm - 30.0); }
double watts_to_dbm(double watts) { return linear_to_db(watts) + 30.0; }

Scenario default_scenario() { return Scenario{}; }

Scenario desk_scenario() {
  Scenario s;
  // stretch the mission so the diagonal stays reachable with 9 hops
  s.mission_period_s = 44.0;
  s.num_slots = 10;
  s.slot_duration_s = 4.4;
  // More receiver noise than the full-scale default. With only 10 slots the
  // mission spends little time near any user, and at the full-scale noise
  // floor every user is deep in the interference-limited regime where
  // pathloss cancels out of the SINR and the trajectory stops mattering.
  // A higher floor restores the power-limited operating point the full
  // mission reaches, so the same block structure is exercised.
  s.noise_power_w = dbm_to_watts(-80.0);
  s.pso.num_particles = 40;
  s.pso.max_iters = 40;
  s.ao.max_iters = 15;
  return s;
}

Scenario materialized(Scenario s) {
  if (s.user_positions.empty()) {
    Rng rng(derive_seed(s.rng_seed, stream::kUserPositions));
    s.user_positions.reserve(s.num_users);
    for (int m = 0; m < s.num_users; ++m) {
      const double x = rng.uniform(0.0, s.area_side_m);
      const double y = rng.uniform(0.0, s.area_side_m);
      s.user_positions.emplace_back(x, y);
    }
  }
  return s;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& f : failures) os << f << '\n';
  return os.str();
}

namespace {

// K points with pairwise spacing d in a square of side L: a uniform grid with
// pitch d certainly fits floor(L/d)+1 points per axis; two points always fit
// when the diagonal is long enough.
bool placement_fits(int k, double d, double side) {
  if (k <= 1 || d <= 0.0) return true;
  const int per_axis = static_cast<int>(std::floor(side / d)) + 1;
  if (static_cast<long long>(per_axis) * per_axis >= k) return true;
  if (k == 2 && d <= std::sqrt(2.0) * side * (1.0 + 1e-12)) return true;
  return false;
}

}  // namespace

ValidationReport validate(const Scenario& s) {
  ValidationReport rep;
  auto fail = [&rep](const std::string& msg) { rep.failures.push_back(msg); };

  if (s.mission_period_s <= 0.0) fail("mission period must be positive");
  if (s.num_slots < 2) fail("need at least 2 slots");
  if (s.slot_duration_s <= 0.0) fail("slot duration must be positive");
  if (std::abs(s.slot_duration_s * s.num_slots - s.mission_period_s) >
      1e-9 * std::max(1.0, s.mission_period_s)) {
    fail("slot duration inconsistent with mission period and slot count");
  }
  if (s.num_users < 1) fail("need at least one user");
  if (s.area_side_m <= 0.0) fail("area side must be positive");
  if (s.altitude_m <= 0.0) fail("altitude must be positive");
  if (s.v_max_mps <= 0.0) fail("max speed must be positive");
  if (s.a_max_mps2 <= 0.0) fail("max acceleration must be positive");
  if (s.num_antennas < 1) fail("need at least one antenna");
  if (s.region_side_m <= 0.0) fail("antenna region side must be positive");
  if (s.min_spacing_m < 0.0) fail("min spacing must be nonnegative");
  if (s.wavelength_m <= 0.0) fail("wavelength must be positive");
  if (s.num_paths < 1) fail("need at least one propagation path");
  if (s.angular_spread_rad < 0.0) fail("angular spread must be nonnegative");
  if (s.rician_kappa < 0.0) fail("rician factor must be nonnegative");
  if (s.reference_gain <= 0.0) fail("reference gain must be positive");
  if (s.noise_power_w <= 0.0) fail("noise power must be positive");
  if (s.p_max_w <= 0.0) fail("power budget must be positive");

  auto in_area = [&s](const Vec2& p) {
    return p.x() >= 0.0 && p.x() <= s.area_side_m && p.y() >= 0.0 && p.y() <= s.area_side_m;
  };
  if (!in_area(s.start_position)) fail("start position outside the area");
  if (!in_area(s.end_position)) fail("end position outside the area");
  if (!s.user_positions.empty()) {
    if (s.user_positions.size() != static_cast<std::size_t>(s.num_users)) {
      fail("user position count does not match num_users");
    }
    for (const auto& u : s.user_positions) {
      if (!in_area(u)) fail("user position outside the area");
    }
  }

  const double span = (s.end_position - s.start_position).norm();
  if (span > s.v_max_mps * s.mission_period_s * (1.0 + 1e-12)) {
    fail("endpoint unreachable: span exceeds v_max * T");
  } else if (s.num_slots >= 2 &&
             span > s.v_max_mps * s.slot_duration_s * (s.num_slots - 1) * (1.0 + 1e-12)) {
    fail("endpoint unreachable: span exceeds the (N-1)-hop budget");
  }

  if (!placement_fits(s.num_antennas, s.min_spacing_m, s.region_side_m)) {
    fail("placement infeasible: region too small for the spacing constraint");
  }

  if (s.pso.num_particles < 1) fail("need at least one particle");
  if (s.pso.max_iters < 1) fail("need at least one swarm iteration");
  if (s.pso.chi_min > s.pso.chi_max) fail("inertia bounds are inverted");
  if (s.pso.penalty < 0.0) fail("penalty factor must be nonnegative");
  if (s.ao.eps <= 0.0 || s.bca.eps <= 0.0 || s.sca.eps <= 0.0 || s.mm.eps <= 0.0) {
    fail("convergence thresholds must be positive");
  }
  if (s.ao.max_iters < 1 || s.bca.max_iters < 1 || s.sca.max_iters < 1 || s.mm.max_sweeps < 1) {
    fail("iteration caps must be positive");
  }
  if (s.sca.shrink <= 0.0 || s.sca.shrink >= 1.0) fail("trust-region shrink must be in (0,1)");
  if (s.sca.phi_min <= 0.0) fail("trust-region floor must be positive");
  if (s.ao.placement_deadband < 0.0) fail("placement deadband must be nonnegative");
  if (s.ao.placement_deadband_growth < 1.0) fail("placement deadband growth must be >= 1");

  return rep;
}

namespace {

using nlohmann::json;

[[noreturn]] void unknown_key(const std::string& scope, const std::string& key) {
  throw std::runtime_error("unknown config key: " + scope + key);
}

Vec2 parse_vec2(const json& j, const std::string& name) {
  if (!j.is_array() || j.size() != 2) {
    throw std::runtime_error("config key " + name + " must be a [x, y] pair");
  }
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

void parse_pso(const json& j, PsoParams& p) {
  for (const auto& [key, val] : j.items()) {
    if (key == "num_particles") p.num_particles = val.get<int>();
    else if (key == "max_iters") p.max_iters = val.get<int>();
    else if (key == "l1") p.l1 = val.get<double>();
    else if (key == "l2") p.l2 = val.get<double>();
    else if (key == "chi_min") p.chi_min = val.get<double>();
    else if (key == "chi_max") p.chi_max = val.get<double>();
    else if (key == "penalty") p.penalty = val.get<double>();
    else if (key == "per_coordinate_rand") p.per_coordinate_rand = val.get<bool>();
    else unknown_key("pso.", key);
  }
}

void parse_ao(const json& j, AoParams& p) {
  for (const auto& [key, val] : j.items()) {
    if (key == "eps") p.eps = val.get<double>();
    else if (key == "max_iters") p.max_iters = val.get<int>();
    else if (key == "placement_deadband") p.placement_deadband = val.get<double>();
    else if (key == "placement_deadband_growth") p.placement_deadband_growth = val.get<double>();
    else unknown_key("ao.", key);
  }
}

void parse_bca(const json& j, BcaParams& p) {
  for (const auto& [key, val] : j.items()) {
    if (key == "eps") p.eps = val.get<double>();
    else if (key == "max_iters") p.max_iters = val.get<int>();
    else unknown_key("bca.", key);
  }
}

void parse_sca(const json& j, ScaParams& p) {
  for (const auto& [key, val] : j.items()) {
    if (key == "eps") p.eps = val.get<double>();
    else if (key == "max_iters") p.max_iters = val.get<int>();
    else if (key == "phi0") p.phi0 = val.get<double>();
    else if (key == "shrink") p.shrink = val.get<double>();
    else if (key == "phi_min") p.phi_min = val.get<double>();
    else unknown_key("sca.", key);
  }
}

void parse_mm(const json& j, MmParams& p) {
  for (const auto& [key, val] : j.items()) {
    if (key == "eps") p.eps = val.get<double>();
    else if (key == "max_sweeps") p.max_sweeps = val.get<int>();
    else if (key == "refresh_per_antenna") p.refresh_per_antenna = val.get<bool>();
    else unknown_key("mm.", key);
  }
}

}  // namespace

Scenario load_scenario_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config root must be a JSON object");

  Scenario s;
  bool have_tau = false;
  for (const auto& [key, val] : j.items()) {
    if (key == "mission_period_s") s.mission_period_s = val.get<double>();
    else if (key == "num_slots") s.num_slots = val.get<int>();
    else if (key == "slot_duration_s") { s.slot_duration_s = val.get<double>(); have_tau = true; }
    else if (key == "num_users") s.num_users = val.get<int>();
    else if (key == "user_positions") {
      s.user_positions.clear();
      for (const auto& u : val) s.user_positions.push_back(parse_vec2(u, "user_positions"));
    }
    else if (key == "area_side_m") s.area_side_m = val.get<double>();
    else if (key == "altitude_m") s.altitude_m = val.get<double>();
    else if (key == "start_position") s.start_position = parse_vec2(val, "start_position");
    else if (key == "end_position") s.end_position = parse_vec2(val, "end_position");
    else if (key == "v_max_mps") s.v_max_mps = val.get<double>();
    else if (key == "a_max_mps2") s.a_max_mps2 = val.get<double>();
    else if (key == "num_antennas") s.num_antennas = val.get<int>();
    else if (key == "region_side_m") s.region_side_m = val.get<double>();
    else if (key == "min_spacing_m") s.min_spacing_m = val.get<double>();
    else if (key == "wavelength_m") s.wavelength_m = val.get<double>();
    else if (key == "num_paths") s.num_paths = val.get<int>();
    else if (key == "angular_spread_rad") s.angular_spread_rad = val.get<double>();
    else if (key == "rician_kappa") s.rician_kappa = val.get<double>();
    else if (key == "reference_gain") s.reference_gain = val.get<double>();
    else if (key == "reference_gain_db") s.reference_gain = db_to_linear(val.get<double>());
    else if (key == "noise_power_w") s.noise_power_w = val.get<double>();
    else if (key == "noise_power_dbm") s.noise_power_w = dbm_to_watts(val.get<double>());
    else if (key == "p_max_w") s.p_max_w = val.get<double>();
    else if (key == "rng_seed") s.rng_seed = val.get<std::uint64_t>();
    else if (key == "unsigned_azimuth") s.unsigned_azimuth = val.get<bool>();
    else if (key == "pso") parse_pso(val, s.pso);
    else if (key == "ao") parse_ao(val, s.ao);
    else if (key == "bca") parse_bca(val, s.bca);
    else if (key == "sca") parse_sca(val, s.sca);
    else if (key == "mm") parse_mm(val, s.mm);
    else unknown_key("", key);
  }
  if (!have_tau && s.num_slots > 0) s.slot_duration_s = s.mission_period_s / s.num_slots;
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario_json(buf.str());
}

}  // namespace lawnma

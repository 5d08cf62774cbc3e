// SPDX-License-Identifier: Apache-2.0
#include "thzmesh/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace thzmesh::harness {

namespace {

void reject(const std::string& key, const std::string& why) {
  throw std::invalid_argument("config: " + key + " " + why);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    reject(key, "expects a number, got '" + value + "'");
  }
  return 0.0;
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    reject(key, "expects an integer, got '" + value + "'");
  }
  return 0;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);  // accept 5e5-style counts
    if (pos != value.size() || v < 0.0 || v != std::floor(v))
      throw std::invalid_argument("bad");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    reject(key, "expects a non-negative integer, got '" + value + "'");
  }
  return 0;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on") return true;
  if (value == "0" || value == "false" || value == "off") return false;
  reject(key, "expects a boolean (0/1/true/false), got '" + value + "'");
  return false;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void assign(ScenarioConfig& c, const std::string& key, const std::string& value) {
  using Setter = std::function<void(ScenarioConfig&, const std::string&)>;
  static const std::map<std::string, Setter> setters = {
      {"N", [](ScenarioConfig& c, const std::string& v) { c.n_uavs = parse_int("N", v); }},
      {"region_x", [](ScenarioConfig& c, const std::string& v) { c.region_x_m = parse_double("region_x", v); }},
      {"region_y", [](ScenarioConfig& c, const std::string& v) { c.region_y_m = parse_double("region_y", v); }},
      {"altitude", [](ScenarioConfig& c, const std::string& v) { c.altitude_m = parse_double("altitude", v); }},
      {"v_max", [](ScenarioConfig& c, const std::string& v) { c.v_max_m_s = parse_double("v_max", v); }},
      {"d_max", [](ScenarioConfig& c, const std::string& v) { c.comm_range_m = parse_double("d_max", v); }},
      {"K", [](ScenarioConfig& c, const std::string& v) { c.k_bands = parse_int("K", v); }},
      {"B", [](ScenarioConfig& c, const std::string& v) { c.bandwidth_hz = parse_double("B", v); }},
      {"f_start", [](ScenarioConfig& c, const std::string& v) { c.f_start_hz = parse_double("f_start", v); }},
      {"g_abs", [](ScenarioConfig& c, const std::string& v) { c.absorption_per_m = parse_double("g_abs", v); }},
      {"M_x", [](ScenarioConfig& c, const std::string& v) { c.m_x = parse_int("M_x", v); }},
      {"M_y", [](ScenarioConfig& c, const std::string& v) { c.m_y = parse_int("M_y", v); }},
      {"d0", [](ScenarioConfig& c, const std::string& v) { c.element_spacing_m = parse_double("d0", v); }},
      {"S_max", [](ScenarioConfig& c, const std::string& v) { c.max_subarrays = parse_int("S_max", v); }},
      {"G_tx_dbi", [](ScenarioConfig& c, const std::string& v) { c.tx_gain_dbi = parse_double("G_tx_dbi", v); }},
      {"G_rx_dbi", [](ScenarioConfig& c, const std::string& v) { c.rx_gain_dbi = parse_double("G_rx_dbi", v); }},
      {"P_max_w", [](ScenarioConfig& c, const std::string& v) { c.p_max_w = parse_double("P_max_w", v); }},
      {"temperature", [](ScenarioConfig& c, const std::string& v) { c.temperature_k = parse_double("temperature", v); }},
      {"noise_w", [](ScenarioConfig& c, const std::string& v) { c.noise_w = parse_double("noise_w", v); }},
      {"mu_I_frac", [](ScenarioConfig& c, const std::string& v) { c.interference_mean_frac = parse_double("mu_I_frac", v); }},
      {"sigma_I_frac", [](ScenarioConfig& c, const std::string& v) { c.interference_sd_frac = parse_double("sigma_I_frac", v); }},
      {"A0", [](ScenarioConfig& c, const std::string& v) { c.misalign_peak = parse_double("A0", v); }},
      {"sigma_p", [](ScenarioConfig& c, const std::string& v) { c.misalign_sigma_m = parse_double("sigma_p", v); }},
      {"w_eq", [](ScenarioConfig& c, const std::string& v) { c.misalign_waist_m = parse_double("w_eq", v); }},
      {"packet_bytes", [](ScenarioConfig& c, const std::string& v) { c.packet_bytes = parse_double("packet_bytes", v); }},
      {"Omega", [](ScenarioConfig& c, const std::string& v) { c.buffer_capacity = parse_u64("Omega", v); }},
      {"dt", [](ScenarioConfig& c, const std::string& v) { c.dt_s = parse_double("dt", v); }},
      {"mean_rate", [](ScenarioConfig& c, const std::string& v) { c.mean_rate_bps = parse_double("mean_rate", v); }},
      {"hurst", [](ScenarioConfig& c, const std::string& v) { c.hurst = parse_double("hurst", v); }},
      {"sigma_tr_frac", [](ScenarioConfig& c, const std::string& v) { c.sigma_tr_frac = parse_double("sigma_tr_frac", v); }},
      {"hop_weight", [](ScenarioConfig& c, const std::string& v) { c.hop_weight = parse_double("hop_weight", v); }},
      {"loss_weight", [](ScenarioConfig& c, const std::string& v) { c.loss_weight = parse_double("loss_weight", v); }},
      {"chi1", [](ScenarioConfig& c, const std::string& v) { c.chi1 = parse_double("chi1", v); }},
      {"chi2", [](ScenarioConfig& c, const std::string& v) { c.chi2 = parse_double("chi2", v); }},
      {"chi3", [](ScenarioConfig& c, const std::string& v) { c.chi3 = parse_double("chi3", v); }},
      {"kappa", [](ScenarioConfig& c, const std::string& v) { c.kappa = parse_double("kappa", v); }},
      {"kappa_in_target", [](ScenarioConfig& c, const std::string& v) { c.kappa_in_target = parse_bool("kappa_in_target", v); }},
      {"lr_actor", [](ScenarioConfig& c, const std::string& v) { c.lr_actor = parse_double("lr_actor", v); }},
      {"lr_critic", [](ScenarioConfig& c, const std::string& v) { c.lr_critic = parse_double("lr_critic", v); }},
      {"noise_scale", [](ScenarioConfig& c, const std::string& v) { c.noise_scale = parse_double("noise_scale", v); }},
      {"safe_init_target", [](ScenarioConfig& c, const std::string& v) { c.safe_init_target = parse_double("safe_init_target", v); }},
      {"steps", [](ScenarioConfig& c, const std::string& v) { c.training_steps = parse_int("steps", v); }},
      {"seed", [](ScenarioConfig& c, const std::string& v) { c.seed = parse_u64("seed", v); }},
      {"self_node_path", [](ScenarioConfig& c, const std::string& v) { c.self_node_path = parse_bool("self_node_path", v); }},
  };
  auto it = setters.find(key);
  if (it == setters.end()) reject(key, "is not a recognised configuration key");
  it->second(c, value);
}

}  // namespace

double ScenarioConfig::noise_power_w() const {
  if (noise_w > 0.0) return noise_w;
  return channel::noise_power_w(temperature_k, bandwidth_hz);
}

channel::BandPlan ScenarioConfig::band_plan() const {
  channel::BandPlan plan;
  plan.num_bands = k_bands;
  plan.bandwidth_hz = bandwidth_hz;
  plan.carrier_hz.resize(static_cast<std::size_t>(k_bands));
  plan.absorption_per_m.assign(static_cast<std::size_t>(k_bands), absorption_per_m);
  for (int k = 0; k < k_bands; ++k) {
    plan.carrier_hz[static_cast<std::size_t>(k)] =
        f_start_hz + (static_cast<double>(k) + 0.5) * bandwidth_hz;
  }
  return plan;
}

channel::ArraySpec ScenarioConfig::array_spec() const {
  channel::ArraySpec arr;
  arr.m_x = m_x;
  arr.m_y = m_y;
  arr.spacing_m = element_spacing_m;
  arr.max_subarrays = max_subarrays;
  arr.tx_gain = channel::dbi_to_amplitude(tx_gain_dbi);
  arr.rx_gain = channel::dbi_to_amplitude(rx_gain_dbi);
  return arr;
}

void ScenarioConfig::validate() const {
  if (n_uavs < 2) reject("N", "must be at least 2");
  if (region_x_m <= 0.0) reject("region_x", "must be positive");
  if (region_y_m <= 0.0) reject("region_y", "must be positive");
  if (altitude_m < 0.0) reject("altitude", "must be non-negative");
  if (v_max_m_s < 0.0) reject("v_max", "must be non-negative");
  if (comm_range_m <= 0.0) reject("d_max", "must be positive");
  if (k_bands <= 0) reject("K", "must be positive");
  if (bandwidth_hz <= 0.0) reject("B", "must be positive");
  if (f_start_hz <= 0.0) reject("f_start", "must be positive");
  if (absorption_per_m < 0.0) reject("g_abs", "must be non-negative");
  if (m_x <= 0) reject("M_x", "must be positive");
  if (m_y <= 0) reject("M_y", "must be positive");
  if (element_spacing_m <= 0.0) reject("d0", "must be positive");
  if (max_subarrays <= 0) reject("S_max", "must be positive");
  if (max_subarrays < n_uavs - 1) {
    // Worst case a relay carries one out-link plus n-2 in-links, each of
    // which needs a pre-assigned sub-array.
    reject("S_max", "must cover one sub-array per possible link of a node");
  }
  if (p_max_w <= 0.0) reject("P_max_w", "must be positive");
  if (temperature_k <= 0.0) reject("temperature", "must be positive");
  if (noise_w < 0.0) reject("noise_w", "must be non-negative");
  if (interference_mean_frac < 0.0) reject("mu_I_frac", "must be non-negative");
  if (interference_sd_frac < 0.0) reject("sigma_I_frac", "must be non-negative");
  if (misalign_peak <= 0.0) reject("A0", "must be positive");
  if (misalign_sigma_m < 0.0) reject("sigma_p", "must be non-negative");
  if (misalign_waist_m <= 0.0) reject("w_eq", "must be positive");
  if (packet_bytes <= 0.0) reject("packet_bytes", "must be positive");
  if (buffer_capacity == 0) reject("Omega", "must be positive");
  if (dt_s <= 0.0) reject("dt", "must be positive");
  if (mean_rate_bps < 0.0) reject("mean_rate", "must be non-negative");
  if (hurst < 0.5 || hurst >= 1.0) reject("hurst", "must lie in [0.5, 1)");
  if (sigma_tr_frac < 0.0) reject("sigma_tr_frac", "must be non-negative");
  if (hop_weight < 0.0) reject("hop_weight", "must be non-negative");
  if (loss_weight < 0.0) reject("loss_weight", "must be non-negative");
  if (kappa < 0.0 || kappa >= 1.0) reject("kappa", "must lie in [0, 1)");
  if (lr_actor <= 0.0) reject("lr_actor", "must be positive");
  if (lr_critic <= 0.0) reject("lr_critic", "must be positive");
  if (noise_scale < 0.0) reject("noise_scale", "must be non-negative");
  if (safe_init_target <= 0.0 || safe_init_target >= 1.0)
    reject("safe_init_target", "must lie in (0, 1)");
  if (training_steps <= 0) reject("steps", "must be positive");
  band_plan().validate();
  array_spec().validate();
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  ScenarioConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not key=value: '" + line + "'");
    }
    assign(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void apply_override(ScenarioConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("config: override is not key=value: '" +
                                assignment + "'");
  }
  assign(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

}  // namespace thzmesh::harness

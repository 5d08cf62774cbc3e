// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "thzmesh/channel.hpp"

namespace thzmesh::harness {

// Full description of one simulated scenario plus training hyper-parameters.
// Loaded from line-oriented `key=value` files ('#' starts a comment) and
// overridable from the command line with the same syntax.
struct ScenarioConfig {
  // Fleet and mission region
  int n_uavs = 25;                  // N
  double region_x_m = 1000.0;       // region_x
  double region_y_m = 1000.0;       // region_y
  double altitude_m = 100.0;        // altitude
  double v_max_m_s = 100.0;         // v_max
  double comm_range_m = 500.0;      // d_max

  // Spectrum and antenna front end
  int k_bands = 5;                  // K
  double bandwidth_hz = 5e9;        // B (per sub-band)
  double f_start_hz = 287.5e9;      // f_start (lower edge of band 0)
  double absorption_per_m = 0.005;  // g_abs (all sub-bands)
  int m_x = 4;                      // M_x elements per sub-array
  int m_y = 4;                      // M_y
  double element_spacing_m = 5e-4;  // d0
  int max_subarrays = 64;           // S_max
  double tx_gain_dbi = 5.0;         // G_tx_dbi
  double rx_gain_dbi = 5.0;         // G_rx_dbi
  double p_max_w = 1.0;             // P_max_w (total transmit power budget)

  // Noise, stray interference, beam misalignment
  double temperature_k = 296.0;     // temperature
  double noise_w = 0.0;             // noise_w; 0 = derive k_B * T * B
  double interference_mean_frac = 0.1;  // mu_I_frac (relative to noise power)
  double interference_sd_frac = 0.05;   // sigma_I_frac (0 = deterministic)
  double misalign_peak = 1.0;       // A0
  double misalign_sigma_m = 0.0;    // sigma_p (0 = perfect pointing)
  double misalign_waist_m = 0.1;    // w_eq

  // Traffic
  double packet_bytes = 2000.0;     // packet_bytes (omega = 8 * packet_bytes bits)
  std::uint64_t buffer_capacity = 500000;  // Omega (packets per relay queue)
  double dt_s = 0.1;                // dt (slot length)
  double mean_rate_bps = 10e9;      // mean_rate per source UAV
  double hurst = 0.8;               // hurst
  double sigma_tr_frac = 0.1;       // sigma_tr_frac (burst std / mean volume)

  // Routing
  double hop_weight = 1.0;          // hop_weight
  double loss_weight = 1.0;         // loss_weight

  // Reward and learning
  double chi1 = 10.0;               // chi1 (usage weight)
  double chi2 = 5000.0;             // chi2 (latency weight, 1/s)
  double chi3 = 0.1;                // chi3 (loss weight, 1/packet)
  double kappa = 0.5;               // kappa (discount)
  bool kappa_in_target = true;      // kappa_in_target (discounted TD target)
  double lr_actor = 2e-5;           // lr_actor
  double lr_critic = 1e-2;          // lr_critic
  double noise_scale = 0.05;        // noise_scale (exploration, fraction)
  double safe_init_target = 0.95;   // safe_init_target (initial on-probability)
  int training_steps = 1000;        // steps
  std::uint64_t seed = 1;           // seed
  bool self_node_path = true;       // self_node_path (ablation switch)

  // Derived quantities
  double packet_bits() const { return 8.0 * packet_bytes; }
  double noise_power_w() const;
  double sigma_tr_bits() const { return sigma_tr_frac * mean_rate_bps * dt_s; }
  channel::BandPlan band_plan() const;
  channel::ArraySpec array_spec() const;

  void validate() const;
};

// Parse a config file.  Unknown keys and malformed lines raise
// std::invalid_argument naming the offending key.
ScenarioConfig load_config(const std::string& path);

// Apply one `key=value` override in place.
void apply_override(ScenarioConfig& cfg, const std::string& assignment);

}  // namespace thzmesh::harness

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <random>
#include <span>
#include <vector>

namespace thzmesh::channel {

// Frequency plan: contiguous sub-bands of equal width, each with its own
// carrier and molecular absorption coefficient.
struct BandPlan {
  int num_bands = 0;
  double bandwidth_hz = 0.0;               // width of each sub-band
  std::vector<double> carrier_hz;          // centre frequency per sub-band
  std::vector<double> absorption_per_m;    // absorption coefficient per sub-band

  void validate() const;
};

// Uniform planar array with sub-array partitioning and fixed per-element gains.
// Gains are stored as linear amplitude factors (10^(dBi/20)).
struct ArraySpec {
  int m_x = 0;                 // elements along x per sub-array
  int m_y = 0;                 // elements along y per sub-array
  double spacing_m = 0.0;      // inter-element spacing
  int max_subarrays = 0;       // total sub-arrays available per UAV
  double tx_gain = 1.0;        // amplitude gain of one Tx element
  double rx_gain = 1.0;        // amplitude gain of one Rx element

  void validate() const;
};

// Per-link, per-slot channel realization across all sub-bands.
struct ChannelRealization {
  int tx = -1;
  int rx = -1;
  double distance_m = 0.0;
  std::vector<double> path_gain;          // |alpha|^2 per band (spreading + absorption)
  std::vector<double> misalignment_gain;  // beam pointing factor per band (amplitude)
  std::vector<double> channel_gain;       // aligned |h|^2 per band
  std::vector<double> interference_w;     // stray interference power per band
  std::vector<double> sinr;               // per band
  double rate_bps = 0.0;
  std::complex<double> doppler_phase{1.0, 0.0};  // carried, not applied to |h|^2
};

double dbi_to_amplitude(double dbi);

// Array response for one sub-array; element (ex, ey) is at index ex*m_y + ey.
// Normalised to unit L2 norm.
std::vector<std::complex<double>> steering_vector(const ArraySpec& arr,
                                                  double wavelength_m,
                                                  double azimuth_rad,
                                                  double elevation_rad);

// Free-space spreading loss combined with exponential molecular absorption:
// (c / (4 pi f d))^2 * exp(-k_abs d).
double path_gain(const BandPlan& plan, int band, double distance_m);

// Gaussian beam pointing factor peak * exp(-2 r^2 / w^2) with radial error
// r drawn Rayleigh(sigma).  sigma == 0 returns the peak without consuming
// randomness.
double misalignment_gain(double sigma_m, double beam_waist_m, double peak,
                         std::mt19937_64& rng);

// |h|^2 of a boresight-aligned link using tx_subarrays and rx_subarrays
// sub-arrays: (S_tx M) (S_rx M) G_tx^2 G_rx^2 |alpha|^2 G_mis^2 with
// M = m_x * m_y elements per sub-array.
double aligned_channel_gain(const ArraySpec& arr, int tx_subarrays,
                            int rx_subarrays, double path_gain_value,
                            double misalignment);

// Thermal noise power k_B * T * B.
double noise_power_w(double temperature_k, double bandwidth_hz);

// Stray multi-path interference power: Normal(mean, sd) clipped at zero.
// sd == 0 returns the mean without consuming randomness.
double stray_interference_w(double mean_w, double sd_w, std::mt19937_64& rng);

double sinr(double tx_power_w, double channel_gain, double interference_w,
            double noise_w);

// Aggregate Shannon rate over the sub-bands: sum_k B log2(1 + sinr_k).
double link_rate_bps(std::span<const double> band_sinr, double bandwidth_hz);

// Doppler phasor exp(j 2 pi f_d tau) for radial velocity v_radial_m_s at
// carrier_hz over propagation delay tau = distance / c.
std::complex<double> doppler_phase(double v_radial_m_s, double carrier_hz,
                                   double distance_m);

}  // namespace thzmesh::channel

// SPDX-License-Identifier: Apache-2.0
#include "thzmesh/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "thzmesh/constants.hpp"

namespace thzmesh::channel {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

}  // namespace

void BandPlan::validate() const {
  require(num_bands > 0, "band plan: num_bands must be positive");
  require(bandwidth_hz > 0.0, "band plan: bandwidth_hz must be positive");
  require(static_cast<int>(carrier_hz.size()) == num_bands,
          "band plan: carrier_hz size must equal num_bands");
  require(static_cast<int>(absorption_per_m.size()) == num_bands,
          "band plan: absorption_per_m size must equal num_bands");
  for (double f : carrier_hz) require(f > 0.0, "band plan: carriers must be positive");
  for (double a : absorption_per_m)
    require(a >= 0.0, "band plan: absorption must be non-negative");
}

void ArraySpec::validate() const {
  require(m_x > 0 && m_y > 0, "array: element counts must be positive");
  require(spacing_m > 0.0, "array: spacing must be positive");
  require(max_subarrays > 0, "array: max_subarrays must be positive");
  require(tx_gain > 0.0 && rx_gain > 0.0, "array: gains must be positive");
}

double dbi_to_amplitude(double dbi) { return std::pow(10.0, dbi / 20.0); }

std::vector<std::complex<double>> steering_vector(const ArraySpec& arr,
                                                  double wavelength_m,
                                                  double azimuth_rad,
                                                  double elevation_rad) {
  arr.validate();
  require(wavelength_m > 0.0, "steering: wavelength must be positive");
  require_finite(azimuth_rad, "steering: azimuth");
  require_finite(elevation_rad, "steering: elevation");

  const double k = 2.0 * constants::pi * arr.spacing_m / wavelength_m;
  const double along_x = std::sin(elevation_rad) * std::cos(azimuth_rad);
  const double along_y = std::cos(elevation_rad);
  const double norm = 1.0 / std::sqrt(static_cast<double>(arr.m_x) *
                                      static_cast<double>(arr.m_y));

  std::vector<std::complex<double>> a(
      static_cast<std::size_t>(arr.m_x) * static_cast<std::size_t>(arr.m_y));
  for (int ex = 0; ex < arr.m_x; ++ex) {
    for (int ey = 0; ey < arr.m_y; ++ey) {
      const double phase = k * (ex * along_x + ey * along_y);
      a[static_cast<std::size_t>(ex) * arr.m_y + ey] =
          norm * std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }
  return a;
}

double path_gain(const BandPlan& plan, int band, double distance_m) {
  plan.validate();
  require(band >= 0 && band < plan.num_bands, "path_gain: band out of range");
  require(distance_m > 0.0, "path_gain: distance must be positive");

  const double f = plan.carrier_hz[static_cast<std::size_t>(band)];
  const double spread =
      constants::speed_of_light_m_s / (4.0 * constants::pi * f * distance_m);
  const double absorb =
      std::exp(-plan.absorption_per_m[static_cast<std::size_t>(band)] * distance_m);
  return spread * spread * absorb;
}

double misalignment_gain(double sigma_m, double beam_waist_m, double peak,
                         std::mt19937_64& rng) {
  require(sigma_m >= 0.0, "misalignment: sigma must be non-negative");
  require(beam_waist_m > 0.0, "misalignment: beam waist must be positive");
  require(peak > 0.0, "misalignment: peak must be positive");

  if (sigma_m == 0.0) return peak;  // deterministic boresight, no draw

  // Rayleigh(sigma) radial error from two independent N(0, sigma) offsets.
  std::normal_distribution<double> n(0.0, sigma_m);
  const double ox = n(rng);
  const double oy = n(rng);
  const double r2 = ox * ox + oy * oy;
  return peak * std::exp(-2.0 * r2 / (beam_waist_m * beam_waist_m));
}

double aligned_channel_gain(const ArraySpec& arr, int tx_subarrays,
                            int rx_subarrays, double path_gain_value,
                            double misalignment) {
  arr.validate();
  require(tx_subarrays >= 0 && tx_subarrays <= arr.max_subarrays,
          "channel gain: tx_subarrays out of range");
  require(rx_subarrays >= 0 && rx_subarrays <= arr.max_subarrays,
          "channel gain: rx_subarrays out of range");
  require(path_gain_value >= 0.0, "channel gain: path gain must be non-negative");
  require(misalignment >= 0.0, "channel gain: misalignment must be non-negative");

  const double elements = static_cast<double>(arr.m_x) * arr.m_y;
  // With matched (conjugate) beamforming the coherent array factor equals the
  // total element count on each side.
  const double tx_factor = tx_subarrays * elements;
  const double rx_factor = rx_subarrays * elements;
  return tx_factor * rx_factor * (arr.tx_gain * arr.tx_gain) *
         (arr.rx_gain * arr.rx_gain) * path_gain_value *
         (misalignment * misalignment);
}

double noise_power_w(double temperature_k, double bandwidth_hz) {
  require(temperature_k > 0.0, "noise: temperature must be positive");
  require(bandwidth_hz > 0.0, "noise: bandwidth must be positive");
  return constants::boltzmann_j_k * temperature_k * bandwidth_hz;
}

double stray_interference_w(double mean_w, double sd_w, std::mt19937_64& rng) {
  require(mean_w >= 0.0, "interference: mean must be non-negative");
  require(sd_w >= 0.0, "interference: sd must be non-negative");
  if (sd_w == 0.0) return mean_w;
  std::normal_distribution<double> n(mean_w, sd_w);
  const double v = n(rng);
  return v > 0.0 ? v : 0.0;
}

double sinr(double tx_power_w, double channel_gain, double interference_w,
            double noise_w) {
  require(tx_power_w >= 0.0, "sinr: power must be non-negative");
  require(channel_gain >= 0.0, "sinr: channel gain must be non-negative");
  require(interference_w >= 0.0, "sinr: interference must be non-negative");
  require(noise_w > 0.0, "sinr: noise must be positive");
  return tx_power_w * channel_gain / (interference_w + noise_w);
}

double link_rate_bps(std::span<const double> band_sinr, double bandwidth_hz) {
  require(bandwidth_hz > 0.0, "rate: bandwidth must be positive");
  double rate = 0.0;
  for (double g : band_sinr) {
    require(g >= 0.0, "rate: sinr must be non-negative");
    rate += bandwidth_hz * std::log2(1.0 + g);
  }
  return rate;
}

std::complex<double> doppler_phase(double v_radial_m_s, double carrier_hz,
                                   double distance_m) {
  require(carrier_hz > 0.0, "doppler: carrier must be positive");
  require(distance_m > 0.0, "doppler: distance must be positive");
  const double f_d = v_radial_m_s * carrier_hz / constants::speed_of_light_m_s;
  const double tau = distance_m / constants::speed_of_light_m_s;
  const double phase = 2.0 * constants::pi * f_d * tau;
  return {std::cos(phase), std::sin(phase)};
}

}  // namespace thzmesh::channel

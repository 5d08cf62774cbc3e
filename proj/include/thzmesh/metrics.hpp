// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace thzmesh::harness {

// One metrics row per training/eval step.  Everything except wall_ms is a
// pure function of the seed and configuration.
struct StepMetrics {
  long step = 0;
  double reward = 0.0;
  double usage_mean = 0.0;        // fleet mean of (power + sub-array)/2 usage
  double power_usage_mean = 0.0;  // fleet mean of power budget share
  double sub_usage_mean = 0.0;    // fleet mean of sub-array budget share
  double mean_tx_power_w = 0.0;   // mean total power over transmitters
  double mean_tx_subarrays = 0.0; // mean Tx sub-arrays over transmitters
  double latency_s = 0.0;         // mean delivery latency of the slot
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;
  std::uint64_t queued = 0;
  double critic_loss = 0.0;
  double q_value = 0.0;
  double td_target = 0.0;
  int noise_discards = 0;
  int constraint_violations = 0;
  double wall_ms = 0.0;
};

// Text CSV with a leading run-label column; doubles are printed with %.17g
// so that equal runs compare equal byte-for-byte (wall_ms excluded from any
// such comparison by the consumer).
class MetricsWriter {
 public:
  MetricsWriter(const std::string& path, std::string run_label);
  void write(const StepMetrics& m);

  static std::string header_line();
  static std::string format_row(const std::string& run_label,
                                const StepMetrics& m);

 private:
  std::ofstream out_;
  std::string run_label_;
};

}  // namespace thzmesh::harness

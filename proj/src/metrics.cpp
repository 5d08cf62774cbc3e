// SPDX-License-Identifier: Apache-2.0
#include "thzmesh/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace thzmesh::harness {

MetricsWriter::MetricsWriter(const std::string& path, std::string run_label)
    : out_(path), run_label_(std::move(run_label)) {
  if (!out_) throw std::runtime_error("metrics: cannot write " + path);
  out_ << header_line() << '\n';
}

std::string MetricsWriter::header_line() {
  return "run,step,reward,usage_mean,power_usage_mean,sub_usage_mean,"
         "mean_tx_power_w,mean_tx_subarrays,latency_s,generated,delivered,"
         "lost,queued,critic_loss,q_value,td_target,noise_discards,"
         "constraint_violations,wall_ms";
}

std::string MetricsWriter::format_row(const std::string& run_label,
                                      const StepMetrics& m) {
  char buf[640];
  std::snprintf(buf, sizeof(buf),
                "%s,%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%llu,%llu,"
                "%llu,%llu,%.17g,%.17g,%.17g,%d,%d,%.3f",
                run_label.c_str(), m.step, m.reward, m.usage_mean,
                m.power_usage_mean, m.sub_usage_mean, m.mean_tx_power_w,
                m.mean_tx_subarrays, m.latency_s,
                static_cast<unsigned long long>(m.generated),
                static_cast<unsigned long long>(m.delivered),
                static_cast<unsigned long long>(m.lost),
                static_cast<unsigned long long>(m.queued), m.critic_loss,
                m.q_value, m.td_target, m.noise_discards,
                m.constraint_violations, m.wall_ms);
  return buf;
}

void MetricsWriter::write(const StepMetrics& m) {
  out_ << format_row(run_label_, m) << '\n';
  if (!out_) throw std::runtime_error("metrics: write failed");
}

}  // namespace thzmesh::harness

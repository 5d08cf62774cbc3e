// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "thzmesh/config.hpp"
#include "thzmesh/metrics.hpp"

namespace thzmesh::harness {

struct RunResult {
  std::vector<StepMetrics> steps;
  long total_constraint_violations = 0;
  std::string metrics_path;
  std::string checkpoint_path;  // training only
  std::string topology_path;
};

// Full training run: fresh environment and networks from cfg.seed, one policy
// update per slot, metrics/checkpoint/topology written under out_dir (pass an
// empty out_dir to keep everything in memory).
RunResult run_training(const ScenarioConfig& cfg, const std::string& out_dir,
                       const std::string& run_label);

// Greedy rollout of a trained policy: no exploration noise, no updates.
RunResult run_eval(const ScenarioConfig& cfg, const std::string& checkpoint,
                   const std::string& out_dir, const std::string& run_label);

// Reference rollout with the uniform full-budget allocation.
RunResult run_baseline(const ScenarioConfig& cfg, const std::string& out_dir,
                       const std::string& run_label);

}  // namespace thzmesh::harness

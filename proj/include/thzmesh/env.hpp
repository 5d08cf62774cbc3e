// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "thzmesh/channel.hpp"
#include "thzmesh/config.hpp"
#include "thzmesh/network.hpp"
#include "thzmesh/rng.hpp"
#include "thzmesh/traffic.hpp"

namespace thzmesh::env {

// Standardised per-UAV state for the learner.  Row i holds, in order:
//   [0]        predicted relay load (own + subtree), in mean-slot-volume units
//   [1]        queue fill fraction
//   [2..2+K)   previous-slot out-link SINR per band, as log10(1+g)/10
//   [2+K]      out-link distance / comm range
//   [2+K+1]    x / region_x
//   [2+K+2]    y / region_y
//   [2+K+3]    1 if the UAV has a route to the header (or is the header)
struct Observation {
  long slot = 0;
  int n = 0;
  int k = 0;
  std::vector<double> features;             // n x (k + 6), row-major
  std::vector<std::uint8_t> tree_adjacency; // n x n, routing-tree edges

  int feature_dim() const { return k + 6; }
  double feat(int i, int j) const {
    return features[static_cast<std::size_t>(i) * feature_dim() + j];
  }
};

// Raw policy output: four per-UAV softmax heads.
// Column 0 of the two "use" heads is the active share; the distribution heads
// split that share across sub-bands / across Tx-Rx.
struct ActionHeads {
  int n = 0;
  int k = 0;
  std::vector<double> power_use;   // n x 2
  std::vector<double> power_dist;  // n x k
  std::vector<double> sub_use;     // n x 2
  std::vector<double> sub_split;   // n x 2 (Tx share, Rx share)
};

// Canonical continuous action: absolute resource ratios per UAV.
// power row sums to the power-on share; sub = (Tx, Rx) shares of the
// sub-array budget.  This is the form the critic consumes and the form
// exploration noise perturbs, so that resource-group sums are preserved
// bit-exactly.
struct ActionValues {
  int n = 0;
  int k = 0;
  std::vector<double> power;  // n x k
  std::vector<double> sub;    // n x 2
};

// Materialised allocation after structural masking and integer assignment.
struct ResourceAction {
  int n = 0;
  int k = 0;
  std::vector<double> tx_power_w;              // n x k, zero off-route
  std::vector<int> tx_subarrays;               // per UAV
  std::vector<std::vector<int>> rx_subarrays;  // per UAV, aligned with in_links
};

struct UsageMetrics {
  std::vector<double> power_usage;  // per UAV: sum_k P_ik / P_max
  std::vector<double> sub_usage;    // per UAV: (tx + sum rx) / S_max
  std::vector<double> total_usage;  // per UAV: (power + sub) / 2
  double mean_usage = 0.0;          // fleet average of total_usage
};

struct RewardRecord {
  double reward = 0.0;
  double mean_usage = 0.0;
  double latency_s = 0.0;       // mean delivery latency this slot
  double lost_packets = 0.0;    // packets dropped this slot
};

struct StepOutcome {
  RewardRecord reward;
  traffic::SlotTrafficReport traffic;
  UsageMetrics usage;
  ResourceAction applied;
  std::vector<std::optional<channel::ChannelRealization>> links;  // per UAV out-link
  int constraint_violations = 0;
  Observation observation_after;
};

// Validate the simplex heads (tolerance 1e-6 on each row sum) and fold them
// into absolute resource ratios.
ActionValues action_values(const ActionHeads& heads);

// Structural allocation: off-route UAVs and the header get no transmit power;
// every active link receives one pre-assigned sub-array on each end; the
// remaining budget follows the policy's shares with floor rounding, the Rx
// part split evenly over in-links (remainder to the lowest ids).
ResourceAction apply_action(const ActionValues& action,
                            const net::TopologySnapshot& topo, int header_id,
                            const harness::ScenarioConfig& cfg);

UsageMetrics compute_usage(const ResourceAction& applied,
                           const harness::ScenarioConfig& cfg);

// Independent re-check of the executed allocation against the resource
// constraints (power box and budget, masking, sub-array budget, per-link
// minimum).  Returns the number of violated clauses.
int count_constraint_violations(const ResourceAction& applied,
                                const net::TopologySnapshot& topo, int header_id,
                                const harness::ScenarioConfig& cfg);

// One slot of the world: realise channels for the chosen allocation, move
// traffic, score the reward, then advance mobility/topology and emit the next
// observation.
class Environment {
 public:
  explicit Environment(const harness::ScenarioConfig& cfg);

  const harness::ScenarioConfig& config() const { return cfg_; }
  const Observation& observation() const { return obs_; }
  const net::TopologySnapshot& topology() const { return topo_; }
  const net::Fleet& fleet() const { return fleet_; }
  const traffic::TransportEngine& transport() const { return engine_; }
  int header() const { return fleet_.header_id; }
  long slot() const { return slot_; }
  std::mt19937_64& rng(Stream which) { return bank_.stream(which); }

  // Advance the world one slot under the given allocation.  The returned
  // outcome lives inside the environment and is overwritten by the next
  // step; copy it to retain it.
  const StepOutcome& step(const ActionValues& action);

 private:
  Observation observe() const;

  harness::ScenarioConfig cfg_;
  RngBank bank_;
  net::Fleet fleet_;
  net::TopologySnapshot topo_;
  traffic::TrafficModel model_;
  traffic::TransportEngine engine_;
  std::vector<double> last_sinr_;  // n x k, previous slot's realised out-link SINR
  Observation obs_;
  long slot_ = 0;
  // Reused across slots so per-step allocations stay bounded.
  StepOutcome outcome_;
  std::vector<std::vector<double>> offsets_scratch_;
  std::vector<double> rates_scratch_;
};

}  // namespace thzmesh::env

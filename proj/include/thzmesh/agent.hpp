// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "thzmesh/config.hpp"
#include "thzmesh/env.hpp"
#include "thzmesh/nn/adam.hpp"
#include "thzmesh/nn/tape.hpp"
#include "thzmesh/nn/tensor.hpp"

namespace thzmesh::agent {

// Symmetric graph-convolution normalisation with self loops:
// N = D^{-1/2} (A + I) D^{-1/2}.
nn::Tensor normalized_adjacency(const std::vector<std::uint8_t>& adjacency, int n);

struct ActorForward {
  nn::NodeId power_use = -1;
  nn::NodeId power_dist = -1;
  nn::NodeId sub_use = -1;
  nn::NodeId sub_split = -1;
  nn::NodeId power_values = -1;  // n x k absolute ratios
  nn::NodeId sub_values = -1;    // n x 2 absolute ratios
};

// Policy network: a two-layer graph convolution over the routing tree in
// parallel with a per-node two-layer perceptron (optional, ablatable), fused
// and fanned out into four softmax heads.  The same weights serve any fleet
// size.
class Actor {
 public:
  Actor(int feature_dim, int k_bands, bool self_node_path,
        std::mt19937_64& init_rng);

  // Bias the on/off heads so the initial policy keeps resources switched on
  // with the given probability; distribution heads stay uniform.
  void safe_init(double on_probability);

  env::ActionHeads act(const env::Observation& obs);
  ActorForward build(nn::Tape& tape, const env::Observation& obs, bool trainable);

  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }
  int feature_dim() const { return f_; }
  int bands() const { return k_; }
  bool self_node_path() const { return self_path_; }

 private:
  int f_;
  int k_;
  int hidden_ = 64;
  bool self_path_;
  nn::ParamSet params_;
};

// Action-value network: three input branches (state, power action, sub-array
// action), each a per-node linear lift followed by a graph convolution, fused
// per node, mean-pooled over the fleet and scored by a two-layer head.
class Critic {
 public:
  Critic(int feature_dim, int k_bands, std::mt19937_64& init_rng);

  double evaluate(const env::Observation& obs, const env::ActionValues& action);
  nn::NodeId build(nn::Tape& tape, const env::Observation& obs,
                   nn::NodeId power_values, nn::NodeId sub_values,
                   bool trainable);

  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }

 private:
  int f_;
  int k_;
  int hidden_ = 64;
  nn::ParamSet params_;
};

struct Transition {
  env::Observation s;
  env::ActionValues a;
  double reward = 0.0;
  env::Observation s_next;
};

// Flat float32 image of one experience row per UAV:
// feature_dim + k + 2 + 1 values (state, action, shared reward).
std::vector<float> serialize_experience(const Transition& t);

// Zero-sum Gaussian exploration within each resource group (the k power
// ratios; the Tx/Rx pair).  Component noise scale is noise_scale times the
// component value.  A group whose perturbation would go negative, or whose
// exact sum cannot be restored, keeps its original values; *discarded_groups
// counts those.  Group sums are preserved bit-exactly.
env::ActionValues safe_explore(const env::ActionValues& action,
                               double noise_scale, std::mt19937_64& rng,
                               int* discarded_groups);

// Non-learning reference policy: full power budget split evenly over the
// sub-bands, sub-array budget split evenly between Tx and Rx.
env::ActionValues uniform_action(int n, int k);

struct TrainStepResult {
  env::StepOutcome outcome;
  Transition transition;
  double critic_loss = 0.0;  // (Q(s,a) - y)^2 before the update
  double q_value = 0.0;      // Q(s, pi(s)) before the actor update
  double td_target = 0.0;    // y
  int noise_discards = 0;
};

// On-policy deterministic policy gradient: one environment step, one critic
// descent on the TD error, one actor ascent on the critic score with frozen
// critic weights.  No replay buffer, no target networks.
class DdpgTrainer {
 public:
  DdpgTrainer(const harness::ScenarioConfig& cfg, env::Environment& env);

  // One explore/step/update cycle.  The returned record lives inside the
  // trainer and is overwritten by the next call; copy it to retain it.
  const TrainStepResult& train_step(env::Environment& env);

  Actor& actor() { return actor_; }
  Critic& critic() { return critic_; }

 private:
  harness::ScenarioConfig cfg_;
  Actor actor_;
  Critic critic_;
  nn::Adam opt_actor_;
  nn::Adam opt_critic_;
  TrainStepResult result_;  // reused across calls to bound allocations
};

}  // namespace thzmesh::agent

// SPDX-License-Identifier: Apache-2.0
#include "thzmesh/agent.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "thzmesh/nn/init.hpp"

namespace thzmesh::agent {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

nn::Tensor features_tensor(const env::Observation& obs) {
  nn::Tensor x(obs.n, obs.feature_dim());
  x.data = obs.features;
  return x;
}

nn::Tensor values_tensor(const std::vector<double>& v, int rows, int cols) {
  nn::Tensor t(rows, cols);
  t.data = v;
  return t;
}

// Draw every weight matrix in name order; biases stay zero.
void init_params(nn::ParamSet& params, std::mt19937_64& rng) {
  for (auto& [name, t] : params.entries()) {
    if (name.size() >= 2 && name.compare(name.size() - 2, 2, ".w") == 0) {
      nn::xavier_uniform(t, rng);
    }
  }
}

}  // namespace

nn::Tensor normalized_adjacency(const std::vector<std::uint8_t>& adjacency,
                                int n) {
  require(static_cast<int>(adjacency.size()) == n * n,
          "adjacency: size mismatch");
  nn::Tensor out(n, n);
  std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double d = 1.0;  // self loop
    for (int j = 0; j < n; ++j) {
      if (j != i && adjacency[static_cast<std::size_t>(i) * n + j]) d += 1.0;
    }
    degree[static_cast<std::size_t>(i)] = d;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const bool connected =
          (i == j) || adjacency[static_cast<std::size_t>(i) * n + j] != 0;
      if (connected) {
        out.at(i, j) = 1.0 / std::sqrt(degree[static_cast<std::size_t>(i)] *
                                       degree[static_cast<std::size_t>(j)]);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Actor
// ---------------------------------------------------------------------------

Actor::Actor(int feature_dim, int k_bands, bool self_node_path,
             std::mt19937_64& init_rng)
    : f_(feature_dim), k_(k_bands), self_path_(self_node_path) {
  require(feature_dim > 0 && k_bands > 0, "actor: bad dimensions");
  const int h = hidden_;
  const int joint = self_path_ ? 2 * h : h;
  params_.add("gcn1.w", f_, h);
  params_.add("gcn2.w", h, h);
  if (self_path_) {
    params_.add("self1.w", f_, h);
    params_.add("self1.b", 1, h);
    params_.add("self2.w", h, h);
    params_.add("self2.b", 1, h);
  }
  params_.add("head_power_use.w", joint, 2);
  params_.add("head_power_use.b", 1, 2);
  params_.add("head_power_dist.w", joint, k_);
  params_.add("head_power_dist.b", 1, k_);
  params_.add("head_sub_use.w", joint, 2);
  params_.add("head_sub_use.b", 1, 2);
  params_.add("head_sub_split.w", joint, 2);
  params_.add("head_sub_split.b", 1, 2);
  init_params(params_, init_rng);
}

void Actor::safe_init(double on_probability) {
  require(on_probability > 0.0 && on_probability < 1.0,
          "actor: on probability must lie in (0, 1)");
  const double logit = std::log(on_probability / (1.0 - on_probability));
  for (const char* head : {"head_power_use.b", "head_sub_use.b"}) {
    nn::Tensor& b = params_.get(head);
    b.data[0] = logit;
    b.data[1] = 0.0;
  }
}

ActorForward Actor::build(nn::Tape& tape, const env::Observation& obs,
                          bool trainable) {
  require(obs.feature_dim() == f_ && obs.k == k_, "actor: observation mismatch");
  auto p = [&](const char* name) -> nn::NodeId {
    return trainable ? tape.param(params_.get(name))
                     : tape.constant(params_.get(name));
  };
  const nn::NodeId an = tape.constant(normalized_adjacency(obs.tree_adjacency, obs.n));
  const nn::NodeId x = tape.constant(features_tensor(obs));

  nn::NodeId g = tape.tanh_(tape.matmul(tape.matmul(an, x), p("gcn1.w")));
  g = tape.tanh_(tape.matmul(tape.matmul(an, g), p("gcn2.w")));

  nn::NodeId joint = g;
  if (self_path_) {
    nn::NodeId s = tape.tanh_(
        tape.add_rowvec(tape.matmul(x, p("self1.w")), p("self1.b")));
    s = tape.tanh_(tape.add_rowvec(tape.matmul(s, p("self2.w")), p("self2.b")));
    joint = tape.concat_cols(g, s);
  }

  auto head = [&](const char* w, const char* b) {
    return tape.softmax_rows(tape.add_rowvec(tape.matmul(joint, p(w)), p(b)));
  };
  ActorForward out;
  out.power_use = head("head_power_use.w", "head_power_use.b");
  out.power_dist = head("head_power_dist.w", "head_power_dist.b");
  out.sub_use = head("head_sub_use.w", "head_sub_use.b");
  out.sub_split = head("head_sub_split.w", "head_sub_split.b");
  out.power_values =
      tape.scale_rows(out.power_dist, tape.slice_cols(out.power_use, 0, 1));
  out.sub_values =
      tape.scale_rows(out.sub_split, tape.slice_cols(out.sub_use, 0, 1));
  return out;
}

env::ActionHeads Actor::act(const env::Observation& obs) {
  nn::Tape tape;
  const ActorForward fw = build(tape, obs, false);
  env::ActionHeads heads;
  heads.n = obs.n;
  heads.k = k_;
  heads.power_use = tape.value(fw.power_use).data;
  heads.power_dist = tape.value(fw.power_dist).data;
  heads.sub_use = tape.value(fw.sub_use).data;
  heads.sub_split = tape.value(fw.sub_split).data;
  return heads;
}

// ---------------------------------------------------------------------------
// Critic
// ---------------------------------------------------------------------------

Critic::Critic(int feature_dim, int k_bands, std::mt19937_64& init_rng)
    : f_(feature_dim), k_(k_bands) {
  require(feature_dim > 0 && k_bands > 0, "critic: bad dimensions");
  const int h = hidden_;
  params_.add("state_fc.w", f_, h);
  params_.add("state_fc.b", 1, h);
  params_.add("state_gcn.w", h, h);
  params_.add("power_fc.w", k_, h);
  params_.add("power_fc.b", 1, h);
  params_.add("power_gcn.w", h, h);
  params_.add("sub_fc.w", 2, h);
  params_.add("sub_fc.b", 1, h);
  params_.add("sub_gcn.w", h, h);
  params_.add("join1.w", 3 * h, h);
  params_.add("join1.b", 1, h);
  params_.add("join2.w", h, h);
  params_.add("join2.b", 1, h);
  params_.add("out.w", h, 1);
  params_.add("out.b", 1, 1);
  init_params(params_, init_rng);
}

nn::NodeId Critic::build(nn::Tape& tape, const env::Observation& obs,
                         nn::NodeId power_values, nn::NodeId sub_values,
                         bool trainable) {
  require(obs.feature_dim() == f_ && obs.k == k_, "critic: observation mismatch");
  require(tape.value(power_values).rows == obs.n &&
              tape.value(power_values).cols == k_,
          "critic: power action shape mismatch");
  require(tape.value(sub_values).rows == obs.n &&
              tape.value(sub_values).cols == 2,
          "critic: sub action shape mismatch");
  auto p = [&](const char* name) -> nn::NodeId {
    return trainable ? tape.param(params_.get(name))
                     : tape.constant(params_.get(name));
  };
  const nn::NodeId an = tape.constant(normalized_adjacency(obs.tree_adjacency, obs.n));
  const nn::NodeId x = tape.constant(features_tensor(obs));

  auto branch = [&](nn::NodeId input, const char* fc_w, const char* fc_b,
                    const char* gcn_w) {
    nn::NodeId h =
        tape.relu(tape.add_rowvec(tape.matmul(input, p(fc_w)), p(fc_b)));
    return tape.relu(tape.matmul(tape.matmul(an, h), p(gcn_w)));
  };
  const nn::NodeId sg = branch(x, "state_fc.w", "state_fc.b", "state_gcn.w");
  const nn::NodeId pg =
      branch(power_values, "power_fc.w", "power_fc.b", "power_gcn.w");
  const nn::NodeId ag = branch(sub_values, "sub_fc.w", "sub_fc.b", "sub_gcn.w");

  const nn::NodeId cat = tape.concat_cols(tape.concat_cols(sg, pg), ag);
  const nn::NodeId pooled = tape.mean_rows(cat);
  nn::NodeId h = tape.relu(
      tape.add_rowvec(tape.matmul(pooled, p("join1.w")), p("join1.b")));
  h = tape.relu(tape.add_rowvec(tape.matmul(h, p("join2.w")), p("join2.b")));
  return tape.add_rowvec(tape.matmul(h, p("out.w")), p("out.b"));
}

double Critic::evaluate(const env::Observation& obs,
                        const env::ActionValues& action) {
  nn::Tape tape;
  const nn::NodeId pw =
      tape.constant(values_tensor(action.power, action.n, action.k));
  const nn::NodeId sw = tape.constant(values_tensor(action.sub, action.n, 2));
  const nn::NodeId q = build(tape, obs, pw, sw, false);
  return tape.value(q).data[0];
}

// ---------------------------------------------------------------------------
// Exploration, baselines, serialisation
// ---------------------------------------------------------------------------

namespace {

// Perturb one resource group in place.  Returns false (leaving the group
// untouched) when the noise would break non-negativity or the exact sum.
bool perturb_group(double* g, int len, double scale, std::mt19937_64& rng) {
  const double target = std::accumulate(g, g + len, 0.0);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> noise(static_cast<std::size_t>(len));
  double mean = 0.0;
  for (int j = 0; j < len; ++j) {
    noise[static_cast<std::size_t>(j)] = z(rng) * (scale * g[j]);
    mean += noise[static_cast<std::size_t>(j)];
  }
  mean /= static_cast<double>(len);

  std::vector<double> cand(g, g + len);
  for (int j = 0; j < len; ++j) {
    cand[static_cast<std::size_t>(j)] += noise[static_cast<std::size_t>(j)] - mean;
    if (cand[static_cast<std::size_t>(j)] < 0.0) return false;
  }
  // The zero-sum projection is exact in real arithmetic; push any floating-
  // point residue onto the largest component until the accumulated sum
  // reproduces the original bit pattern.
  for (int iter = 0; iter < 8; ++iter) {
    const double sum = std::accumulate(cand.begin(), cand.end(), 0.0);
    const double diff = target - sum;
    if (diff == 0.0) break;
    std::size_t am = 0;
    for (std::size_t j = 1; j < cand.size(); ++j) {
      if (cand[j] > cand[am]) am = j;
    }
    cand[am] += diff;
    if (cand[am] < 0.0) return false;
  }
  if (std::accumulate(cand.begin(), cand.end(), 0.0) != target) return false;
  for (double v : cand) {
    if (v < 0.0) return false;
  }
  std::copy(cand.begin(), cand.end(), g);
  return true;
}

}  // namespace

env::ActionValues safe_explore(const env::ActionValues& action,
                               double noise_scale, std::mt19937_64& rng,
                               int* discarded_groups) {
  require(noise_scale >= 0.0, "explore: noise scale must be non-negative");
  env::ActionValues out = action;
  int discards = 0;
  if (noise_scale > 0.0) {
    for (int i = 0; i < action.n; ++i) {
      if (!perturb_group(&out.power[static_cast<std::size_t>(i) * action.k],
                         action.k, noise_scale, rng)) {
        ++discards;
      }
      if (!perturb_group(&out.sub[static_cast<std::size_t>(i) * 2], 2,
                         noise_scale, rng)) {
        ++discards;
      }
    }
  }
  if (discarded_groups != nullptr) *discarded_groups = discards;
  return out;
}

env::ActionValues uniform_action(int n, int k) {
  env::ActionValues av;
  av.n = n;
  av.k = k;
  av.power.assign(static_cast<std::size_t>(n) * k, 1.0 / static_cast<double>(k));
  av.sub.assign(static_cast<std::size_t>(n) * 2, 0.5);
  return av;
}

std::vector<float> serialize_experience(const Transition& t) {
  const int n = t.s.n;
  const int f = t.s.feature_dim();
  const int cols = f + t.a.k + 2 + 1;
  std::vector<float> out;
  out.reserve(static_cast<std::size_t>(n) * cols);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < f; ++j) out.push_back(static_cast<float>(t.s.feat(i, j)));
    for (int b = 0; b < t.a.k; ++b) {
      out.push_back(static_cast<float>(
          t.a.power[static_cast<std::size_t>(i) * t.a.k + b]));
    }
    out.push_back(static_cast<float>(t.a.sub[static_cast<std::size_t>(i) * 2]));
    out.push_back(static_cast<float>(t.a.sub[static_cast<std::size_t>(i) * 2 + 1]));
    out.push_back(static_cast<float>(t.reward));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trainer
// ---------------------------------------------------------------------------

DdpgTrainer::DdpgTrainer(const harness::ScenarioConfig& cfg,
                         env::Environment& env)
    : cfg_(cfg),
      actor_(cfg.k_bands + 6, cfg.k_bands, cfg.self_node_path,
             env.rng(Stream::init)),
      critic_(cfg.k_bands + 6, cfg.k_bands, env.rng(Stream::init)),
      opt_actor_(nn::AdamConfig{cfg.lr_actor, 0.9, 0.999, 1e-8}),
      opt_critic_(nn::AdamConfig{cfg.lr_critic, 0.9, 0.999, 1e-8}) {
  actor_.safe_init(cfg.safe_init_target);
}

const TrainStepResult& DdpgTrainer::train_step(env::Environment& env) {
  TrainStepResult& res = result_;
  res.noise_discards = 0;
  const env::Observation s = env.observation();

  const env::ActionHeads heads = actor_.act(s);
  const env::ActionValues preferred = env::action_values(heads);
  const env::ActionValues executed = safe_explore(
      preferred, cfg_.noise_scale, env.rng(Stream::exploration),
      &res.noise_discards);

  res.outcome = env.step(executed);
  const double r = res.outcome.reward.reward;
  const env::Observation& s2 = res.outcome.observation_after;

  // Bootstrapped target from the current policy and critic.
  const env::ActionValues next_action = env::action_values(actor_.act(s2));
  const double q_next = critic_.evaluate(s2, next_action);
  const double y = r + (cfg_.kappa_in_target ? cfg_.kappa * q_next : q_next);
  res.td_target = y;

  // Critic: descend the squared TD error, target held fixed.
  critic_.params().zero_grad();
  {
    nn::Tape tape;
    const nn::NodeId pw =
        tape.constant(values_tensor(executed.power, executed.n, executed.k));
    const nn::NodeId sw =
        tape.constant(values_tensor(executed.sub, executed.n, 2));
    const nn::NodeId q = critic_.build(tape, s, pw, sw, true);
    const nn::NodeId loss = tape.sqdiff(q, y);
    res.critic_loss = tape.value(loss).data[0];
    tape.backward(loss);
    opt_critic_.step(critic_.params(), -1);
  }

  // Actor: ascend the critic's score of the deterministic policy output,
  // critic weights frozen.
  actor_.params().zero_grad();
  {
    nn::Tape tape;
    const ActorForward fw = actor_.build(tape, s, true);
    const nn::NodeId q =
        critic_.build(tape, s, fw.power_values, fw.sub_values, false);
    res.q_value = tape.value(q).data[0];
    tape.backward(q);
    opt_actor_.step(actor_.params(), +1);
  }

  res.transition = Transition{s, executed, r, s2};
  return res;
}

}  // namespace thzmesh::agent

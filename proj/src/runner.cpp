// SPDX-License-Identifier: Apache-2.0
#include "thzmesh/runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>

#include "thzmesh/agent.hpp"
#include "thzmesh/env.hpp"
#include "thzmesh/nn/checkpoint.hpp"

namespace thzmesh::harness {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

StepMetrics make_metrics(long step, const env::StepOutcome& out) {
  StepMetrics m;
  m.step = step;
  m.reward = out.reward.reward;
  m.usage_mean = out.usage.mean_usage;
  double pu = 0.0, su = 0.0;
  const int n = static_cast<int>(out.usage.power_usage.size());
  for (int i = 0; i < n; ++i) {
    pu += out.usage.power_usage[static_cast<std::size_t>(i)];
    su += out.usage.sub_usage[static_cast<std::size_t>(i)];
  }
  m.power_usage_mean = pu / n;
  m.sub_usage_mean = su / n;

  int transmitters = 0;
  double ptx = 0.0, stx = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!out.links[static_cast<std::size_t>(i)].has_value()) continue;
    ++transmitters;
    for (int b = 0; b < out.applied.k; ++b) {
      ptx += out.applied
                 .tx_power_w[static_cast<std::size_t>(i) * out.applied.k + b];
    }
    stx += out.applied.tx_subarrays[static_cast<std::size_t>(i)];
  }
  if (transmitters > 0) {
    m.mean_tx_power_w = ptx / transmitters;
    m.mean_tx_subarrays = stx / transmitters;
  }
  m.latency_s = out.traffic.mean_delivery_latency_s;
  m.generated = out.traffic.total_generated;
  m.delivered = out.traffic.total_delivered;
  m.lost = out.traffic.total_lost;
  m.queued = out.traffic.queued_after;
  m.constraint_violations = out.constraint_violations;
  return m;
}

void dump_topology(const std::string& path, const env::Environment& world) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("topology: cannot write " + path);
  out << "# final topology, slot " << world.slot() << '\n';
  out << "uav,x,y,z,is_header,next_hop,depth,hop_distance_m,in_degree\n";
  const auto& topo = world.topology();
  const auto& fleet = world.fleet();
  char buf[256];
  for (int i = 0; i < topo.n; ++i) {
    const auto& u = fleet.nodes[static_cast<std::size_t>(i)];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%d,%d,%d,%.17g,%zu",
                  i, u.x, u.y, u.z, u.is_header ? 1 : 0,
                  topo.next_hop[static_cast<std::size_t>(i)],
                  topo.depth[static_cast<std::size_t>(i)],
                  topo.hop_distance_m[static_cast<std::size_t>(i)],
                  topo.in_links[static_cast<std::size_t>(i)].size());
    out << buf << '\n';
  }
}

struct Sink {
  std::optional<MetricsWriter> writer;
  RunResult result;

  void add(const StepMetrics& m) {
    if (writer) writer->write(m);
    result.steps.push_back(m);
    result.total_constraint_violations += m.constraint_violations;
  }
};

Sink make_sink(const std::string& out_dir, const std::string& run_label,
               RunResult&& seed_result) {
  Sink sink;
  sink.result = std::move(seed_result);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    sink.result.metrics_path = out_dir + "/metrics.csv";
    sink.writer.emplace(sink.result.metrics_path, run_label);
  }
  return sink;
}

}  // namespace

RunResult run_training(const ScenarioConfig& cfg, const std::string& out_dir,
                       const std::string& run_label) {
  cfg.validate();
  env::Environment world(cfg);
  agent::DdpgTrainer trainer(cfg, world);
  Sink sink = make_sink(out_dir, run_label, RunResult{});

  for (int step = 0; step < cfg.training_steps; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    const agent::TrainStepResult& res = trainer.train_step(world);
    StepMetrics m = make_metrics(step, res.outcome);
    m.critic_loss = res.critic_loss;
    m.q_value = res.q_value;
    m.td_target = res.td_target;
    m.noise_discards = res.noise_discards;
    m.wall_ms = elapsed_ms(t0);
    sink.add(m);
  }

  if (!out_dir.empty()) {
    sink.result.checkpoint_path = out_dir + "/checkpoint.txt";
    nn::save_checkpoint(sink.result.checkpoint_path,
                        {{"actor", &trainer.actor().params()},
                         {"critic", &trainer.critic().params()}});
    sink.result.topology_path = out_dir + "/topology.csv";
    dump_topology(sink.result.topology_path, world);
  }
  return sink.result;
}

RunResult run_eval(const ScenarioConfig& cfg, const std::string& checkpoint,
                   const std::string& out_dir, const std::string& run_label) {
  cfg.validate();
  env::Environment world(cfg);
  // Architecture from cfg; weights come entirely from the checkpoint.
  std::mt19937_64 scratch(0);
  agent::Actor actor(cfg.k_bands + 6, cfg.k_bands, cfg.self_node_path, scratch);
  agent::Critic critic(cfg.k_bands + 6, cfg.k_bands, scratch);
  nn::load_checkpoint(checkpoint,
                      {{"actor", &actor.params()}, {"critic", &critic.params()}});

  Sink sink = make_sink(out_dir, run_label, RunResult{});
  for (int step = 0; step < cfg.training_steps; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    const env::Observation s = world.observation();
    const env::ActionValues a = env::action_values(actor.act(s));
    const env::StepOutcome& out = world.step(a);
    StepMetrics m = make_metrics(step, out);
    m.q_value = critic.evaluate(s, a);
    m.wall_ms = elapsed_ms(t0);
    sink.add(m);
  }
  if (!out_dir.empty()) {
    sink.result.topology_path = out_dir + "/topology.csv";
    dump_topology(sink.result.topology_path, world);
  }
  return sink.result;
}

RunResult run_baseline(const ScenarioConfig& cfg, const std::string& out_dir,
                       const std::string& run_label) {
  cfg.validate();
  env::Environment world(cfg);
  Sink sink = make_sink(out_dir, run_label, RunResult{});
  for (int step = 0; step < cfg.training_steps; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    const env::StepOutcome& out =
        world.step(agent::uniform_action(cfg.n_uavs, cfg.k_bands));
    StepMetrics m = make_metrics(step, out);
    m.wall_ms = elapsed_ms(t0);
    sink.add(m);
  }
  if (!out_dir.empty()) {
    sink.result.topology_path = out_dir + "/topology.csv";
    dump_topology(sink.result.topology_path, world);
  }
  return sink.result;
}

}  // namespace thzmesh::harness

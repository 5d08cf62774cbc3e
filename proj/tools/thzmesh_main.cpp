// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver for the THz mesh simulator.
//
//   thzmesh train    --config scenario.cfg --set steps=500 --out runs/a
//   thzmesh eval     --checkpoint runs/a/checkpoint.txt --config scenario.cfg
//   thzmesh baseline --config scenario.cfg --seed 7
//
// Every scenario knob is a config key; --set key=value overrides any of them
// from the command line.  --seed/--steps/--ablation are shortcuts for the
// corresponding keys.  The default output directory comes from THZMESH_OUT_DIR
// (falling back to ./runs), with one subdirectory per run.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thzmesh/config.hpp"
#include "thzmesh/runner.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string label;
  bool no_output = false;
  bool ablation = false;
  long long seed = -1;
  long long steps = -1;
};

void add_common(CLI::App* cmd, CommonOptions* opt) {
  cmd->add_option("-c,--config", opt->config_path,
                  "Scenario config file (key=value lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", opt->overrides,
                  "Override one config key, e.g. --set N=10 (repeatable)");
  cmd->add_option("--seed", opt->seed, "Shortcut for --set seed=<value>");
  cmd->add_option("--steps", opt->steps, "Shortcut for --set steps=<value>");
  cmd->add_flag("--ablation", opt->ablation,
                "Disable the actor's dedicated self-node path "
                "(shortcut for --set self_node_path=false)");
  cmd->add_option("-o,--out", opt->out_dir,
                  "Output directory (default: $THZMESH_OUT_DIR/<verb>-seed<seed>)");
  cmd->add_option("--label", opt->label,
                  "Run label recorded in the metrics file (default: verb name)");
  cmd->add_flag("--no-output", opt->no_output,
                "Keep results in memory; write no files");
}

thzmesh::harness::ScenarioConfig make_config(const CommonOptions& opt) {
  thzmesh::harness::ScenarioConfig cfg;
  if (!opt.config_path.empty()) {
    cfg = thzmesh::harness::load_config(opt.config_path);
  }
  for (const std::string& kv : opt.overrides) {
    thzmesh::harness::apply_override(cfg, kv);
  }
  if (opt.seed >= 0) {
    thzmesh::harness::apply_override(cfg, "seed=" + std::to_string(opt.seed));
  }
  if (opt.steps >= 0) {
    thzmesh::harness::apply_override(cfg, "steps=" + std::to_string(opt.steps));
  }
  if (opt.ablation) {
    thzmesh::harness::apply_override(cfg, "self_node_path=false");
  }
  cfg.validate();
  return cfg;
}

std::string resolve_out_dir(const CommonOptions& opt, const std::string& verb,
                            const thzmesh::harness::ScenarioConfig& cfg) {
  if (opt.no_output) return {};
  if (!opt.out_dir.empty()) return opt.out_dir;
  const char* base = std::getenv("THZMESH_OUT_DIR");
  std::string root = (base != nullptr && base[0] != '\0') ? base : "runs";
  return root + "/" + verb + "-seed" + std::to_string(cfg.seed);
}

void print_summary(const std::string& verb,
                   const thzmesh::harness::RunResult& result) {
  const auto& steps = result.steps;
  double reward_sum = 0.0;
  double usage_sum = 0.0;
  double latency_max = 0.0;
  long long generated = 0;
  long long delivered = 0;
  long long lost = 0;
  for (const auto& m : steps) {
    reward_sum += m.reward;
    usage_sum += m.usage_mean;
    if (m.latency_s > latency_max) latency_max = m.latency_s;
    generated += m.generated;
    delivered += m.delivered;
    lost += m.lost;
  }
  const double n = steps.empty() ? 1.0 : static_cast<double>(steps.size());
  std::printf("%s: %zu steps\n", verb.c_str(), steps.size());
  std::printf("  mean reward          %.6g\n", reward_sum / n);
  std::printf("  mean resource usage  %.6g\n", usage_sum / n);
  std::printf("  max slot latency     %.6g s\n", latency_max);
  std::printf("  packets              generated=%lld delivered=%lld lost=%lld\n",
              generated, delivered, lost);
  std::printf("  constraint checks    %ld violations\n",
              result.total_constraint_violations);
  if (!result.metrics_path.empty()) {
    std::printf("  metrics    %s\n", result.metrics_path.c_str());
  }
  if (!result.checkpoint_path.empty()) {
    std::printf("  checkpoint %s\n", result.checkpoint_path.c_str());
  }
  if (!result.topology_path.empty()) {
    std::printf("  topology   %s\n", result.topology_path.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded THz UAV mesh simulator with a GNN-aided "
               "resource-allocation agent"};
  app.require_subcommand(1);

  CommonOptions train_opt;
  CLI::App* train = app.add_subcommand(
      "train", "Train the allocation policy online inside the simulator");
  add_common(train, &train_opt);

  CommonOptions eval_opt;
  std::string checkpoint_path;
  CLI::App* eval = app.add_subcommand(
      "eval", "Roll out a trained policy without exploration or updates");
  add_common(eval, &eval_opt);
  eval->add_option("--checkpoint", checkpoint_path,
                   "Checkpoint file produced by a training run")
      ->required()
      ->check(CLI::ExistingFile);

  CommonOptions base_opt;
  CLI::App* baseline = app.add_subcommand(
      "baseline", "Roll out the uniform full-budget allocation");
  add_common(baseline, &base_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      auto cfg = make_config(train_opt);
      const std::string label =
          train_opt.label.empty() ? "train" : train_opt.label;
      auto result = thzmesh::harness::run_training(
          cfg, resolve_out_dir(train_opt, "train", cfg), label);
      print_summary("train", result);
    } else if (eval->parsed()) {
      auto cfg = make_config(eval_opt);
      const std::string label = eval_opt.label.empty() ? "eval" : eval_opt.label;
      auto result = thzmesh::harness::run_eval(
          cfg, checkpoint_path, resolve_out_dir(eval_opt, "eval", cfg), label);
      print_summary("eval", result);
    } else {
      auto cfg = make_config(base_opt);
      const std::string label =
          base_opt.label.empty() ? "baseline" : base_opt.label;
      auto result = thzmesh::harness::run_baseline(
          cfg, resolve_out_dir(base_opt, "baseline", cfg), label);
      print_summary("baseline", result);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

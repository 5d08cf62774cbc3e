// SPDX-License-Identifier: Apache-2.0
//
// Python bindings for the THz mesh simulator: scenario configuration, the
// step-level environment, full training/eval/baseline runs, and the channel
// math helpers.  Matrices cross the boundary as flat row-major lists plus
// explicit dimensions; smoke-level consumers reshape as they wish.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "thzmesh/agent.hpp"
#include "thzmesh/channel.hpp"
#include "thzmesh/config.hpp"
#include "thzmesh/env.hpp"
#include "thzmesh/metrics.hpp"
#include "thzmesh/runner.hpp"

namespace py = pybind11;

using thzmesh::env::ActionValues;
using thzmesh::env::Environment;
using thzmesh::env::Observation;
using thzmesh::env::StepOutcome;
using thzmesh::harness::RunResult;
using thzmesh::harness::ScenarioConfig;
using thzmesh::harness::StepMetrics;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Seeded THz UAV mesh simulator with a GNN-aided resource agent";

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def("set", &thzmesh::harness::apply_override, py::arg("key_value"),
           "Apply one key=value override")
      .def("validate", &ScenarioConfig::validate)
      .def_readonly("n_uavs", &ScenarioConfig::n_uavs)
      .def_readonly("k_bands", &ScenarioConfig::k_bands)
      .def_readonly("max_subarrays", &ScenarioConfig::max_subarrays)
      .def_readonly("p_max_w", &ScenarioConfig::p_max_w)
      .def_readonly("dt_s", &ScenarioConfig::dt_s)
      .def_readonly("training_steps", &ScenarioConfig::training_steps)
      .def_readonly("seed", &ScenarioConfig::seed)
      .def_readonly("self_node_path", &ScenarioConfig::self_node_path)
      .def_property_readonly("noise_power_w", &ScenarioConfig::noise_power_w)
      .def_property_readonly("packet_bits", &ScenarioConfig::packet_bits);

  m.def("load_config", &thzmesh::harness::load_config, py::arg("path"),
        "Parse a key=value scenario file");
  m.def(
      "default_config", [] { return ScenarioConfig{}; },
      "Scenario with every key at its default");

  py::class_<Observation>(m, "Observation")
      .def_readonly("n", &Observation::n)
      .def_readonly("k", &Observation::k)
      .def_readonly("features", &Observation::features,
                    "Row-major n x (k + 6) feature matrix")
      .def_readonly("tree_adjacency", &Observation::tree_adjacency,
                    "Row-major n x n routing-tree adjacency (0/1)")
      .def_property_readonly("feature_dim", &Observation::feature_dim);

  py::class_<ActionValues>(m, "ActionValues")
      .def(py::init<>())
      .def_readwrite("n", &ActionValues::n)
      .def_readwrite("k", &ActionValues::k)
      .def_readwrite("power", &ActionValues::power,
                     "Row-major n x k per-band power budget shares")
      .def_readwrite("sub", &ActionValues::sub,
                     "Row-major n x 2 (Tx, Rx) sub-array budget shares");

  m.def("uniform_action", &thzmesh::agent::uniform_action, py::arg("n"),
        py::arg("k"), "Full-budget allocation spread evenly over bands");

  py::class_<StepOutcome>(m, "StepOutcome")
      .def_property_readonly(
          "reward", [](const StepOutcome& o) { return o.reward.reward; })
      .def_property_readonly(
          "usage_mean", [](const StepOutcome& o) { return o.usage.mean_usage; })
      .def_property_readonly(
          "latency_s",
          [](const StepOutcome& o) { return o.reward.latency_s; })
      .def_property_readonly(
          "generated",
          [](const StepOutcome& o) { return o.traffic.total_generated; })
      .def_property_readonly(
          "delivered",
          [](const StepOutcome& o) { return o.traffic.total_delivered; })
      .def_property_readonly(
          "lost", [](const StepOutcome& o) { return o.traffic.total_lost; })
      .def_property_readonly(
          "queued", [](const StepOutcome& o) { return o.traffic.queued_after; })
      .def_readonly("constraint_violations", &StepOutcome::constraint_violations)
      .def_readonly("observation_after", &StepOutcome::observation_after);

  py::class_<Environment>(m, "Environment")
      .def(py::init<const ScenarioConfig&>(), py::arg("config"))
      .def_property_readonly("header", &Environment::header)
      .def_property_readonly("slot", &Environment::slot)
      .def("observation", &Environment::observation,
           py::return_value_policy::copy)
      .def("step", &Environment::step, py::arg("action"));

  py::class_<StepMetrics>(m, "StepMetrics")
      .def_readonly("step", &StepMetrics::step)
      .def_readonly("reward", &StepMetrics::reward)
      .def_readonly("usage_mean", &StepMetrics::usage_mean)
      .def_readonly("power_usage_mean", &StepMetrics::power_usage_mean)
      .def_readonly("sub_usage_mean", &StepMetrics::sub_usage_mean)
      .def_readonly("mean_tx_power_w", &StepMetrics::mean_tx_power_w)
      .def_readonly("mean_tx_subarrays", &StepMetrics::mean_tx_subarrays)
      .def_readonly("latency_s", &StepMetrics::latency_s)
      .def_readonly("generated", &StepMetrics::generated)
      .def_readonly("delivered", &StepMetrics::delivered)
      .def_readonly("lost", &StepMetrics::lost)
      .def_readonly("queued", &StepMetrics::queued)
      .def_readonly("critic_loss", &StepMetrics::critic_loss)
      .def_readonly("q_value", &StepMetrics::q_value)
      .def_readonly("constraint_violations", &StepMetrics::constraint_violations);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("steps", &RunResult::steps)
      .def_readonly("total_constraint_violations",
                    &RunResult::total_constraint_violations)
      .def_readonly("metrics_path", &RunResult::metrics_path)
      .def_readonly("checkpoint_path", &RunResult::checkpoint_path)
      .def_readonly("topology_path", &RunResult::topology_path);

  m.def("train", &thzmesh::harness::run_training, py::arg("config"),
        py::arg("out_dir") = std::string(),
        py::arg("label") = std::string("train"),
        "Train the policy online; empty out_dir keeps results in memory");
  m.def("evaluate", &thzmesh::harness::run_eval, py::arg("config"),
        py::arg("checkpoint"), py::arg("out_dir") = std::string(),
        py::arg("label") = std::string("eval"),
        "Greedy rollout of a trained checkpoint");
  m.def("baseline", &thzmesh::harness::run_baseline, py::arg("config"),
        py::arg("out_dir") = std::string(),
        py::arg("label") = std::string("baseline"),
        "Rollout of the uniform full-budget allocation");

  // Channel math helpers.
  m.def(
      "steering_vector",
      [](int m_x, int m_y, double spacing_m, double wavelength_m,
         double azimuth_rad, double elevation_rad) {
        thzmesh::channel::ArraySpec spec;
        spec.m_x = m_x;
        spec.m_y = m_y;
        spec.spacing_m = spacing_m;
        spec.max_subarrays = 1;
        return thzmesh::channel::steering_vector(spec, wavelength_m,
                                                 azimuth_rad, elevation_rad);
      },
      py::arg("m_x"), py::arg("m_y"), py::arg("spacing_m"),
      py::arg("wavelength_m"), py::arg("azimuth_rad"),
      py::arg("elevation_rad"));
  m.def(
      "path_gain",
      [](double centre_hz, double bandwidth_hz, double absorption_per_m,
         double distance_m) {
        thzmesh::channel::BandPlan plan;
        plan.num_bands = 1;
        plan.bandwidth_hz = bandwidth_hz;
        plan.carrier_hz = {centre_hz};
        plan.absorption_per_m = {absorption_per_m};
        return thzmesh::channel::path_gain(plan, 0, distance_m);
      },
      py::arg("centre_hz"), py::arg("bandwidth_hz"),
      py::arg("absorption_per_m"), py::arg("distance_m"));
  m.def("noise_power", &thzmesh::channel::noise_power_w,
        py::arg("temperature_k"), py::arg("bandwidth_hz"));
  m.def(
      "link_rate",
      [](const std::vector<double>& sinr, double bandwidth_hz) {
        return thzmesh::channel::link_rate_bps(sinr, bandwidth_hz);
      },
      py::arg("sinr"), py::arg("bandwidth_hz"));
}

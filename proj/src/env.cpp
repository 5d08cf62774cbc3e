// SPDX-License-Identifier: Apache-2.0
#include "thzmesh/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "thzmesh/constants.hpp"

namespace thzmesh::env {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_simplex_rows(const std::vector<double>& m, int rows, int cols,
                        const char* what) {
  require(static_cast<int>(m.size()) == rows * cols, "action: head size mismatch");
  for (int i = 0; i < rows; ++i) {
    double sum = 0.0;
    for (int j = 0; j < cols; ++j) {
      const double v = m[static_cast<std::size_t>(i) * cols + j];
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(std::string("action: ") + what +
                                    " entries must be finite and non-negative");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw std::invalid_argument(std::string("action: ") + what +
                                  " rows must sum to 1 within 1e-6");
    }
  }
}

// Smallest usable link length; co-located UAVs would otherwise produce an
// unbounded path gain.
constexpr double kMinLinkDistanceM = 1e-3;

}  // namespace

ActionValues action_values(const ActionHeads& heads) {
  require(heads.n > 0 && heads.k > 0, "action: empty heads");
  check_simplex_rows(heads.power_use, heads.n, 2, "power on/off head");
  check_simplex_rows(heads.power_dist, heads.n, heads.k, "power split head");
  check_simplex_rows(heads.sub_use, heads.n, 2, "sub-array on/off head");
  check_simplex_rows(heads.sub_split, heads.n, 2, "sub-array Tx/Rx head");

  ActionValues av;
  av.n = heads.n;
  av.k = heads.k;
  av.power.resize(static_cast<std::size_t>(heads.n) * heads.k);
  av.sub.resize(static_cast<std::size_t>(heads.n) * 2);
  for (int i = 0; i < heads.n; ++i) {
    const double p_on = heads.power_use[static_cast<std::size_t>(i) * 2];
    for (int k = 0; k < heads.k; ++k) {
      av.power[static_cast<std::size_t>(i) * heads.k + k] =
          p_on * heads.power_dist[static_cast<std::size_t>(i) * heads.k + k];
    }
    const double s_on = heads.sub_use[static_cast<std::size_t>(i) * 2];
    av.sub[static_cast<std::size_t>(i) * 2 + 0] =
        s_on * heads.sub_split[static_cast<std::size_t>(i) * 2 + 0];
    av.sub[static_cast<std::size_t>(i) * 2 + 1] =
        s_on * heads.sub_split[static_cast<std::size_t>(i) * 2 + 1];
  }
  return av;
}

ResourceAction apply_action(const ActionValues& action,
                            const net::TopologySnapshot& topo, int header_id,
                            const harness::ScenarioConfig& cfg) {
  require(action.n == topo.n, "apply: action size mismatch");
  require(action.k == cfg.k_bands, "apply: band count mismatch");
  const int n = action.n;
  const int k = action.k;

  ResourceAction out;
  out.n = n;
  out.k = k;
  out.tx_power_w.assign(static_cast<std::size_t>(n) * k, 0.0);
  out.tx_subarrays.assign(static_cast<std::size_t>(n), 0);
  out.rx_subarrays.assign(static_cast<std::size_t>(n), {});

  for (int i = 0; i < n; ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    const bool transmitter = (i != header_id) && topo.routed(i);
    const auto& in = topo.in_links[si];
    const int n_in = static_cast<int>(in.size());

    if (transmitter) {
      for (int b = 0; b < k; ++b) {
        out.tx_power_w[si * static_cast<std::size_t>(k) + b] =
            cfg.p_max_w * action.power[si * static_cast<std::size_t>(k) + b];
      }
    }

    // One sub-array is reserved per active link end before the policy's
    // share is applied to what remains.
    const int tx_pre = transmitter ? 1 : 0;
    const int rx_pre = n_in;
    const int remaining = cfg.max_subarrays - tx_pre - rx_pre;
    require(remaining >= 0, "apply: sub-array budget below pre-assignment");

    const double tx_share = action.sub[si * 2 + 0];
    const double rx_share = action.sub[si * 2 + 1];
    const int extra_tx =
        transmitter ? static_cast<int>(std::floor(remaining * tx_share)) : 0;
    const int extra_rx =
        n_in > 0 ? static_cast<int>(std::floor(remaining * rx_share)) : 0;

    out.tx_subarrays[si] = tx_pre + extra_tx;
    if (n_in > 0) {
      auto& rx = out.rx_subarrays[si];
      rx.assign(static_cast<std::size_t>(n_in), 1);
      const int each = extra_rx / n_in;
      const int rem = extra_rx % n_in;
      // in_links is ascending by id; the remainder goes to the lowest ids.
      for (int l = 0; l < n_in; ++l) {
        rx[static_cast<std::size_t>(l)] += each + (l < rem ? 1 : 0);
      }
    }
  }
  return out;
}

UsageMetrics compute_usage(const ResourceAction& applied,
                           const harness::ScenarioConfig& cfg) {
  const int n = applied.n;
  const int k = applied.k;
  UsageMetrics u;
  u.power_usage.resize(static_cast<std::size_t>(n));
  u.sub_usage.resize(static_cast<std::size_t>(n));
  u.total_usage.resize(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    double p = 0.0;
    for (int b = 0; b < k; ++b)
      p += applied.tx_power_w[si * static_cast<std::size_t>(k) + b];
    u.power_usage[si] = p / cfg.p_max_w;
    int subs = applied.tx_subarrays[si];
    for (int r : applied.rx_subarrays[si]) subs += r;
    u.sub_usage[si] = static_cast<double>(subs) / cfg.max_subarrays;
    u.total_usage[si] = 0.5 * (u.power_usage[si] + u.sub_usage[si]);
    acc += u.total_usage[si];
  }
  u.mean_usage = acc / static_cast<double>(n);
  return u;
}

int count_constraint_violations(const ResourceAction& applied,
                                const net::TopologySnapshot& topo, int header_id,
                                const harness::ScenarioConfig& cfg) {
  const int n = applied.n;
  const int k = applied.k;
  int violations = 0;
  const double p_tol = cfg.p_max_w * 1e-12;
  for (int i = 0; i < n; ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    const bool transmitter = (i != header_id) && topo.routed(i);
    double total_p = 0.0;
    for (int b = 0; b < k; ++b) {
      const double p = applied.tx_power_w[si * static_cast<std::size_t>(k) + b];
      if (!(p >= 0.0) || p > cfg.p_max_w + p_tol) ++violations;  // per-band box
      total_p += p;
    }
    if (total_p > cfg.p_max_w + p_tol) ++violations;  // power budget
    if (!transmitter && total_p != 0.0) ++violations;  // masking
    if (transmitter && applied.tx_subarrays[si] < 1) ++violations;  // live Tx link
    if (!transmitter && applied.tx_subarrays[si] != 0) ++violations;

    const auto& in = topo.in_links[si];
    const auto& rx = applied.rx_subarrays[si];
    if (rx.size() != in.size()) {
      ++violations;
    } else {
      for (int r : rx) {
        if (r < 1) ++violations;  // live Rx link minimum
      }
    }
    int subs = applied.tx_subarrays[si];
    for (int r : rx) subs += r;
    if (subs > cfg.max_subarrays) ++violations;  // sub-array budget
  }
  return violations;
}

Environment::Environment(const harness::ScenarioConfig& cfg)
    : cfg_(cfg),
      bank_((cfg.validate(), cfg.seed)),
      fleet_(net::spawn_fleet(cfg.n_uavs, cfg.region_x_m, cfg.region_y_m,
                              cfg.altitude_m, cfg.v_max_m_s,
                              bank_.stream(Stream::init))),
      topo_(net::snapshot(fleet_, cfg.comm_range_m, cfg.hop_weight,
                          cfg.loss_weight, 0)),
      model_(cfg.mean_rate_bps, cfg.hurst, cfg.sigma_tr_bits(), cfg.dt_s,
             cfg.packet_bits(), cfg.n_uavs),
      engine_(cfg.n_uavs, cfg.buffer_capacity, cfg.packet_bits()),
      last_sinr_(static_cast<std::size_t>(cfg.n_uavs) * cfg.k_bands, 0.0) {
  // Per-packet latency lists are an engine-level debugging aid; the
  // environment and everything above it consume only the slot mean.
  engine_.set_latency_recording(false);
  obs_ = observe();
}

const StepOutcome& Environment::step(const ActionValues& action) {
  const int n = cfg_.n_uavs;
  const int k = cfg_.k_bands;
  require(action.n == n && action.k == k, "env: action shape mismatch");

  StepOutcome& out = outcome_;
  out.applied = apply_action(action, topo_, fleet_.header_id, cfg_);
  out.constraint_violations = count_constraint_violations(
      out.applied, topo_, fleet_.header_id, cfg_);

  // Channel realisation per routed transmitter.
  const channel::BandPlan plan = cfg_.band_plan();
  const channel::ArraySpec arr = cfg_.array_spec();
  const double noise_w = cfg_.noise_power_w();
  out.links.assign(static_cast<std::size_t>(n), std::nullopt);
  rates_scratch_.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<double>& rates = rates_scratch_;
  std::fill(last_sinr_.begin(), last_sinr_.end(), 0.0);
  auto& chan_rng = bank_.stream(Stream::channel);
  for (int i = 0; i < n; ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    if (i == fleet_.header_id || !topo_.routed(i)) continue;
    const int parent = topo_.next_hop[si];
    const double d = std::max(topo_.hop_distance_m[si], kMinLinkDistanceM);

    channel::ChannelRealization link;
    link.tx = i;
    link.rx = parent;
    link.distance_m = d;
    link.path_gain.resize(static_cast<std::size_t>(k));
    link.misalignment_gain.resize(static_cast<std::size_t>(k));
    link.channel_gain.resize(static_cast<std::size_t>(k));
    link.interference_w.resize(static_cast<std::size_t>(k));
    link.sinr.resize(static_cast<std::size_t>(k));

    // One pointing error and one stray-interference draw per link per slot,
    // shared across the sub-bands.
    const double mis = channel::misalignment_gain(
        cfg_.misalign_sigma_m, cfg_.misalign_waist_m, cfg_.misalign_peak,
        chan_rng);
    const double interference = channel::stray_interference_w(
        cfg_.interference_mean_frac * noise_w,
        cfg_.interference_sd_frac * noise_w, chan_rng);

    // Receiving sub-arrays assigned by the parent to this in-link.
    const auto& plinks = topo_.in_links[static_cast<std::size_t>(parent)];
    int rx_count = 0;
    for (std::size_t l = 0; l < plinks.size(); ++l) {
      if (plinks[l] == i) {
        rx_count = out.applied.rx_subarrays[static_cast<std::size_t>(parent)][l];
        break;
      }
    }

    for (int b = 0; b < k; ++b) {
      const std::size_t sb = static_cast<std::size_t>(b);
      link.path_gain[sb] = channel::path_gain(plan, b, d);
      link.misalignment_gain[sb] = mis;
      link.channel_gain[sb] = channel::aligned_channel_gain(
          arr, out.applied.tx_subarrays[si], rx_count, link.path_gain[sb], mis);
      link.interference_w[sb] = interference;
      link.sinr[sb] = channel::sinr(
          out.applied.tx_power_w[si * static_cast<std::size_t>(k) + b],
          link.channel_gain[sb], interference, noise_w);
      last_sinr_[si * static_cast<std::size_t>(k) + b] = link.sinr[sb];
    }
    link.rate_bps = channel::link_rate_bps(link.sinr, plan.bandwidth_hz);

    // Radial velocity toward the parent (informational Doppler bookkeeping).
    const net::UavNode& self = fleet_.nodes[si];
    const net::UavNode& peer = fleet_.nodes[static_cast<std::size_t>(parent)];
    const double rel = ((self.x - peer.x) * (self.vx - peer.vx) +
                        (self.y - peer.y) * (self.vy - peer.vy)) /
                       d;
    link.doppler_phase = channel::doppler_phase(
        rel, plan.carrier_hz[static_cast<std::size_t>(k / 2)], d);

    rates[si] = link.rate_bps;
    out.links[si] = std::move(link);
  }

  // Traffic for this slot; the header sources nothing.
  model_.arrivals_into(bank_.stream(Stream::traffic_volume),
                       bank_.stream(Stream::traffic_offsets), offsets_scratch_);
  offsets_scratch_[static_cast<std::size_t>(fleet_.header_id)].clear();
  out.traffic =
      engine_.step(topo_, rates, offsets_scratch_, cfg_.dt_s, fleet_.header_id);

  out.usage = compute_usage(out.applied, cfg_);
  out.reward.mean_usage = out.usage.mean_usage;
  out.reward.latency_s = out.traffic.mean_delivery_latency_s;
  out.reward.lost_packets = static_cast<double>(out.traffic.total_lost);
  out.reward.reward = -(cfg_.chi1 * out.reward.mean_usage +
                        cfg_.chi2 * out.reward.latency_s +
                        cfg_.chi3 * out.reward.lost_packets);

  // Advance the world to the next slot.
  net::step_mobility(fleet_, cfg_.dt_s, bank_.stream(Stream::mobility));
  ++slot_;
  topo_ = net::snapshot(fleet_, cfg_.comm_range_m, cfg_.hop_weight,
                        cfg_.loss_weight, slot_);
  obs_ = observe();
  out.observation_after = obs_;
  return out;
}

Observation Environment::observe() const {
  const int n = cfg_.n_uavs;
  const int k = cfg_.k_bands;
  Observation o;
  o.slot = slot_;
  o.n = n;
  o.k = k;
  const int f = o.feature_dim();
  o.features.assign(static_cast<std::size_t>(n) * f, 0.0);
  o.tree_adjacency.assign(static_cast<std::size_t>(n) * n, 0);

  for (int i = 0; i < n; ++i) {
    const int p = topo_.next_hop[static_cast<std::size_t>(i)];
    if (p >= 0) {
      o.tree_adjacency[static_cast<std::size_t>(i) * n + p] = 1;
      o.tree_adjacency[static_cast<std::size_t>(p) * n + i] = 1;
    }
  }

  // Predicted relay load: own expected arrivals plus current queue plus the
  // load already predicted for every child, accumulated leaf to root.
  const double own_mean = model_.mean_packets_per_slot();
  std::vector<double> load(static_cast<std::size_t>(n), 0.0);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const int da = topo_.depth[static_cast<std::size_t>(a)] < 0
                       ? std::numeric_limits<int>::max()
                       : topo_.depth[static_cast<std::size_t>(a)];
    const int db = topo_.depth[static_cast<std::size_t>(b)] < 0
                       ? std::numeric_limits<int>::max()
                       : topo_.depth[static_cast<std::size_t>(b)];
    if (da != db) return da > db;
    return a < b;
  });
  for (int i : order) {
    const std::size_t si = static_cast<std::size_t>(i);
    double v = (i == fleet_.header_id) ? 0.0 : own_mean;
    v += static_cast<double>(engine_.queue_length(i));
    for (int c : topo_.in_links[si]) v += load[static_cast<std::size_t>(c)];
    load[si] = v;
  }
  const double load_base =
      own_mean > 0.0 ? own_mean * static_cast<double>(n) : 1.0;

  for (int i = 0; i < n; ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    const net::UavNode& u = fleet_.nodes[si];
    double* row = &o.features[si * static_cast<std::size_t>(f)];
    row[0] = load[si] / load_base;
    row[1] = static_cast<double>(engine_.queue_length(i)) /
             static_cast<double>(cfg_.buffer_capacity);
    for (int b = 0; b < k; ++b) {
      row[2 + b] =
          std::log10(1.0 + last_sinr_[si * static_cast<std::size_t>(k) + b]) / 10.0;
    }
    row[2 + k] = topo_.hop_distance_m[si] / cfg_.comm_range_m;
    row[2 + k + 1] = u.x / cfg_.region_x_m;
    row[2 + k + 2] = u.y / cfg_.region_y_m;
    row[2 + k + 3] =
        (i == fleet_.header_id || topo_.routed(i)) ? 1.0 : 0.0;
  }
  return o;
}

}  // namespace thzmesh::env

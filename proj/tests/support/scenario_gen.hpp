// SPDX-License-Identifier: Apache-2.0
//
// Randomised small relay scenarios for engine-versus-oracle comparison:
// random trees (bounded depth), mixed link rates from starved to instant,
// small buffers to provoke drops, and occasional topology reshuffles with
// packets still queued or airborne.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "thzmesh/network.hpp"
#include "thzmesh/traffic.hpp"

namespace thzmesh::testing {

struct RelayScenario {
  int n = 0;
  int header = 0;
  int slots = 0;
  double dt_s = 0.1;
  double packet_bits = 16000.0;
  std::uint64_t capacity = 10;
  std::vector<net::TopologySnapshot> topo;               // per slot
  std::vector<std::vector<double>> rates;                // per slot, per node
  std::vector<std::vector<std::vector<double>>> offsets; // per slot, per node
};

inline net::TopologySnapshot random_tree(int n, int header, int max_depth,
                                         std::mt19937_64& rng) {
  net::TopologySnapshot t;
  t.n = n;
  t.next_hop.assign(static_cast<std::size_t>(n), -1);
  t.hop_distance_m.assign(static_cast<std::size_t>(n), 0.0);
  t.depth.assign(static_cast<std::size_t>(n), -1);
  t.in_links.assign(static_cast<std::size_t>(n), {});
  t.adjacency.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  t.distance_m.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  t.depth[static_cast<std::size_t>(header)] = 0;

  std::vector<int> order;
  for (int i = 0; i < n; ++i) {
    if (i != header) order.push_back(i);
  }
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<int> attached{header};
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> dist(0.0, 600.0);
  for (int i : order) {
    if (u01(rng) < 0.15) continue;  // leave unrouted
    // Attach to a random already-attached node below the depth cap.
    std::vector<int> hosts;
    for (int h : attached) {
      if (t.depth[static_cast<std::size_t>(h)] < max_depth) hosts.push_back(h);
    }
    if (hosts.empty()) continue;
    const int host =
        hosts[std::uniform_int_distribution<std::size_t>(0, hosts.size() - 1)(rng)];
    t.next_hop[static_cast<std::size_t>(i)] = host;
    t.hop_distance_m[static_cast<std::size_t>(i)] =
        u01(rng) < 0.1 ? 0.0 : dist(rng);
    t.depth[static_cast<std::size_t>(i)] =
        t.depth[static_cast<std::size_t>(host)] + 1;
    t.in_links[static_cast<std::size_t>(host)].push_back(i);
    attached.push_back(i);
  }
  for (auto& links : t.in_links) std::sort(links.begin(), links.end());
  return t;
}

inline RelayScenario random_relay_scenario(std::uint64_t seed, int max_depth = 4,
                                           int max_total_packets = 300) {
  std::mt19937_64 rng(seed);
  RelayScenario sc;
  sc.n = std::uniform_int_distribution<int>(2, 8)(rng);
  sc.header = std::uniform_int_distribution<int>(0, sc.n - 1)(rng);
  sc.slots = std::uniform_int_distribution<int>(1, 4)(rng);
  const double dts[] = {0.01, 0.1, 0.5};
  sc.dt_s = dts[std::uniform_int_distribution<int>(0, 2)(rng)];
  const double bits[] = {100.0, 1600.0, 16000.0, 100000.0};
  sc.packet_bits = bits[std::uniform_int_distribution<int>(0, 3)(rng)];
  const std::uint64_t caps[] = {1, 2, 3, 5, 10, 50, 1000};
  sc.capacity = caps[std::uniform_int_distribution<int>(0, 6)(rng)];

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int budget = max_total_packets;
  net::TopologySnapshot topo = random_tree(sc.n, sc.header, max_depth, rng);
  for (int s = 0; s < sc.slots; ++s) {
    if (s > 0 && u01(rng) < 0.3) {
      topo = random_tree(sc.n, sc.header, max_depth, rng);
    }
    sc.topo.push_back(topo);

    std::vector<double> rates(static_cast<std::size_t>(sc.n), 0.0);
    for (int i = 0; i < sc.n; ++i) {
      const double pick = u01(rng);
      const double per_slot = sc.packet_bits / sc.dt_s;  // 1 packet per slot
      if (pick < 0.15) {
        rates[static_cast<std::size_t>(i)] = 0.0;  // starved
      } else if (pick < 0.45) {
        rates[static_cast<std::size_t>(i)] =
            per_slot * std::uniform_real_distribution<double>(0.5, 3.0)(rng);
      } else if (pick < 0.8) {
        rates[static_cast<std::size_t>(i)] =
            per_slot * std::uniform_real_distribution<double>(10.0, 50.0)(rng);
      } else {
        rates[static_cast<std::size_t>(i)] = 1e9;  // effectively instant
      }
    }
    sc.rates.push_back(rates);

    std::vector<std::vector<double>> offs(static_cast<std::size_t>(sc.n));
    for (int i = 0; i < sc.n; ++i) {
      if (i == sc.header) continue;
      int count = std::uniform_int_distribution<int>(0, 25)(rng);
      count = std::min(count, budget);
      budget -= count;
      auto& v = offs[static_cast<std::size_t>(i)];
      v.resize(static_cast<std::size_t>(count));
      std::uniform_real_distribution<double> off(0.0, sc.dt_s);
      for (double& x : v) x = off(rng);
      std::sort(v.begin(), v.end());
    }
    sc.offsets.push_back(offs);
  }
  return sc;
}

// Field-by-field comparison, doubles bit-for-bit; returns an empty string on
// agreement and a description of the first mismatch otherwise.
inline std::string compare_reports(const traffic::SlotTrafficReport& a,
                                   const traffic::SlotTrafficReport& b) {
  auto fail = [](const std::string& what) { return what; };
  if (a.slot != b.slot) return fail("slot");
  if (a.generated != b.generated) return fail("generated per node");
  if (a.relayed_in != b.relayed_in) return fail("relayed_in per node");
  if (a.delivered != b.delivered) return fail("delivered per origin");
  if (a.lost != b.lost) return fail("lost per node");
  if (a.total_generated != b.total_generated) return fail("total_generated");
  if (a.total_delivered != b.total_delivered) return fail("total_delivered");
  if (a.total_lost != b.total_lost) return fail("total_lost");
  if (a.queued_after != b.queued_after) return fail("queued_after");
  if (a.delivered_latency_s.size() != b.delivered_latency_s.size()) {
    return fail("latency count");
  }
  for (std::size_t i = 0; i < a.delivered_latency_s.size(); ++i) {
    if (a.delivered_latency_s[i] != b.delivered_latency_s[i]) {
      return fail("latency[" + std::to_string(i) + "]");
    }
  }
  if (a.mean_delivery_latency_s != b.mean_delivery_latency_s) {
    return fail("mean latency");
  }
  return {};
}

}  // namespace thzmesh::testing

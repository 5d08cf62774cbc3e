// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "support/scenario_gen.hpp"
#include "support/transport_oracle.hpp"
#include "thzmesh/traffic.hpp"

using namespace thzmesh;
using thzmesh::testing::OracleTransport;

namespace {

// Star/chain topology helper: parent_of[i] < 0 means unrouted (or header).
net::TopologySnapshot make_topo(int n, int header,
                                const std::vector<int>& parent_of,
                                const std::vector<double>& hop_dist) {
  net::TopologySnapshot t;
  t.n = n;
  t.next_hop.assign(static_cast<std::size_t>(n), -1);
  t.hop_distance_m.assign(static_cast<std::size_t>(n), 0.0);
  t.depth.assign(static_cast<std::size_t>(n), -1);
  t.in_links.assign(static_cast<std::size_t>(n), {});
  t.adjacency.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  t.distance_m.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  t.depth[static_cast<std::size_t>(header)] = 0;
  for (int i = 0; i < n; ++i) {
    if (i == header || parent_of[static_cast<std::size_t>(i)] < 0) continue;
    t.next_hop[static_cast<std::size_t>(i)] = parent_of[static_cast<std::size_t>(i)];
    t.hop_distance_m[static_cast<std::size_t>(i)] = hop_dist[static_cast<std::size_t>(i)];
    t.in_links[static_cast<std::size_t>(parent_of[static_cast<std::size_t>(i)])]
        .push_back(i);
  }
  // Depths by repeated relaxation (inputs are small trees).
  for (int pass = 0; pass < n; ++pass) {
    for (int i = 0; i < n; ++i) {
      const int p = t.next_hop[static_cast<std::size_t>(i)];
      if (p >= 0 && t.depth[static_cast<std::size_t>(p)] >= 0) {
        t.depth[static_cast<std::size_t>(i)] =
            t.depth[static_cast<std::size_t>(p)] + 1;
      }
    }
  }
  for (auto& links : t.in_links) std::sort(links.begin(), links.end());
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Fractional Gaussian noise
// ---------------------------------------------------------------------------

TEST_CASE("fgn autocovariance closed form") {
  // 0.5 * ((k+1)^2H - 2 k^2H + (k-1)^2H)
  CHECK(traffic::FgnGenerator::autocovariance(0.8, 0) == 1.0);
  CHECK(traffic::FgnGenerator::autocovariance(0.8, 1) ==
        doctest::Approx(0.5157165665103982).epsilon(1e-15));
  CHECK(traffic::FgnGenerator::autocovariance(0.8, -1) ==
        traffic::FgnGenerator::autocovariance(0.8, 1));
  // H = 0.5 is white noise.
  for (long k = 1; k <= 5; ++k) {
    CHECK(std::abs(traffic::FgnGenerator::autocovariance(0.5, k)) < 1e-12);
  }
  // Long-range dependence: slow decay for high H.
  CHECK(traffic::FgnGenerator::autocovariance(0.9, 10) >
        traffic::FgnGenerator::autocovariance(0.6, 10));
}

TEST_CASE("fgn matches a dense Cholesky factorisation driven by the same innovations") {
  const double hurst = 0.8;
  const int t_max = 40;

  // Dense reference: x = L z with L the Cholesky factor of the Toeplitz
  // autocovariance matrix.
  std::vector<std::vector<double>> sigma(
      static_cast<std::size_t>(t_max), std::vector<double>(static_cast<std::size_t>(t_max)));
  for (int i = 0; i < t_max; ++i) {
    for (int j = 0; j < t_max; ++j) {
      sigma[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          traffic::FgnGenerator::autocovariance(hurst, i - j);
    }
  }
  std::vector<std::vector<double>> chol(
      static_cast<std::size_t>(t_max), std::vector<double>(static_cast<std::size_t>(t_max), 0.0));
  for (int i = 0; i < t_max; ++i) {
    for (int j = 0; j <= i; ++j) {
      double acc = sigma[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      for (int m = 0; m < j; ++m) {
        acc -= chol[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] *
               chol[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)];
      }
      chol[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          (i == j) ? std::sqrt(acc)
                   : acc / chol[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
    }
  }

  std::mt19937_64 rng(7);
  std::normal_distribution<double> z01(0.0, 1.0);
  std::vector<double> z(static_cast<std::size_t>(t_max));
  for (double& v : z) v = z01(rng);

  traffic::FgnGenerator gen(hurst, 1);
  for (int t = 0; t < t_max; ++t) {
    double out = 0.0;
    gen.advance_with_innovations({&z[static_cast<std::size_t>(t)], 1}, {&out, 1});
    double ref = 0.0;
    for (int j = 0; j <= t; ++j) {
      ref += chol[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] *
             z[static_cast<std::size_t>(j)];
    }
    CHECK(out == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("fgn empirical autocovariance approaches the closed form") {
  const double hurst = 0.8;
  const int t_max = 20000;
  traffic::FgnGenerator gen(hurst, 1);
  std::mt19937_64 rng(123);
  std::vector<double> x(static_cast<std::size_t>(t_max));
  for (int t = 0; t < t_max; ++t) {
    gen.advance(rng, {&x[static_cast<std::size_t>(t)], 1});
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= t_max;
  for (long lag = 1; lag <= 5; ++lag) {
    double acc = 0.0;
    for (int t = 0; t < t_max - lag; ++t) {
      acc += (x[static_cast<std::size_t>(t)] - mean) *
             (x[static_cast<std::size_t>(t + lag)] - mean);
    }
    const double sample = acc / static_cast<double>(t_max - lag);
    const double expected = traffic::FgnGenerator::autocovariance(hurst, lag);
    CHECK(std::abs(sample - expected) < 0.05 * expected + 0.01);
  }
}

TEST_CASE("fgn lockstep streams with identical innovations coincide") {
  traffic::FgnGenerator gen(0.75, 3);
  for (int t = 0; t < 50; ++t) {
    const double z = 0.1 * t - 2.0;
    std::vector<double> zz(3, z), out(3);
    gen.advance_with_innovations(zz, out);
    CHECK(out[0] == out[1]);
    CHECK(out[1] == out[2]);
  }
}

TEST_CASE("fgn rejects invalid parameters") {
  CHECK_THROWS(traffic::FgnGenerator(0.4, 1));
  CHECK_THROWS(traffic::FgnGenerator(1.0, 1));
  CHECK_THROWS(traffic::FgnGenerator(0.8, 0));
}

// ---------------------------------------------------------------------------
// Arrival process
// ---------------------------------------------------------------------------

TEST_CASE("deterministic volume packetisation at defaults") {
  // 10 Gbit/s * 0.1 s / 16000 bits = 62500 packets, exactly, when sigma = 0.
  traffic::TrafficModel model(10e9, 0.8, 0.0, 0.1, 16000.0, 2);
  CHECK(model.mean_packets_per_slot() == 62500.0);
  std::mt19937_64 vol(1), off(2);
  const auto arr = model.arrivals(vol, off);
  REQUIRE(arr.size() == 2);
  CHECK(arr[0].size() == 62500);
  CHECK(arr[1].size() == 62500);
}

TEST_CASE("arrival offsets are sorted, in range, and match a plain sort of the draws") {
  traffic::TrafficModel model(4e7, 0.8, 4e6 * 0.1, 0.1, 16000.0, 3);
  std::mt19937_64 vol(11), off(22), off_replay(22);
  const auto arr = model.arrivals(vol, off);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  for (const auto& stream : arr) {
    std::vector<double> expect(stream.size());
    for (double& v : expect) v = u(off_replay);
    std::sort(expect.begin(), expect.end());
    REQUIRE(stream.size() == expect.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
      CHECK(stream[i] == expect[i]);
      CHECK(stream[i] >= 0.0);
      CHECK(stream[i] < 0.1);
    }
  }
}

TEST_CASE("bucket sort agrees with std::sort on large uniform draws") {
  std::mt19937_64 rng(5);
  traffic::TrafficModel model(3e9, 0.9, 0.0, 0.25, 800.0, 1);
  std::mt19937_64 vol(3), off(4), off_replay(4);
  const auto arr = model.arrivals(vol, off);
  REQUIRE(arr[0].size() > 100000);  // large enough to exercise the buckets
  std::uniform_real_distribution<double> u(0.0, 0.25);
  std::vector<double> expect(arr[0].size());
  for (double& v : expect) v = u(off_replay);
  std::sort(expect.begin(), expect.end());
  CHECK(arr[0] == expect);
}

TEST_CASE("negative volumes clip to zero packets") {
  // sigma enormous: some slots must clip; none may go negative.
  traffic::TrafficModel model(1e5, 0.8, 1e9, 0.1, 16000.0, 1);
  std::mt19937_64 vol(9), off(10);
  bool saw_empty = false;
  for (int t = 0; t < 50; ++t) {
    const auto arr = model.arrivals(vol, off);
    if (arr[0].empty()) saw_empty = true;
  }
  CHECK(saw_empty);
}

// ---------------------------------------------------------------------------
// FIFO ring buffer
// ---------------------------------------------------------------------------

TEST_CASE("fifo ring survives growth and wraparound") {
  traffic::FifoBuffer buf(1U << 20);
  std::uint64_t next_in = 0, next_out = 0;
  std::mt19937_64 rng(3);
  for (int round = 0; round < 20000; ++round) {
    const int pushes = static_cast<int>(rng() % 7);
    for (int i = 0; i < pushes; ++i) {
      traffic::QueuedPacket p;
      p.pkt.id = next_in++;
      buf.push(p);
    }
    const int pops = static_cast<int>(rng() % 7);
    for (int i = 0; i < pops && !buf.empty(); ++i) {
      CHECK(buf.front().pkt.id == next_out);
      buf.pop_front();
      ++next_out;
    }
    REQUIRE(buf.size() == next_in - next_out);
  }
  // Indexed access matches FIFO positions.
  for (std::size_t i = 0; i < std::min<std::uint64_t>(buf.size(), 32); ++i) {
    CHECK(buf.at(i).pkt.id == next_out + i);
  }
}

TEST_CASE("fifo capacity gates admissions in the engine") {
  const auto topo = make_topo(2, 1, {-1, -1}, {0.0, 0.0});
  // Node 0 unrouted with capacity 2: third arrival is dropped.
  traffic::TransportEngine engine(2, 2, 16000.0);
  std::vector<double> rates{0.0, 0.0};
  const auto& rep =
      engine.step(topo, rates, {{0.01, 0.02, 0.03}, {}}, 0.1, 1);
  CHECK(rep.generated[0] == 3);
  CHECK(rep.lost[0] == 1);
  CHECK(rep.total_lost == 1);
  CHECK(rep.queued_after == 2);
  CHECK(engine.buffer(0).lost_total() == 1);
  CHECK(engine.created_total() ==
        engine.delivered_total() + engine.lost_total() + engine.queued_now());
}

// ---------------------------------------------------------------------------
// Transport engine against frozen hand values
// ---------------------------------------------------------------------------

TEST_CASE("single link latencies, bit-exact") {
  // Service time 16000 bits / 1.6 MHz = 10 ms; zero propagation.  Each packet
  // finds an empty queue, so latency = one service time, whose floating-point
  // value depends on the arrival offset it is added to.
  const auto topo = make_topo(2, 1, {1, -1}, {0.0, 0.0});
  traffic::TransportEngine engine(2, 1000, 16000.0);
  std::vector<double> rates{1.6e6, 0.0};
  const auto& rep = engine.step(topo, rates, {{0.01, 0.02, 0.03}, {}}, 0.1, 1);
  REQUIRE(rep.delivered_latency_s.size() == 3);
  CHECK(rep.delivered_latency_s[0] == 0x1.47ae147ae147bp-7);
  CHECK(rep.delivered_latency_s[1] == 0x1.47ae147ae147ap-7);
  CHECK(rep.delivered_latency_s[2] == 0x1.47ae147ae147cp-7);
  CHECK(rep.mean_delivery_latency_s == 0x1.47ae147ae147bp-7);
  CHECK(rep.total_delivered == 3);
  CHECK(rep.relayed_in[1] == 3);
  CHECK(rep.queued_after == 0);
}

TEST_CASE("two-hop latency includes both services and the propagation delay") {
  const auto topo = make_topo(3, 2, {1, 2, -1}, {300.0, 0.0, 0.0});
  traffic::TransportEngine engine(3, 1000, 16000.0);
  std::vector<double> rates{1.6e7, 1.6e7, 0.0};
  const auto& rep = engine.step(topo, rates, {{0.05}, {}, {}}, 0.1, 2);
  REQUIRE(rep.delivered_latency_s.size() == 1);
  CHECK(rep.delivered_latency_s[0] == 0x1.06467110b6310p-9);
  CHECK(rep.delivered[0] == 1);
  CHECK(rep.relayed_in[1] == 1);
  CHECK(rep.relayed_in[2] == 1);
}

TEST_CASE("packets in flight at the boundary arrive next slot") {
  // Departure at 90 ms plus 20 ms of propagation lands at 110 ms: the packet
  // is airborne at the boundary and is delivered in the next slot with the
  // full 110 ms latency.
  const double prop_dist = 0.02 * 299792458.0;
  const auto topo = make_topo(2, 1, {1, -1}, {prop_dist, 0.0});
  traffic::TransportEngine engine(2, 1000, 16000.0);
  std::vector<double> rates{16000.0 / 0.09, 0.0};
  const auto& rep0 = engine.step(topo, rates, {{0.0}, {}}, 0.1, 1);
  CHECK(rep0.total_delivered == 0);
  CHECK(rep0.queued_after == 1);  // airborne counts as queued
  const auto& rep1 = engine.step(topo, rates, {{}, {}}, 0.1, 1);
  REQUIRE(rep1.delivered_latency_s.size() == 1);
  CHECK(rep1.delivered_latency_s[0] == 0x1.c28f5c28f5c29p-4);
  CHECK(rep1.queued_after == 0);
}

TEST_CASE("a starved queue drains after the rate recovers") {
  const auto topo = make_topo(2, 1, {1, -1}, {0.0, 0.0});
  traffic::TransportEngine engine(2, 1000, 16000.0);
  std::vector<double> starved{0.0, 0.0};
  const auto& rep0 = engine.step(topo, starved, {{0.04}, {}}, 0.1, 1);
  CHECK(rep0.total_delivered == 0);
  CHECK(rep0.queued_after == 1);
  std::vector<double> recovered{1.6e6, 0.0};
  const auto& rep1 = engine.step(topo, recovered, {{}, {}}, 0.1, 1);
  REQUIRE(rep1.delivered_latency_s.size() == 1);
  // (slot 1 start + 10 ms service) - creation at 40 ms = 70 ms.
  CHECK(rep1.delivered_latency_s[0] == 0x1.1eb851eb851ecp-4);
}

TEST_CASE("engine rejects malformed inputs") {
  const auto topo = make_topo(2, 1, {1, -1}, {0.0, 0.0});
  traffic::TransportEngine engine(2, 1000, 16000.0);
  std::vector<double> rates{1e6, 0.0};
  CHECK_THROWS(engine.step(topo, rates, {{}, {0.01}}, 0.1, 1));      // header traffic
  CHECK_THROWS(engine.step(topo, rates, {{0.02, 0.01}, {}}, 0.1, 1));  // unsorted
  CHECK_THROWS(engine.step(topo, rates, {{0.2}, {}}, 0.1, 1));       // outside slot
  std::vector<double> negative{-1.0, 0.0};
  CHECK_THROWS(engine.step(topo, negative, {{0.01}, {}}, 0.1, 1));
}

// ---------------------------------------------------------------------------
// Engine vs. independent event-heap oracle
// ---------------------------------------------------------------------------

TEST_CASE("engine matches the event-heap oracle exactly on randomized scenarios") {
  int compared_slots = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const auto sc = testing::random_relay_scenario(seed);
    traffic::TransportEngine engine(sc.n, sc.capacity, sc.packet_bits);
    OracleTransport oracle(sc.n, sc.capacity, sc.packet_bits);
    for (int s = 0; s < sc.slots; ++s) {
      const auto& rep = engine.step(sc.topo[static_cast<std::size_t>(s)],
                                    sc.rates[static_cast<std::size_t>(s)],
                                    sc.offsets[static_cast<std::size_t>(s)],
                                    sc.dt_s, sc.header);
      const auto ref = oracle.step(sc.topo[static_cast<std::size_t>(s)],
                                   sc.rates[static_cast<std::size_t>(s)],
                                   sc.offsets[static_cast<std::size_t>(s)],
                                   sc.dt_s, sc.header);
      const std::string diff = testing::compare_reports(rep, ref);
      if (!diff.empty()) {
        CAPTURE(seed);
        CAPTURE(s);
        FAIL_CHECK("report mismatch: " << diff);
      }
      // Full conservation on both sides, every slot.
      CHECK(engine.created_total() == engine.delivered_total() +
                                          engine.lost_total() +
                                          engine.queued_now());
      CHECK(oracle.created_total() == oracle.delivered_total() +
                                          oracle.lost_total() +
                                          oracle.queued_now());
      for (int i = 0; i < sc.n; ++i) {
        CHECK(engine.queue_length(i) == oracle.queue_length(i));
      }
      ++compared_slots;
    }
    CHECK_FALSE(oracle.fifo_violation());
  }
  CHECK(compared_slots > 600);
}

TEST_CASE("engine runs are deterministic given identical inputs") {
  const auto sc = testing::random_relay_scenario(77);
  traffic::TransportEngine a(sc.n, sc.capacity, sc.packet_bits);
  traffic::TransportEngine b(sc.n, sc.capacity, sc.packet_bits);
  for (int s = 0; s < sc.slots; ++s) {
    const auto ra = a.step(sc.topo[static_cast<std::size_t>(s)],
                           sc.rates[static_cast<std::size_t>(s)],
                           sc.offsets[static_cast<std::size_t>(s)], sc.dt_s,
                           sc.header);
    const auto rb = b.step(sc.topo[static_cast<std::size_t>(s)],
                           sc.rates[static_cast<std::size_t>(s)],
                           sc.offsets[static_cast<std::size_t>(s)], sc.dt_s,
                           sc.header);
    CHECK(testing::compare_reports(ra, rb).empty());
  }
}

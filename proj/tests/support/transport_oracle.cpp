// SPDX-License-Identifier: Apache-2.0
#include "support/transport_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "thzmesh/constants.hpp"

namespace thzmesh::testing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Chronological event, departures before arrivals at the same instant.
struct Event {
  double time;
  int kind;  // 0 = departure (node's queue front leaves), 1 = arrival
  std::uint64_t order;  // departures: scheduling seq; arrivals: packet id
  int node;
  traffic::Packet pkt;   // arrivals only
  bool link_borne = false;

  bool operator>(const Event& b) const {
    if (time != b.time) return time > b.time;
    if (kind != b.kind) return kind > b.kind;
    return order > b.order;
  }
};

}  // namespace

OracleTransport::OracleTransport(int n_uavs, std::uint64_t buffer_capacity,
                                 double packet_bits)
    : n_(n_uavs), capacity_(buffer_capacity), packet_bits_(packet_bits) {
  queues_.resize(static_cast<std::size_t>(n_uavs));
  carryover_.resize(static_cast<std::size_t>(n_uavs));
}

std::uint64_t OracleTransport::queued_now() const {
  std::uint64_t total = 0;
  for (const auto& q : queues_) total += q.size();
  for (const auto& c : carryover_) total += c.size();
  return total;
}

traffic::SlotTrafficReport OracleTransport::step(
    const net::TopologySnapshot& topo, const std::vector<double>& out_rate_bps,
    const std::vector<std::vector<double>>& new_offsets, double dt_s,
    int header_id) {
  const double slot_abs = static_cast<double>(slot_) * dt_s;
  const auto sn = [](int i) { return static_cast<std::size_t>(i); };

  traffic::SlotTrafficReport report;
  report.slot = slot_;
  report.generated.assign(sn(n_), 0);
  report.relayed_in.assign(sn(n_), 0);
  report.delivered.assign(sn(n_), 0);
  report.lost.assign(sn(n_), 0);

  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> heap;
  std::uint64_t depart_seq = 0;

  // Per-node service facts for this slot.
  std::vector<bool> can_send(sn(n_), false);
  std::vector<double> rate(sn(n_), 0.0);
  std::vector<double> prop(sn(n_), 0.0);
  for (int i = 0; i < n_; ++i) {
    if (i == header_id || !topo.routed(i)) continue;
    prop[sn(i)] =
        topo.hop_distance_m[sn(i)] / constants::speed_of_light_m_s;
    if (out_rate_bps[sn(i)] > 0.0) {
      can_send[sn(i)] = true;
      rate[sn(i)] = out_rate_bps[sn(i)];
    }
  }

  // Reschedule every backlog entry under this slot's rates: position q holds
  // the (q+1)-th transmission of the slot.
  for (int i = 0; i < n_; ++i) {
    auto& q = queues_[sn(i)];
    for (std::size_t pos = 0; pos < q.size(); ++pos) {
      double dep = kInf;
      if (can_send[sn(i)]) {
        const double cand =
            packet_bits_ * static_cast<double>(pos + 1) / rate[sn(i)];
        if (cand <= dt_s) dep = cand;
      }
      q[pos].depart_offset_s = dep;
      q[pos].seq = depart_seq;
      if (dep != kInf) {
        heap.push(Event{dep, 0, depart_seq, i, {}, false});
      }
      ++depart_seq;
    }
  }

  // Packets airborne across the previous boundary: those landing inside this
  // slot become arrivals, the rest stay airborne with rebased offsets.
  std::vector<std::vector<Flying>> carry_next(sn(n_));
  for (int i = 0; i < n_; ++i) {
    for (const Flying& f : carryover_[sn(i)]) {
      if (f.offset_s <= dt_s) {
        heap.push(Event{f.offset_s, 1, f.pkt.id, i, f.pkt, true});
      } else {
        carry_next[sn(i)].push_back(Flying{f.offset_s - dt_s, f.pkt});
      }
    }
    carryover_[sn(i)].clear();
  }

  // Freshly generated packets, ids ascending over (node, offset).
  for (int i = 0; i < n_; ++i) {
    for (double off : new_offsets[sn(i)]) {
      if (!(off >= 0.0 && off < dt_s)) {
        throw std::invalid_argument("oracle: offset outside slot");
      }
      traffic::Packet p;
      p.id = next_packet_id_++;
      p.origin = i;
      p.created_abs_s = slot_abs + off;
      heap.push(Event{off, 1, p.id, i, p, false});
      report.generated[sn(i)] += 1;
      report.total_generated += 1;
      created_total_ += 1;
    }
  }

  double latency_sum = 0.0;

  while (!heap.empty()) {
    const Event ev = heap.top();
    heap.pop();
    const int i = ev.node;

    if (ev.kind == 0) {
      // Departure: the queue front leaves, reaching the parent after the
      // propagation delay.
      auto& q = queues_[sn(i)];
      if (q.empty() || q.front().seq != ev.order) {
        fifo_violation_ = true;
        continue;
      }
      const Queued entry = q.front();
      q.erase(q.begin());
      const double land = entry.depart_offset_s + prop[sn(i)];
      const int parent = topo.next_hop[sn(i)];
      if (land <= dt_s) {
        heap.push(Event{land, 1, entry.pkt.id, parent, entry.pkt, true});
      } else {
        carry_next[sn(parent)].push_back(Flying{land - dt_s, entry.pkt});
      }
      continue;
    }

    // Arrival.
    if (ev.link_borne) report.relayed_in[sn(i)] += 1;
    if (i == header_id) {
      const double latency = (slot_abs + ev.time) - ev.pkt.created_abs_s;
      report.delivered[sn(ev.pkt.origin)] += 1;
      report.total_delivered += 1;
      latency_sum += latency;
      report.delivered_latency_s.push_back(latency);
      delivered_total_ += 1;
      continue;
    }
    auto& q = queues_[sn(i)];
    if (q.size() >= capacity_) {
      report.lost[sn(i)] += 1;
      report.total_lost += 1;
      lost_total_ += 1;
      continue;
    }
    double dep = kInf;
    if (can_send[sn(i)]) {
      const double pos = static_cast<double>(q.size() + 1);
      const double cand = ev.time + packet_bits_ * pos / rate[sn(i)];
      if (cand <= dt_s) dep = cand;
    }
    Queued entry;
    entry.pkt = ev.pkt;
    entry.depart_offset_s = dep;
    entry.seq = depart_seq++;
    q.push_back(entry);
    if (dep != kInf) {
      heap.push(Event{dep, 0, entry.seq, i, {}, false});
    }
  }

  carryover_ = std::move(carry_next);
  ++slot_;

  report.queued_after = queued_now();
  if (report.total_delivered > 0) {
    report.mean_delivery_latency_s =
        latency_sum / static_cast<double>(report.total_delivered);
  }
  return report;
}

}  // namespace thzmesh::testing

// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementation of the per-slot relay transport from
// first principles: one global chronological event heap per slot instead of
// the engine's leaf-to-root sweep over sorted blocks.  Structurally disjoint
// from the engine; the arithmetic expression forms for departure times,
// absolute instants and latencies are the same by design, so agreement is
// expected to be bit-exact.
#pragma once

#include <cstdint>
#include <vector>

#include "thzmesh/network.hpp"
#include "thzmesh/traffic.hpp"

namespace thzmesh::testing {

class OracleTransport {
 public:
  OracleTransport(int n_uavs, std::uint64_t buffer_capacity, double packet_bits);

  traffic::SlotTrafficReport step(
      const net::TopologySnapshot& topo, const std::vector<double>& out_rate_bps,
      const std::vector<std::vector<double>>& new_offsets, double dt_s,
      int header_id);

  std::uint64_t queue_length(int uav) const {
    return queues_[static_cast<std::size_t>(uav)].size();
  }
  std::uint64_t created_total() const { return created_total_; }
  std::uint64_t delivered_total() const { return delivered_total_; }
  std::uint64_t lost_total() const { return lost_total_; }
  std::uint64_t queued_now() const;

  // Set when a departure event ever fires for an entry that is not at the
  // front of its queue; the scheduling discipline promises this never
  // happens (departure instants are non-decreasing along every queue).
  bool fifo_violation() const { return fifo_violation_; }

 private:
  struct Queued {
    traffic::Packet pkt;
    double depart_offset_s = 0.0;
    std::uint64_t seq = 0;  // scheduling order, for the FIFO check
  };
  struct Flying {
    double offset_s;  // arrival instant within the next slot
    traffic::Packet pkt;
  };

  int n_;
  std::uint64_t capacity_;
  double packet_bits_;
  long slot_ = 0;
  std::uint64_t next_packet_id_ = 0;
  std::vector<std::vector<Queued>> queues_;  // index 0 = front
  std::vector<std::vector<Flying>> carryover_;
  std::uint64_t created_total_ = 0;
  std::uint64_t delivered_total_ = 0;
  std::uint64_t lost_total_ = 0;
  bool fifo_violation_ = false;
};

}  // namespace thzmesh::testing

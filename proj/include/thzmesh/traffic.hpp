// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "thzmesh/network.hpp"

namespace thzmesh::traffic {

// Deliberately minimal (24 bytes): millions of packets flow through the
// relay tree every slot, so record width dominates the step time.  Delivery
// latency is the header arrival instant minus created_abs_s; nothing needs
// to be accumulated along the way.
struct Packet {
  std::uint64_t id = 0;
  int origin = -1;
  double created_abs_s = 0.0;  // absolute creation time
};

// A packet sitting in a relay queue, with its scheduled departure offset for
// the slot currently being processed (infinity = does not depart this slot).
struct QueuedPacket {
  Packet pkt;
  double depart_offset_s = std::numeric_limits<double>::infinity();
};

// Bounded FIFO relay queue.  Arrivals beyond the capacity are dropped and
// counted at this node.  Backed by a growable ring so that the push/pop
// storm of a busy slot touches no allocator.
class FifoBuffer {
 public:
  FifoBuffer() = default;
  explicit FifoBuffer(std::uint64_t capacity) : capacity_(capacity) {}

  std::uint64_t capacity() const { return capacity_; }
  std::uint64_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  bool full() const { return count_ >= capacity_; }
  std::uint64_t lost_total() const { return lost_; }

  void push(const QueuedPacket& p) {
    if (count_ == ring_.size()) grow();
    ring_[(head_ + count_) & mask_] = p;
    ++count_;
  }
  void count_loss() { ++lost_; }
  QueuedPacket& front() { return ring_[head_]; }
  const QueuedPacket& front() const { return ring_[head_]; }
  void pop_front() {
    head_ = (head_ + 1) & mask_;
    --count_;
  }
  // i-th entry counted from the front (0 = front).
  QueuedPacket& at(std::size_t i) { return ring_[(head_ + i) & mask_]; }
  const QueuedPacket& at(std::size_t i) const {
    return ring_[(head_ + i) & mask_];
  }

 private:
  void grow();

  std::vector<QueuedPacket> ring_;  // power-of-two length
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  std::size_t mask_ = 0;
  std::uint64_t capacity_ = 0;
  std::uint64_t lost_ = 0;
};

// Exact fractional Gaussian noise via the Durbin-Levinson (Hosking) recursion.
// All lockstep streams share one set of autoregression coefficients; each
// stream keeps its own history.  Time and memory are O(t) per advancing step,
// so long horizons stream without a T x T factorisation.
class FgnGenerator {
 public:
  FgnGenerator(double hurst, int num_streams);

  double hurst() const { return hurst_; }
  int num_streams() const { return num_streams_; }
  long step() const { return t_; }

  // Advance every stream by one step; out[s] receives stream s's sample.
  // Streams consume innovations in ascending stream order.
  void advance(std::mt19937_64& rng, std::span<double> out);

  // Deterministic single-stream variant used by the correctness harness: the
  // caller supplies the standard-normal innovations.
  void advance_with_innovations(std::span<const double> z, std::span<double> out);

  // Autocovariance of fGn increments at lag k for the configured Hurst index.
  static double autocovariance(double hurst, long lag);

 private:
  void extend_coefficients();

  double hurst_;
  int num_streams_;
  long t_ = 0;
  std::vector<double> phi_;       // AR coefficients of order t_
  double innovation_var_ = 1.0;
  std::vector<std::vector<double>> history_;  // per stream
};

// Self-similar arrival process: per slot the offered volume is
// max(0, mean_rate * dt + sigma * G_t) bits with G_t fractional Gaussian
// noise, packetised into floor(volume / packet_bits) packets at sorted
// uniform offsets within the slot.
class TrafficModel {
 public:
  TrafficModel(double mean_rate_bps, double hurst, double sigma_bits,
               double dt_s, double packet_bits, int num_streams);

  double mean_packets_per_slot() const;

  // Sorted in-slot arrival offsets for every stream this slot.  Streams with
  // zero mean rate yield no packets but still advance the noise process.
  std::vector<std::vector<double>> arrivals(std::mt19937_64& volume_rng,
                                            std::mt19937_64& offset_rng);

  // Allocation-free variant: out is resized to one entry per stream and the
  // inner vectors keep their capacity across slots.
  void arrivals_into(std::mt19937_64& volume_rng, std::mt19937_64& offset_rng,
                     std::vector<std::vector<double>>& out);

 private:
  void sort_offsets(std::vector<double>& offs);

  double mean_rate_bps_;
  double sigma_bits_;
  double dt_s_;
  double packet_bits_;
  int num_streams_;
  FgnGenerator fgn_;
  std::vector<double> noise_buf_;
  // Bucket-sort scratch: offsets are uniform over the slot, so a counting
  // pass plus a near-sorted insertion pass replaces the comparison sort.
  std::vector<std::uint32_t> bucket_counts_;
  std::vector<double> sort_tmp_;
};

// Per-slot accounting emitted by the transport engine.
struct SlotTrafficReport {
  long slot = 0;
  std::vector<std::uint64_t> generated;     // per UAV, created this slot
  std::vector<std::uint64_t> relayed_in;    // per UAV, packets received from links
  std::vector<std::uint64_t> delivered;     // per origin UAV, reached header this slot
  std::vector<std::uint64_t> lost;          // per UAV, dropped at this UAV's buffer
  std::uint64_t total_generated = 0;
  std::uint64_t total_delivered = 0;
  std::uint64_t total_lost = 0;
  std::uint64_t queued_after = 0;           // buffered + in flight at slot end
  double mean_delivery_latency_s = 0.0;     // 0 when nothing was delivered
  std::vector<double> delivered_latency_s;  // per delivered packet, arrival order
};

// Store-and-forward relay simulation at packet granularity.
//
// Within a slot every routed node serves its FIFO queue at the realised
// out-link rate: the k-th queued packet departs packet_bits * k / rate after
// the instant the queue position is established, provided that instant falls
// inside the slot.  Departed packets arrive at the next hop after the
// propagation delay and join its queue (or are delivered, if the next hop is
// the header).  Packets still in the air at the slot boundary are handed to
// the next slot.  Nodes without a route hold their queues.
class TransportEngine {
 public:
  TransportEngine(int n_uavs, std::uint64_t buffer_capacity, double packet_bits);

  // new_offsets: per UAV the sorted in-slot creation offsets for this slot.
  // out_rate_bps: per UAV the realised rate of its out-link (ignored for
  // nodes without a next hop).  The returned report lives inside the engine
  // and is overwritten by the next step; copy it to retain it.
  const SlotTrafficReport& step(const net::TopologySnapshot& topo,
                                std::span<const double> out_rate_bps,
                                const std::vector<std::vector<double>>& new_offsets,
                                double dt_s, int header_id);

  // When disabled, the report's per-packet delivered_latency_s list stays
  // empty (the mean is still maintained); at full load the list alone costs
  // tens of megabytes per slot.
  void set_latency_recording(bool on) { record_latency_ = on; }

  const FifoBuffer& buffer(int uav) const {
    return buffers_[static_cast<std::size_t>(uav)];
  }
  std::uint64_t queue_length(int uav) const {
    return buffers_[static_cast<std::size_t>(uav)].size();
  }
  // Conservation counters over the whole run.
  std::uint64_t created_total() const { return created_total_; }
  std::uint64_t delivered_total() const { return delivered_total_; }
  std::uint64_t lost_total() const { return lost_total_; }
  std::uint64_t queued_now() const;  // buffered + in flight

 private:
  struct InFlight {
    double arrival_offset_s;  // within the upcoming slot
    Packet pkt;
  };
  struct Arrival {
    double off;  // in-slot arrival instant
    Packet pkt;
  };

  int n_;
  double packet_bits_;
  long slot_ = 0;
  std::uint64_t next_packet_id_ = 0;
  bool record_latency_ = true;
  std::vector<FifoBuffer> buffers_;
  std::vector<std::vector<InFlight>> carryover_;  // per destination UAV
  std::uint64_t created_total_ = 0;
  std::uint64_t delivered_total_ = 0;
  std::uint64_t lost_total_ = 0;

  // Per-slot scratch, kept as members so their capacity survives across
  // slots; at full load a slot moves millions of packets and fresh
  // allocations would dominate the step time.
  SlotTrafficReport report_;
  std::vector<std::vector<Arrival>> generated_;
  std::vector<std::vector<Arrival>> flown_;
  std::vector<std::vector<Arrival>> relayed_;
  std::vector<std::vector<std::size_t>> relayed_cuts_;
  std::vector<std::vector<InFlight>> carry_next_;
  std::vector<Arrival> out_events_;
  std::vector<int> order_;
};

}  // namespace thzmesh::traffic

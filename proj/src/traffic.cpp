// SPDX-License-Identifier: Apache-2.0
#include "thzmesh/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "thzmesh/constants.hpp"

namespace thzmesh::traffic {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void FifoBuffer::grow() {
  const std::size_t next = ring_.empty() ? 1024 : ring_.size() * 2;
  std::vector<QueuedPacket> bigger(next);
  for (std::size_t i = 0; i < count_; ++i) {
    bigger[i] = ring_[(head_ + i) & mask_];
  }
  ring_ = std::move(bigger);
  head_ = 0;
  mask_ = next - 1;
}

// ---------------------------------------------------------------------------
// Fractional Gaussian noise
// ---------------------------------------------------------------------------

FgnGenerator::FgnGenerator(double hurst, int num_streams)
    : hurst_(hurst), num_streams_(num_streams) {
  require(hurst >= 0.5 && hurst < 1.0, "fgn: hurst must lie in [0.5, 1)");
  require(num_streams > 0, "fgn: need at least one stream");
  history_.resize(static_cast<std::size_t>(num_streams));
}

double FgnGenerator::autocovariance(double hurst, long lag) {
  if (lag < 0) lag = -lag;
  if (lag == 0) return 1.0;
  const double k = static_cast<double>(lag);
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) +
                std::pow(k - 1.0, h2));
}

void FgnGenerator::extend_coefficients() {
  // Durbin-Levinson: lift the order-(t-1) one-step predictor to order t.
  const long t = t_;
  double acc = autocovariance(hurst_, t);
  for (long j = 1; j < t; ++j) {
    acc -= phi_[static_cast<std::size_t>(j - 1)] * autocovariance(hurst_, t - j);
  }
  const double reflection = acc / innovation_var_;
  std::vector<double> next(static_cast<std::size_t>(t));
  for (long j = 1; j < t; ++j) {
    next[static_cast<std::size_t>(j - 1)] =
        phi_[static_cast<std::size_t>(j - 1)] -
        reflection * phi_[static_cast<std::size_t>(t - 1 - j)];
  }
  next[static_cast<std::size_t>(t - 1)] = reflection;
  phi_ = std::move(next);
  innovation_var_ *= 1.0 - reflection * reflection;
}

void FgnGenerator::advance(std::mt19937_64& rng, std::span<double> out) {
  require(static_cast<int>(out.size()) == num_streams_, "fgn: bad output span");
  if (t_ >= 1) extend_coefficients();
  const double sd = std::sqrt(innovation_var_);
  std::normal_distribution<double> z01(0.0, 1.0);
  for (int s = 0; s < num_streams_; ++s) {
    auto& h = history_[static_cast<std::size_t>(s)];
    double mean = 0.0;
    for (long j = 1; j <= t_; ++j) {
      mean += phi_[static_cast<std::size_t>(j - 1)] *
              h[static_cast<std::size_t>(t_ - j)];
    }
    const double x = mean + sd * z01(rng);
    h.push_back(x);
    out[static_cast<std::size_t>(s)] = x;
  }
  ++t_;
}

void FgnGenerator::advance_with_innovations(std::span<const double> z,
                                            std::span<double> out) {
  require(static_cast<int>(z.size()) == num_streams_ &&
              static_cast<int>(out.size()) == num_streams_,
          "fgn: bad span size");
  if (t_ >= 1) extend_coefficients();
  const double sd = std::sqrt(innovation_var_);
  for (int s = 0; s < num_streams_; ++s) {
    auto& h = history_[static_cast<std::size_t>(s)];
    double mean = 0.0;
    for (long j = 1; j <= t_; ++j) {
      mean += phi_[static_cast<std::size_t>(j - 1)] *
              h[static_cast<std::size_t>(t_ - j)];
    }
    const double x = mean + sd * z[static_cast<std::size_t>(s)];
    h.push_back(x);
    out[static_cast<std::size_t>(s)] = x;
  }
  ++t_;
}

// ---------------------------------------------------------------------------
// Arrival process
// ---------------------------------------------------------------------------

TrafficModel::TrafficModel(double mean_rate_bps, double hurst, double sigma_bits,
                           double dt_s, double packet_bits, int num_streams)
    : mean_rate_bps_(mean_rate_bps),
      sigma_bits_(sigma_bits),
      dt_s_(dt_s),
      packet_bits_(packet_bits),
      num_streams_(num_streams),
      fgn_(hurst, num_streams),
      noise_buf_(static_cast<std::size_t>(num_streams)) {
  require(mean_rate_bps >= 0.0, "traffic: mean rate must be non-negative");
  require(sigma_bits >= 0.0, "traffic: sigma must be non-negative");
  require(dt_s > 0.0, "traffic: dt must be positive");
  require(packet_bits > 0.0, "traffic: packet size must be positive");
}

double TrafficModel::mean_packets_per_slot() const {
  return mean_rate_bps_ * dt_s_ / packet_bits_;
}

std::vector<std::vector<double>> TrafficModel::arrivals(
    std::mt19937_64& volume_rng, std::mt19937_64& offset_rng) {
  std::vector<std::vector<double>> out;
  arrivals_into(volume_rng, offset_rng, out);
  return out;
}

void TrafficModel::arrivals_into(std::mt19937_64& volume_rng,
                                 std::mt19937_64& offset_rng,
                                 std::vector<std::vector<double>>& out) {
  fgn_.advance(volume_rng, noise_buf_);
  out.resize(static_cast<std::size_t>(num_streams_));
  std::uniform_real_distribution<double> u(0.0, dt_s_);
  for (int s = 0; s < num_streams_; ++s) {
    double volume =
        mean_rate_bps_ * dt_s_ + sigma_bits_ * noise_buf_[static_cast<std::size_t>(s)];
    if (volume < 0.0) volume = 0.0;
    const auto count = static_cast<std::uint64_t>(std::floor(volume / packet_bits_));
    auto& offs = out[static_cast<std::size_t>(s)];
    offs.resize(count);
    for (std::uint64_t k = 0; k < count; ++k) offs[k] = u(offset_rng);
    sort_offsets(offs);
  }
}

// Ascending sort identical in output to std::sort, but exploiting that the
// keys are uniform over [0, dt): a counting pass groups them into equal-width
// buckets, and one insertion pass fixes the (rare) inversions inside buckets.
void TrafficModel::sort_offsets(std::vector<double>& offs) {
  const std::size_t n = offs.size();
  if (n < 64) {
    std::sort(offs.begin(), offs.end());
    return;
  }
  const std::size_t nb = n;  // ~1 key per bucket on average
  const double scale = static_cast<double>(nb) / dt_s_;
  bucket_counts_.assign(nb + 1, 0);
  sort_tmp_.resize(n);
  auto bucket_of = [&](double v) {
    auto b = static_cast<std::size_t>(v * scale);
    return b >= nb ? nb - 1 : b;
  };
  for (double v : offs) ++bucket_counts_[bucket_of(v) + 1];
  for (std::size_t b = 1; b <= nb; ++b) bucket_counts_[b] += bucket_counts_[b - 1];
  for (double v : offs) sort_tmp_[bucket_counts_[bucket_of(v)]++] = v;
  // Bucket-ordered is nearly sorted; insertion sort is O(n + inversions).
  for (std::size_t i = 1; i < n; ++i) {
    const double v = sort_tmp_[i];
    std::size_t j = i;
    while (j > 0 && sort_tmp_[j - 1] > v) {
      sort_tmp_[j] = sort_tmp_[j - 1];
      --j;
    }
    sort_tmp_[j] = v;
  }
  std::copy(sort_tmp_.begin(), sort_tmp_.end(), offs.begin());
}

// ---------------------------------------------------------------------------
// Transport engine
// ---------------------------------------------------------------------------

namespace {

// Merge cursor over a sorted block of arrivals.
template <typename ArrivalT>
struct CursorT {
  const ArrivalT* it;
  const ArrivalT* end;
  bool link_borne;  // arrived over a link (relay or airborne carryover)
};

template <typename ArrivalT>
bool arrives_before(const ArrivalT& a, const ArrivalT& b) {
  if (a.off != b.off) return a.off < b.off;
  return a.pkt.id < b.pkt.id;
}

// Blocks are offset-sorted by construction; simultaneous entries (exact FP
// ties) are reordered by packet id so that every queue admits ties in a
// single global order.
template <typename ArrivalT>
void order_ties_by_id(std::vector<ArrivalT>& block) {
  std::size_t i = 0;
  while (i + 1 < block.size()) {
    if (block[i].off == block[i + 1].off) {
      std::size_t j = i + 1;
      while (j + 1 < block.size() && block[j + 1].off == block[i].off) ++j;
      std::sort(block.begin() + static_cast<std::ptrdiff_t>(i),
                block.begin() + static_cast<std::ptrdiff_t>(j + 1),
                [](const ArrivalT& a, const ArrivalT& b) { return a.pkt.id < b.pkt.id; });
      i = j + 1;
    } else {
      ++i;
    }
  }
}

}  // namespace

TransportEngine::TransportEngine(int n_uavs, std::uint64_t buffer_capacity,
                                 double packet_bits)
    : n_(n_uavs), packet_bits_(packet_bits) {
  require(n_uavs >= 2, "transport: need at least 2 UAVs");
  require(buffer_capacity > 0, "transport: buffer capacity must be positive");
  require(packet_bits > 0.0, "transport: packet size must be positive");
  buffers_.reserve(static_cast<std::size_t>(n_uavs));
  for (int i = 0; i < n_uavs; ++i) buffers_.emplace_back(buffer_capacity);
  const auto sn = static_cast<std::size_t>(n_uavs);
  carryover_.resize(sn);
  generated_.resize(sn);
  flown_.resize(sn);
  relayed_.resize(sn);
  relayed_cuts_.resize(sn);
  carry_next_.resize(sn);
  order_.resize(sn);
}

std::uint64_t TransportEngine::queued_now() const {
  std::uint64_t total = 0;
  for (const auto& b : buffers_) total += b.size();
  for (const auto& c : carryover_) total += c.size();
  return total;
}

const SlotTrafficReport& TransportEngine::step(
    const net::TopologySnapshot& topo, std::span<const double> out_rate_bps,
    const std::vector<std::vector<double>>& new_offsets, double dt_s,
    int header_id) {
  require(topo.n == n_, "transport: topology size mismatch");
  require(static_cast<int>(out_rate_bps.size()) == n_, "transport: rate span mismatch");
  require(static_cast<int>(new_offsets.size()) == n_, "transport: offsets size mismatch");
  require(dt_s > 0.0, "transport: dt must be positive");
  require(header_id >= 0 && header_id < n_, "transport: header id out of range");
  require(new_offsets[static_cast<std::size_t>(header_id)].empty(),
          "transport: the header must not generate traffic");

  const double slot_abs = static_cast<double>(slot_) * dt_s;

  SlotTrafficReport& report = report_;
  report.slot = slot_;
  report.generated.assign(static_cast<std::size_t>(n_), 0);
  report.relayed_in.assign(static_cast<std::size_t>(n_), 0);
  report.delivered.assign(static_cast<std::size_t>(n_), 0);
  report.lost.assign(static_cast<std::size_t>(n_), 0);
  report.total_generated = 0;
  report.total_delivered = 0;
  report.total_lost = 0;
  report.queued_after = 0;
  report.mean_delivery_latency_s = 0.0;
  report.delivered_latency_s.clear();

  // New packets of this slot, one offset-sorted block per UAV.  Ids grow with
  // the creation offset inside a UAV and with the UAV id across UAVs.
  auto& generated = generated_;
  for (int i = 0; i < n_; ++i) {
    const auto& offs = new_offsets[static_cast<std::size_t>(i)];
    auto& block = generated[static_cast<std::size_t>(i)];
    block.clear();
    block.reserve(offs.size());
    double prev = 0.0;
    for (double off : offs) {
      require(off >= 0.0 && off < dt_s, "transport: arrival offset outside slot");
      require(off >= prev, "transport: arrival offsets must be sorted");
      prev = off;
      Packet p;
      p.id = next_packet_id_++;
      p.origin = i;
      p.created_abs_s = slot_abs + off;
      block.push_back(Arrival{off, p});
    }
    report.generated[static_cast<std::size_t>(i)] = block.size();
    report.total_generated += block.size();
    created_total_ += block.size();
  }

  // Split the in-flight backlog into arrivals for this slot and residue that
  // stays airborne past the next boundary as well.
  auto& flown = flown_;
  auto& carry_next = carry_next_;
  for (int i = 0; i < n_; ++i) {
    flown[static_cast<std::size_t>(i)].clear();
    carry_next[static_cast<std::size_t>(i)].clear();
  }
  for (int i = 0; i < n_; ++i) {
    auto& inbound = carryover_[static_cast<std::size_t>(i)];
    std::sort(inbound.begin(), inbound.end(),
              [](const InFlight& a, const InFlight& b) {
                if (a.arrival_offset_s != b.arrival_offset_s)
                  return a.arrival_offset_s < b.arrival_offset_s;
                return a.pkt.id < b.pkt.id;
              });
    for (auto& f : inbound) {
      if (f.arrival_offset_s <= dt_s) {
        flown[static_cast<std::size_t>(i)].push_back(
            Arrival{f.arrival_offset_s, f.pkt});
      } else {
        carry_next[static_cast<std::size_t>(i)].push_back(
            InFlight{f.arrival_offset_s - dt_s, f.pkt});
      }
    }
    inbound.clear();
  }

  // Leaf-to-root sweep: every node is processed only after all nodes that
  // route into it, so relayed arrivals are complete before they are consumed.
  auto& order = order_;
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const int da = topo.routed(a) || a == header_id
                       ? topo.depth[static_cast<std::size_t>(a)]
                       : std::numeric_limits<int>::max();
    const int db = topo.routed(b) || b == header_id
                       ? topo.depth[static_cast<std::size_t>(b)]
                       : std::numeric_limits<int>::max();
    if (da != db) return da > db;
    return a < b;
  });

  auto& relayed = relayed_;
  // Block boundaries inside relayed[i]: one sorted segment per child.
  auto& relayed_cuts = relayed_cuts_;
  for (int i = 0; i < n_; ++i) {
    relayed[static_cast<std::size_t>(i)].clear();
    relayed_cuts[static_cast<std::size_t>(i)].clear();
  }

  auto& out_events = out_events_;  // per-node scratch, departure order
  double latency_sum = 0.0;        // delivered latencies, arrival order

  for (int i : order) {
    const std::size_t si = static_cast<std::size_t>(i);
    FifoBuffer& buf = buffers_[si];
    const bool is_header = (i == header_id);
    if (!is_header && topo.routed(i)) {
      require(out_rate_bps[si] >= 0.0 && std::isfinite(out_rate_bps[si]),
              "transport: link rate must be finite and non-negative");
    }
    const bool can_send =
        !is_header && topo.routed(i) && out_rate_bps[si] > 0.0;
    const double rate = can_send ? out_rate_bps[si] : 0.0;
    const int next = topo.routed(i) ? topo.next_hop[si] : -1;
    const double prop_s =
        next >= 0 ? topo.hop_distance_m[si] / constants::speed_of_light_m_s : 0.0;
    const double inf = std::numeric_limits<double>::infinity();

    // Schedule the backlog already waiting in the queue.  Position q departs
    // after q+1 full packet transmissions; beyond the slot nothing departs,
    // and FIFO order means nothing behind it can either.
    {
      const std::size_t backlog = buf.size();
      std::size_t q = 0;
      if (can_send) {
        for (; q < backlog; ++q) {
          const double t = packet_bits_ * static_cast<double>(q + 1) / rate;
          if (t > dt_s) break;
          buf.at(q).depart_offset_s = t;
        }
      }
      for (; q < backlog; ++q) buf.at(q).depart_offset_s = inf;
    }

    // Merge the sorted arrival blocks: flown-in backlog, fresh packets and one
    // segment per child relay.
    using Cursor = CursorT<Arrival>;
    std::vector<Cursor> cursors;
    auto add_block = [&cursors](const std::vector<Arrival>& block, std::size_t lo,
                                std::size_t hi, bool link_borne) {
      if (hi > lo)
        cursors.push_back(Cursor{block.data() + lo, block.data() + hi, link_borne});
    };
    add_block(flown[si], 0, flown[si].size(), true);
    add_block(generated[si], 0, generated[si].size(), false);
    {
      const auto& cuts = relayed_cuts[si];
      std::size_t lo = 0;
      for (std::size_t cut : cuts) {
        add_block(relayed[si], lo, cut, true);
        lo = cut;
      }
    }

    out_events.clear();

    auto finalize_departure = [&](const QueuedPacket& entry) {
      out_events.push_back(
          Arrival{entry.depart_offset_s + prop_s, entry.pkt});
    };

    while (!cursors.empty()) {
      // Pick the earliest (offset, id) arrival across the open blocks.
      std::size_t best = 0;
      for (std::size_t c = 1; c < cursors.size(); ++c) {
        if (arrives_before(*cursors[c].it, *cursors[best].it)) best = c;
      }
      const Arrival& a = *cursors[best].it;
      const double t = a.off;

      if (is_header) {
        // The header sinks every packet at its arrival instant; the delivery
        // latency is that instant minus the creation instant.
        const double latency = (slot_abs + t) - a.pkt.created_abs_s;
        report.relayed_in[si] += 1;
        report.delivered[static_cast<std::size_t>(a.pkt.origin)] += 1;
        report.total_delivered += 1;
        latency_sum += latency;
        if (record_latency_) report.delivered_latency_s.push_back(latency);
        delivered_total_ += 1;
      } else {
        // Serve everyone whose departure precedes (or meets) this arrival.
        while (!buf.empty() && buf.front().depart_offset_s <= t) {
          finalize_departure(buf.front());
          buf.pop_front();
        }
        if (cursors[best].link_borne) report.relayed_in[si] += 1;
        if (buf.full()) {
          buf.count_loss();
          report.lost[si] += 1;
          report.total_lost += 1;
          lost_total_ += 1;
        } else {
          QueuedPacket entry;
          entry.pkt = a.pkt;
          entry.depart_offset_s = inf;
          if (can_send) {
            const double pos = static_cast<double>(buf.size() + 1);
            const double dep = t + packet_bits_ * pos / rate;
            if (dep <= dt_s) entry.depart_offset_s = dep;
          }
          buf.push(entry);
        }
      }

      if (++cursors[best].it == cursors[best].end) {
        cursors.erase(cursors.begin() + static_cast<std::ptrdiff_t>(best));
      }
    }

    if (!is_header) {
      // Flush departures scheduled after the last arrival.
      while (!buf.empty() && buf.front().depart_offset_s <= dt_s) {
        finalize_departure(buf.front());
        buf.pop_front();
      }
    }

    // Hand the departures to the next hop: inside the slot as a sorted relay
    // segment, across the boundary as airborne carryover.
    if (!out_events.empty()) {
      order_ties_by_id(out_events);
      const std::size_t sn = static_cast<std::size_t>(next);
      relayed[sn].reserve(relayed[sn].size() + out_events.size());
      for (const Arrival& ev : out_events) {
        if (ev.off <= dt_s) {
          relayed[sn].push_back(ev);
        } else {
          carry_next[sn].push_back(InFlight{ev.off - dt_s, ev.pkt});
        }
      }
      if (!relayed[sn].empty()) {
        if (relayed_cuts[sn].empty() ||
            relayed_cuts[sn].back() != relayed[sn].size()) {
          relayed_cuts[sn].push_back(relayed[sn].size());
        }
      }
    }
  }

  std::swap(carryover_, carry_next_);
  ++slot_;

  report.queued_after = queued_now();
  if (report.total_delivered > 0) {
    report.mean_delivery_latency_s =
        latency_sum / static_cast<double>(report.total_delivered);
  }
  return report;
}

}  // namespace thzmesh::traffic

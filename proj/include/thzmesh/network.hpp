// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace thzmesh::net {

struct UavNode {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double vx = 0.0;  // realised velocity over the last slot (m/s)
  double vy = 0.0;
  bool is_header = false;
};

// The swarm plus the mission volume it is confined to.
struct Fleet {
  std::vector<UavNode> nodes;
  int header_id = -1;
  double region_x = 0.0;  // x in [0, region_x]
  double region_y = 0.0;  // y in [0, region_y]
  double v_max = 0.0;

  int size() const { return static_cast<int>(nodes.size()); }
  void validate() const;
};

// Connectivity, routing tree and link geometry for one slot.
struct TopologySnapshot {
  long slot = 0;
  int n = 0;
  std::vector<std::uint8_t> adjacency;      // n*n, range-gated connectivity
  std::vector<double> distance_m;           // n*n pairwise 3-D distance
  std::vector<int> next_hop;                // per node; -1 = none (header / isolated)
  std::vector<double> hop_distance_m;       // distance to next hop; 0 when none
  std::vector<int> depth;                   // hops to header along the tree; -1 unreachable
  std::vector<std::vector<int>> in_links;   // nodes routing into this one, ascending id

  bool routed(int i) const { return next_hop[static_cast<std::size_t>(i)] >= 0; }
  std::uint8_t adj(int i, int j) const {
    return adjacency[static_cast<std::size_t>(i) * n + j];
  }
  double dist(int i, int j) const {
    return distance_m[static_cast<std::size_t>(i) * n + j];
  }
};

// Uniformly scatter n UAVs over the region at the given altitude and pick the
// header uniformly at random.
Fleet spawn_fleet(int n, double region_x, double region_y, double altitude_m,
                  double v_max, std::mt19937_64& rng);

// One slot of the random-waypoint motion: per UAV an independent speed
// u ~ U[0, v_max] and heading ~ U[0, 2 pi); positions reflect off the region
// boundary.  Stored velocities are the realised displacement / dt.
void step_mobility(Fleet& fleet, double dt_s, std::mt19937_64& rng);

// Links exist between distinct UAVs within comm_range_m (3-D distance).
std::vector<std::uint8_t> build_adjacency(const Fleet& fleet, double comm_range_m);

// Shortest paths toward the header under edge cost
//   hop_weight + loss_weight * (d / comm_range_m)^2.
// Equal-cost ties prefer the smaller node id.  Returns the parent (next hop
// toward the header) per node, -1 for the header and unreachable nodes.
std::vector<int> route_to_header(const std::vector<std::uint8_t>& adjacency,
                                 const std::vector<double>& distance_m, int n,
                                 int header_id, double comm_range_m,
                                 double hop_weight, double loss_weight);

TopologySnapshot snapshot(const Fleet& fleet, double comm_range_m,
                          double hop_weight, double loss_weight, long slot);

}  // namespace thzmesh::net

// SPDX-License-Identifier: Apache-2.0
#include "thzmesh/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "thzmesh/constants.hpp"

namespace thzmesh::net {

namespace {

// Fold a coordinate back into [0, limit] by mirror reflection.
double reflect(double p, double limit) {
  if (limit <= 0.0) throw std::invalid_argument("mobility: region must be positive");
  while (p < 0.0 || p > limit) {
    if (p < 0.0) p = -p;
    if (p > limit) p = 2.0 * limit - p;
  }
  return p;
}

}  // namespace

void Fleet::validate() const {
  if (nodes.empty()) throw std::invalid_argument("fleet: empty");
  if (header_id < 0 || header_id >= size())
    throw std::invalid_argument("fleet: header_id out of range");
  if (region_x <= 0.0 || region_y <= 0.0)
    throw std::invalid_argument("fleet: region must be positive");
  if (v_max < 0.0) throw std::invalid_argument("fleet: v_max must be non-negative");
  for (int i = 0; i < size(); ++i) {
    const UavNode& u = nodes[static_cast<std::size_t>(i)];
    if (u.id != i) throw std::invalid_argument("fleet: ids must be 0..n-1 in order");
    if (u.x < 0.0 || u.x > region_x || u.y < 0.0 || u.y > region_y)
      throw std::invalid_argument("fleet: node outside region");
    if (u.is_header != (i == header_id))
      throw std::invalid_argument("fleet: header flag inconsistent");
  }
}

Fleet spawn_fleet(int n, double region_x, double region_y, double altitude_m,
                  double v_max, std::mt19937_64& rng) {
  if (n < 2) throw std::invalid_argument("fleet: need at least 2 UAVs");
  Fleet fleet;
  fleet.region_x = region_x;
  fleet.region_y = region_y;
  fleet.v_max = v_max;
  std::uniform_real_distribution<double> ux(0.0, region_x);
  std::uniform_real_distribution<double> uy(0.0, region_y);
  fleet.nodes.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    UavNode& u = fleet.nodes[static_cast<std::size_t>(i)];
    u.id = i;
    u.x = ux(rng);
    u.y = uy(rng);
    u.z = altitude_m;
  }
  std::uniform_int_distribution<int> pick(0, n - 1);
  fleet.header_id = pick(rng);
  fleet.nodes[static_cast<std::size_t>(fleet.header_id)].is_header = true;
  fleet.validate();
  return fleet;
}

void step_mobility(Fleet& fleet, double dt_s, std::mt19937_64& rng) {
  if (dt_s <= 0.0) throw std::invalid_argument("mobility: dt must be positive");
  std::uniform_real_distribution<double> speed(0.0, fleet.v_max);
  std::uniform_real_distribution<double> heading(0.0, 2.0 * constants::pi);
  for (UavNode& u : fleet.nodes) {
    const double s = speed(rng);
    const double h = heading(rng);
    const double nx = reflect(u.x + s * std::cos(h) * dt_s, fleet.region_x);
    const double ny = reflect(u.y + s * std::sin(h) * dt_s, fleet.region_y);
    u.vx = (nx - u.x) / dt_s;
    u.vy = (ny - u.y) / dt_s;
    u.x = nx;
    u.y = ny;
  }
}

std::vector<std::uint8_t> build_adjacency(const Fleet& fleet, double comm_range_m) {
  if (comm_range_m <= 0.0)
    throw std::invalid_argument("adjacency: comm range must be positive");
  const int n = fleet.size();
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const UavNode& a = fleet.nodes[static_cast<std::size_t>(i)];
      const UavNode& b = fleet.nodes[static_cast<std::size_t>(j)];
      const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
      const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
      if (d <= comm_range_m) {
        adj[static_cast<std::size_t>(i) * n + j] = 1;
        adj[static_cast<std::size_t>(j) * n + i] = 1;
      }
    }
  }
  return adj;
}

std::vector<int> route_to_header(const std::vector<std::uint8_t>& adjacency,
                                 const std::vector<double>& distance_m, int n,
                                 int header_id, double comm_range_m,
                                 double hop_weight, double loss_weight) {
  if (n <= 0 || header_id < 0 || header_id >= n)
    throw std::invalid_argument("route: bad node count or header id");
  if (adjacency.size() != static_cast<std::size_t>(n) * n ||
      distance_m.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("route: matrix size mismatch");

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(static_cast<std::size_t>(n), inf);
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  cost[static_cast<std::size_t>(header_id)] = 0.0;

  // Dijkstra from the header; ties broken toward the smaller node id both in
  // extraction order and when relaxing equal-cost paths.
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.emplace(0.0, header_id);
  while (!heap.empty()) {
    auto [c, u] = heap.top();
    heap.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = 1;
    for (int v = 0; v < n; ++v) {
      if (v == u || !adjacency[static_cast<std::size_t>(u) * n + v]) continue;
      const double d = distance_m[static_cast<std::size_t>(u) * n + v];
      const double ratio = d / comm_range_m;
      const double edge = hop_weight + loss_weight * ratio * ratio;
      const double nc = c + edge;
      std::size_t vi = static_cast<std::size_t>(v);
      if (nc < cost[vi] || (nc == cost[vi] && parent[vi] >= 0 && u < parent[vi])) {
        cost[vi] = nc;
        parent[vi] = u;
        heap.emplace(nc, v);
      }
    }
  }
  parent[static_cast<std::size_t>(header_id)] = -1;
  return parent;
}

TopologySnapshot snapshot(const Fleet& fleet, double comm_range_m,
                          double hop_weight, double loss_weight, long slot) {
  fleet.validate();
  const int n = fleet.size();
  TopologySnapshot topo;
  topo.slot = slot;
  topo.n = n;
  topo.distance_m.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const UavNode& a = fleet.nodes[static_cast<std::size_t>(i)];
      const UavNode& b = fleet.nodes[static_cast<std::size_t>(j)];
      const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
      topo.distance_m[static_cast<std::size_t>(i) * n + j] =
          std::sqrt(dx * dx + dy * dy + dz * dz);
    }
  }
  topo.adjacency = build_adjacency(fleet, comm_range_m);
  topo.next_hop = route_to_header(topo.adjacency, topo.distance_m, n,
                                  fleet.header_id, comm_range_m, hop_weight,
                                  loss_weight);

  topo.hop_distance_m.assign(static_cast<std::size_t>(n), 0.0);
  topo.in_links.assign(static_cast<std::size_t>(n), {});
  topo.depth.assign(static_cast<std::size_t>(n), -1);
  topo.depth[static_cast<std::size_t>(fleet.header_id)] = 0;
  for (int i = 0; i < n; ++i) {
    const int p = topo.next_hop[static_cast<std::size_t>(i)];
    if (p >= 0) {
      topo.hop_distance_m[static_cast<std::size_t>(i)] = topo.dist(i, p);
      topo.in_links[static_cast<std::size_t>(p)].push_back(i);  // ascending by loop order
    }
  }
  // Tree depths; the parent pointers form a forest rooted at the header.
  for (int i = 0; i < n; ++i) {
    if (topo.depth[static_cast<std::size_t>(i)] >= 0) continue;
    int hops = 0;
    int cur = i;
    while (cur >= 0 && topo.depth[static_cast<std::size_t>(cur)] < 0 && hops <= n) {
      cur = topo.next_hop[static_cast<std::size_t>(cur)];
      ++hops;
    }
    if (cur < 0 || topo.depth[static_cast<std::size_t>(cur)] < 0) continue;  // unreachable
    int base = topo.depth[static_cast<std::size_t>(cur)];
    cur = i;
    std::vector<int> chain;
    while (topo.depth[static_cast<std::size_t>(cur)] < 0) {
      chain.push_back(cur);
      cur = topo.next_hop[static_cast<std::size_t>(cur)];
    }
    for (std::size_t k = 0; k < chain.size(); ++k) {
      topo.depth[static_cast<std::size_t>(chain[k])] =
          base + static_cast<int>(chain.size() - k);
    }
  }
  return topo;
}

}  // namespace thzmesh::net

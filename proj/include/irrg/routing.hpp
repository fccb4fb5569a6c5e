#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "irrg/benchmark.hpp"
#include "irrg/common.hpp"

namespace irrg::routing {

struct Link {
  std::size_t id = 0;
  std::size_t a = 0, b = 0;  // undirected endpoints
  double capacity = 1.0;
};

struct Network {
  std::size_t nodes = 0;
  std::vector<Link> links;  // links[i].id == i

  void validate() const {
    for (std::size_t i = 0; i < links.size(); ++i) {
      const auto& l = links[i];
      if (l.id != i) throw ValidationError("link ids must be 0..L-1 in order");
      if (l.a >= nodes || l.b >= nodes || l.a == l.b)
        throw ValidationError("link " + std::to_string(i) + " has invalid endpoints");
      if (!(l.capacity > 0.0)) throw ValidationError("link " + std::to_string(i) + " needs positive capacity");
    }
  }

  std::size_t other_end(std::size_t link, std::size_t node) const {
    const auto& l = links[link];
    if (l.a == node) return l.b;
    if (l.b == node) return l.a;
    throw ValidationError("link " + std::to_string(link) + " does not touch node " + std::to_string(node));
  }
};

using Path = std::vector<std::size_t>;  // link ids from src to dst

struct Demand {
  std::size_t src = 0, dst = 0;
  double volume = 0.0;
  std::vector<Path> paths;
};

/// Node sequence of a link path starting at `src`; throws when the links do
/// not chain or revisit a node.
inline std::vector<std::size_t> path_nodes(const Network& net, std::size_t src, const Path& p) {
  std::vector<std::size_t> nodes{src};
  std::vector<std::uint8_t> seen(net.nodes, 0);
  seen[src] = 1;
  for (std::size_t e : p) {
    if (e >= net.links.size()) throw ValidationError("path refers to unknown link");
    const std::size_t next = net.other_end(e, nodes.back());
    if (seen[next]) throw ValidationError("path is not simple");
    seen[next] = 1;
    nodes.push_back(next);
  }
  return nodes;
}

struct RoutingInstance {
  Network network;
  std::vector<Demand> demands;

  std::size_t dimension() const {
    std::size_t d = 0;
    for (const auto& dm : demands) d += dm.paths.size() - 1;
    return d;
  }

  void validate() const {
    network.validate();
    for (std::size_t i = 0; i < demands.size(); ++i) {
      const auto& d = demands[i];
      if (d.src >= network.nodes || d.dst >= network.nodes || d.src == d.dst)
        throw ValidationError("demand " + std::to_string(i) + " has invalid endpoints");
      if (!(d.volume >= 0.0)) throw ValidationError("demand " + std::to_string(i) + " has negative volume");
      if (d.paths.empty()) throw ValidationError("demand " + std::to_string(i) + " has no paths");
      for (const auto& p : d.paths)
        if (p.empty() || path_nodes(network, d.src, p).back() != d.dst)
          throw ValidationError("demand " + std::to_string(i) + " has a path not ending at its destination");
    }
  }
};

/// Fractions for one demand: variables are visited in ascending order of z
/// (ties by index); the first takes z directly, each later one takes its z
/// share of what is left, and the final path receives the remainder.
inline Vector decode_fractions(std::span<const double> z) {
  for (double v : z)
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("encoded fractions must lie in [0,1]");
  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });
  Vector x(z.size() + 1, 0.0);
  double assigned = 0.0;
  for (std::size_t p : order) {
    x[p] = (1.0 - assigned) * z[p];
    assigned += x[p];
  }
  x.back() = std::max(0.0, 1.0 - assigned);
  return x;
}

/// Link loads for an encoded solution.
inline Vector link_flows(const RoutingInstance& inst, std::span<const double> z) {
  if (z.size() != inst.dimension())
    throw ValidationError("expected " + std::to_string(inst.dimension()) + " variables, got " +
                          std::to_string(z.size()));
  Vector flow(inst.network.links.size(), 0.0);
  std::size_t offset = 0;
  for (const auto& d : inst.demands) {
    const std::size_t k = d.paths.size() - 1;
    const Vector x = decode_fractions(z.subspan(offset, k));
    offset += k;
    for (std::size_t p = 0; p < d.paths.size(); ++p)
      for (std::size_t e : d.paths[p]) flow[e] += x[p] * d.volume;
  }
  return flow;
}

/// Sum over links of f_e / (c_e - f_e); +inf once any link is saturated.
inline double evaluate_delay(const RoutingInstance& inst, std::span<const double> z) {
  const Vector flow = link_flows(inst, z);
  double total = 0.0;
  for (std::size_t e = 0; e < flow.size(); ++e) {
    const double c = inst.network.links[e].capacity;
    if (flow[e] >= c) return std::numeric_limits<double>::infinity();
    total += flow[e] / (c - flow[e]);
  }
  return total;
}

/// Four nodes, five links, two demands with two paths each. `c3` is the
/// capacity of the link shared by both demands' second paths.
inline RoutingInstance four_node_example(double c3 = 5000.0) {
  RoutingInstance r;
  r.network.nodes = 4;
  r.network.links = {{0, 0, 1, 115.0}, {1, 0, 2, 120.0}, {2, 1, 2, c3}, {3, 1, 3, 130.0}, {4, 2, 3, 125.0}};
  r.demands = {{0, 2, 100.0, {{1}, {0, 2}}}, {1, 3, 110.0, {{3}, {2, 4}}}};
  return r;
}

// --- candidate paths ----------------------------------------------------------------

namespace detail {

struct PathOrder {
  bool operator()(const Path& a, const Path& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

// Fewest-hop path from src to dst avoiding blocked nodes and links; among
// equal hop counts the lexicographically smallest link sequence.
inline std::optional<Path> shortest_path(const Network& net,
                                         const std::vector<std::vector<std::size_t>>& adj,
                                         std::size_t src, std::size_t dst,
                                         const std::vector<std::uint8_t>& node_blocked,
                                         const std::vector<std::uint8_t>& link_blocked) {
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(net.nodes, inf);
  std::deque<std::size_t> q{dst};
  dist[dst] = 0;
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop_front();
    for (std::size_t e : adj[u]) {
      if (link_blocked[e]) continue;
      const std::size_t v = net.other_end(e, u);
      if (node_blocked[v] && v != src) continue;
      if (dist[v] == inf) {
        dist[v] = dist[u] + 1;
        q.push_back(v);
      }
    }
  }
  if (dist[src] == inf) return std::nullopt;
  Path p;
  std::size_t u = src;
  while (u != dst) {
    std::size_t pick = inf;
    for (std::size_t e : adj[u]) {  // adjacency lists are sorted by link id
      if (link_blocked[e]) continue;
      const std::size_t v = net.other_end(e, u);
      if (node_blocked[v]) continue;
      if (dist[v] != inf && dist[v] + 1 == dist[u]) {
        pick = e;
        break;
      }
    }
    p.push_back(pick);
    u = net.other_end(pick, u);
  }
  return p;
}

}  // namespace detail

/// The k fewest-hop loopless paths (Yen's algorithm), ties ordered by link ids.
inline std::vector<Path> k_shortest_paths(const Network& net, std::size_t src, std::size_t dst, std::size_t k) {
  net.validate();
  if (src >= net.nodes || dst >= net.nodes || src == dst) throw ValidationError("invalid path endpoints");
  std::vector<std::vector<std::size_t>> adj(net.nodes);
  for (const auto& l : net.links) {
    adj[l.a].push_back(l.id);
    adj[l.b].push_back(l.id);
  }
  std::vector<std::uint8_t> no_nodes(net.nodes, 0), no_links(net.links.size(), 0);
  std::vector<Path> found;
  auto first = detail::shortest_path(net, adj, src, dst, no_nodes, no_links);
  if (!first || k == 0) return found;
  found.push_back(*first);
  std::set<Path, detail::PathOrder> candidates;
  while (found.size() < k) {
    const Path& last = found.back();
    const auto nodes = path_nodes(net, src, last);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const Path root(last.begin(), last.begin() + static_cast<std::ptrdiff_t>(i));
      std::vector<std::uint8_t> node_blocked(net.nodes, 0), link_blocked(net.links.size(), 0);
      for (const auto& p : found)
        if (p.size() > i && std::equal(root.begin(), root.end(), p.begin())) link_blocked[p[i]] = 1;
      for (std::size_t j = 0; j < i; ++j) node_blocked[nodes[j]] = 1;
      auto spur = detail::shortest_path(net, adj, nodes[i], dst, node_blocked, link_blocked);
      if (!spur) continue;
      Path total = root;
      total.insert(total.end(), spur->begin(), spur->end());
      candidates.insert(std::move(total));
    }
    // Skip candidates that were already accepted.
    while (!candidates.empty() && std::find(found.begin(), found.end(), *candidates.begin()) != found.end())
      candidates.erase(candidates.begin());
    if (candidates.empty()) break;
    found.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return found;
}

// --- instance generation ---------------------------------------------------------------

struct GeneratorConfig {
  std::size_t nodes = 20;
  std::size_t links = 40;
  std::size_t demand_count = 10;
  std::size_t paths_per_demand = 4;
  double capacity_lo = 1e6, capacity_hi = 5e8;
  double volume_lo = 1e5, volume_hi = 1e7;
  std::uint64_t seed = 1;

  void validate() const {
    if (nodes < 2) throw ValidationError("need at least two nodes");
    if (links < nodes - 1) throw ValidationError("too few links for a connected graph");
    if (links > nodes * (nodes - 1) / 2) throw ValidationError("too many links for a simple graph");
    if (paths_per_demand < 2) throw ValidationError("paths_per_demand must be at least 2");
    if (!(capacity_lo > 0.0 && capacity_lo <= capacity_hi)) throw ValidationError("invalid capacity range");
    if (!(volume_lo >= 0.0 && volume_lo <= volume_hi)) throw ValidationError("invalid volume range");
    if (demand_count > nodes * (nodes - 1) / 2) throw ValidationError("more demands than node pairs");
  }
};

/// Random connected graph: a random spanning tree plus uniformly chosen
/// extra links. Link ids follow creation order.
inline Network random_network(std::size_t nodes, std::size_t links, double cap_lo, double cap_hi, Rng& rng) {
  Network net;
  net.nodes = nodes;
  std::vector<std::size_t> order = iota_set(nodes);
  shuffle_in_place(order, rng);
  std::set<std::pair<std::size_t, std::size_t>> used;
  auto add = [&](std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    used.insert({a, b});
    net.links.push_back({net.links.size(), a, b, uniform(rng, cap_lo, cap_hi)});
  };
  for (std::size_t i = 1; i < nodes; ++i) add(order[i], order[uniform_index(rng, i)]);
  std::vector<std::pair<std::size_t, std::size_t>> free_pairs;
  for (std::size_t a = 0; a < nodes; ++a)
    for (std::size_t b = a + 1; b < nodes; ++b)
      if (!used.count({a, b})) free_pairs.push_back({a, b});
  shuffle_in_place(free_pairs, rng);
  for (std::size_t i = 0; net.links.size() < links; ++i) add(free_pairs[i].first, free_pairs[i].second);
  return net;
}

inline RoutingInstance generate_instance(const GeneratorConfig& config) {
  config.validate();
  Rng rng(config.seed);
  RoutingInstance inst;
  inst.network = random_network(config.nodes, config.links, config.capacity_lo, config.capacity_hi, rng);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < config.nodes; ++a)
    for (std::size_t b = a + 1; b < config.nodes; ++b) pairs.push_back({a, b});
  shuffle_in_place(pairs, rng);
  for (std::size_t i = 0; i < config.demand_count; ++i) {
    Demand d;
    d.src = pairs[i].first;
    d.dst = pairs[i].second;
    if (uniform01(rng) < 0.5) std::swap(d.src, d.dst);
    d.volume = uniform(rng, config.volume_lo, config.volume_hi);
    d.paths = k_shortest_paths(inst.network, d.src, d.dst, config.paths_per_demand);
    if (d.paths.size() < config.paths_per_demand)
      throw GenerationError("demand " + std::to_string(i) + " (" + std::to_string(d.src) + " -> " +
                            std::to_string(d.dst) + ") has only " + std::to_string(d.paths.size()) +
                            " simple paths");
    inst.demands.push_back(std::move(d));
  }
  return inst;
}

// --- serialization and problem view -------------------------------------------------------

inline nlohmann::json to_json(const RoutingInstance& r) {
  nlohmann::json links = nlohmann::json::array();
  for (const auto& l : r.network.links)
    links.push_back({{"id", l.id}, {"endpoints", {l.a, l.b}}, {"capacity", l.capacity}});
  nlohmann::json demands = nlohmann::json::array();
  for (const auto& d : r.demands)
    demands.push_back({{"src", d.src}, {"dst", d.dst}, {"volume", d.volume}, {"paths", d.paths}});
  return {{"nodes", r.network.nodes}, {"links", links}, {"demands", demands}};
}

inline RoutingInstance from_json(const nlohmann::json& j) {
  RoutingInstance r;
  try {
    r.network.nodes = j.at("nodes").get<std::size_t>();
    for (const auto& l : j.at("links")) {
      const auto ends = l.at("endpoints").get<std::vector<std::size_t>>();
      if (ends.size() != 2) throw ConfigError("a link needs exactly two endpoints");
      r.network.links.push_back({l.at("id").get<std::size_t>(), ends[0], ends[1], l.at("capacity").get<double>()});
    }
    std::sort(r.network.links.begin(), r.network.links.end(),
              [](const Link& a, const Link& b) { return a.id < b.id; });
    for (const auto& d : j.at("demands"))
      r.demands.push_back({d.at("src").get<std::size_t>(), d.at("dst").get<std::size_t>(),
                           d.at("volume").get<double>(), d.at("paths").get<std::vector<Path>>()});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed routing instance: ") + e.what());
  }
  r.validate();
  return r;
}

/// Black-box view over [0,1]^dimension without structural ground truth.
inline ProblemInstance as_problem(RoutingInstance inst, std::string name = "routing") {
  inst.validate();
  const std::size_t n = inst.dimension();
  if (n == 0) throw ValidationError("routing instance has no decision variables");
  auto shared = std::make_shared<const RoutingInstance>(std::move(inst));
  return ProblemInstance(std::move(name), uniform_bounds(n, 0.0, 1.0),
                         [shared](std::span<const double> z) { return evaluate_delay(*shared, z); });
}

}  // namespace irrg::routing

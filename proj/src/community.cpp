#include "ctwalks/community.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace ctwalks {

std::vector<std::vector<NodeId>> CommunityPartition::members() const {
  std::vector<std::vector<NodeId>> out(k);
  for (NodeId n = 0; n < assignment.size(); ++n) {
    if (assignment[n] != kUnassigned) out.at(assignment[n]).push_back(n);
  }
  return out;
}

double modularity(const WeightedTemporalGraph& graph, std::span<const CommunityId> assignment) {
  const double two_m = 2.0 * static_cast<double>(graph.total_weight());
  if (two_m <= 0) throw std::invalid_argument("modularity undefined for an edgeless graph");
  std::map<CommunityId, double> in;
  std::map<CommunityId, double> tot;
  for (NodeId n : graph.nodes()) {
    if (n >= assignment.size() || assignment[n] == kUnassigned) {
      throw std::invalid_argument("node " + std::to_string(n) + " has no community assignment");
    }
    const CommunityId c = assignment[n];
    tot[c] += static_cast<double>(graph.degree(n));
    for (const auto& nb : graph.neighbors(n)) {
      if (assignment[nb.node] == c) in[c] += static_cast<double>(nb.weight) * (nb.node == n ? 2.0 : 1.0);
    }
  }
  double q = 0.0;
  for (const auto& [c, total] : tot) {
    const double frac = total / two_m;
    q += in[c] / two_m - frac * frac;
  }
  return q;
}

namespace {

/// One aggregation level: symmetric weights with self loops holding twice the
/// internal weight so that degree(i) = sum_j A_ij.
struct LevelGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> self_loop;
  std::vector<double> degree;
  double two_m = 0.0;

  std::size_t size() const { return adj.size(); }
};

double level_modularity(const LevelGraph& g, const std::vector<std::uint32_t>& comm) {
  std::vector<double> in(g.size(), 0.0);
  std::vector<double> tot(g.size(), 0.0);
  for (std::uint32_t i = 0; i < g.size(); ++i) {
    tot[comm[i]] += g.degree[i];
    in[comm[i]] += g.self_loop[i];
    for (const auto& [j, w] : g.adj[i]) {
      if (comm[j] == comm[i]) in[comm[i]] += w;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (tot[c] > 0) q += in[c] / g.two_m - (tot[c] / g.two_m) * (tot[c] / g.two_m);
  }
  return q;
}

/// Local-move phase. Returns true if any node changed community.
bool local_moves(const LevelGraph& g, std::vector<std::uint32_t>& comm, SplitMix64& rng, double min_gain) {
  const std::size_t n = g.size();
  std::vector<double> tot(n, 0.0);
  for (std::uint32_t i = 0; i < n; ++i) tot[comm[i]] += g.degree[i];

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  std::vector<double> link_weight(n, -1.0);
  std::vector<std::uint32_t> touched;
  bool any_move = false;
  double q = level_modularity(g, comm);
  for (;;) {
    std::size_t moves = 0;
    for (std::uint32_t node : order) {
      const std::uint32_t own = comm[node];
      const double k_i = g.degree[node];

      touched.clear();
      link_weight[own] = 0.0;
      touched.push_back(own);
      for (const auto& [j, w] : g.adj[node]) {
        const std::uint32_t c = comm[j];
        if (link_weight[c] < 0) {
          link_weight[c] = 0.0;
          touched.push_back(c);
        }
        link_weight[c] += w;
      }

      tot[own] -= k_i;
      // Gain of inserting `node` into c, up to terms shared by all candidates:
      // k_{i,c} - tot_c * k_i / 2m.
      auto gain = [&](std::uint32_t c) { return link_weight[c] - tot[c] * k_i / g.two_m; };
      std::uint32_t best = own;
      double best_gain = gain(own);
      for (std::uint32_t c : touched) {
        const double gc = gain(c);
        if (gc > best_gain) {
          best_gain = gc;
          best = c;
        }
      }
      tot[best] += k_i;
      if (best != own) {
        comm[node] = best;
        ++moves;
      }
      for (std::uint32_t c : touched) link_weight[c] = -1.0;
    }
    if (moves == 0) break;
    any_move = true;
    const double new_q = level_modularity(g, comm);
    const double improvement = new_q - q;
    q = new_q;
    if (improvement < min_gain) break;
  }
  return any_move;
}

/// Renumber community ids densely in order of first occurrence.
std::size_t renumber(std::vector<std::uint32_t>& comm) {
  std::vector<std::uint32_t> remap(comm.size(), std::numeric_limits<std::uint32_t>::max());
  std::uint32_t next = 0;
  for (auto& c : comm) {
    if (remap[c] == std::numeric_limits<std::uint32_t>::max()) remap[c] = next++;
    c = remap[c];
  }
  return next;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::uint32_t>& comm, std::size_t k) {
  LevelGraph out;
  out.adj.resize(k);
  out.self_loop.assign(k, 0.0);
  out.degree.assign(k, 0.0);
  out.two_m = g.two_m;
  std::vector<std::map<std::uint32_t, double>> links(k);
  for (std::uint32_t i = 0; i < g.size(); ++i) {
    const std::uint32_t ci = comm[i];
    out.self_loop[ci] += g.self_loop[i];
    out.degree[ci] += g.degree[i];
    for (const auto& [j, w] : g.adj[i]) {
      const std::uint32_t cj = comm[j];
      if (cj == ci) {
        out.self_loop[ci] += w;
      } else {
        links[ci][cj] += w;
      }
    }
  }
  for (std::uint32_t c = 0; c < k; ++c) {
    out.adj[c].assign(links[c].begin(), links[c].end());
  }
  return out;
}

}  // namespace

CommunityPartition louvain(const WeightedTemporalGraph& graph, const LouvainOptions& opts) {
  if (graph.nodes().empty() || graph.total_weight() == 0) {
    throw std::invalid_argument("louvain requires a graph with positive total weight");
  }
  const auto& nodes = graph.nodes();
  std::vector<std::uint32_t> local_of(graph.node_capacity(), std::numeric_limits<std::uint32_t>::max());
  for (std::uint32_t i = 0; i < nodes.size(); ++i) local_of[nodes[i]] = i;

  LevelGraph level;
  level.adj.resize(nodes.size());
  level.self_loop.assign(nodes.size(), 0.0);
  level.degree.assign(nodes.size(), 0.0);
  level.two_m = 2.0 * static_cast<double>(graph.total_weight());
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    for (const auto& nb : graph.neighbors(nodes[i])) {
      const double w = static_cast<double>(nb.weight);
      if (nb.node == nodes[i]) {
        level.self_loop[i] += 2.0 * w;
      } else {
        level.adj[i].emplace_back(local_of[nb.node], w);
      }
    }
    level.degree[i] = static_cast<double>(graph.degree(nodes[i]));
  }

  // flat[i] = current community of original node nodes[i].
  std::vector<std::uint32_t> flat(nodes.size());
  std::iota(flat.begin(), flat.end(), 0u);
  SplitMix64 rng(derive_seed(opts.seed, {0x6c6f7576ULL}));
  double q = level_modularity(level, std::vector<std::uint32_t>(flat));

  for (;;) {
    std::vector<std::uint32_t> comm(level.size());
    std::iota(comm.begin(), comm.end(), 0u);
    const bool moved = local_moves(level, comm, rng, opts.min_gain);
    const std::size_t k = renumber(comm);
    if (!moved) break;
    for (auto& f : flat) f = comm[f];
    level = aggregate(level, comm, k);
    std::vector<std::uint32_t> identity(k);
    std::iota(identity.begin(), identity.end(), 0u);
    const double new_q = level_modularity(level, identity);
    const double improvement = new_q - q;
    q = new_q;
    if (improvement < opts.min_gain || k == 1) break;
  }

  CommunityPartition out;
  out.seed = opts.seed;
  std::vector<std::uint32_t> dense = flat;
  out.k = renumber(dense);
  out.assignment.assign(graph.node_capacity(), kUnassigned);
  for (std::uint32_t i = 0; i < nodes.size(); ++i) out.assignment[nodes[i]] = dense[i];
  out.modularity = modularity(graph, out.assignment);
  return out;
}

std::vector<bool> bridging_nodes(const WeightedTemporalGraph& graph, const CommunityPartition& partition) {
  std::vector<bool> out(graph.node_capacity(), false);
  for (NodeId n : graph.nodes()) {
    const CommunityId c = partition.of(n);
    if (c == kUnassigned) continue;
    for (const auto& nb : graph.neighbors(n)) {
      const CommunityId other = partition.of(nb.node);
      if (other != kUnassigned && other != c) {
        out[n] = true;
        break;
      }
    }
  }
  return out;
}

CommunityGraphs derive_subgraphs(const EventStream& stream, const CommunityPartition& partition) {
  CommunityGraphs g;
  const std::size_t capacity = std::max(stream.node_count, partition.assignment.size());
  g.is_bridging.assign(capacity, false);
  if (!stream.empty()) {
    const auto weighted = build_weighted_graph(stream);
    const auto flags = bridging_nodes(weighted, partition);
    for (NodeId n = 0; n < flags.size(); ++n) g.is_bridging[n] = flags[n];
  }
  for (NodeId n = 0; n < capacity; ++n) {
    if (g.is_bridging[n]) g.bridging.push_back(n);
  }
  g.intra_events.resize(partition.k);
  g.intra = TemporalAdjacency(capacity);
  g.inter = TemporalAdjacency(capacity);
  g.full = TemporalAdjacency(capacity);
  for (std::uint32_t i = 0; i < stream.events.size(); ++i) {
    const Event& e = stream.events[i];
    g.full.add(e.u, e.v, e.t, i);
    const CommunityId cu = partition.of(e.u);
    const CommunityId cv = partition.of(e.v);
    if (cu != kUnassigned && cu == cv) {
      g.intra.add(e.u, e.v, e.t, i);
      if (cu >= g.intra_events.size()) g.intra_events.resize(cu + 1);
      g.intra_events[cu].push_back(i);
    }
    if (g.is_bridging[e.u] && g.is_bridging[e.v]) {
      g.inter.add(e.u, e.v, e.t, i);
      g.inter_events.push_back(i);
    }
  }
  g.intra.finalize();
  g.inter.finalize();
  g.full.finalize();
  return g;
}

CommunityId assign_unseen_community(std::span<const std::pair<NodeId, std::uint64_t>> neighbor_weights,
                                    const CommunityPartition& partition, SplitMix64& rng) {
  if (neighbor_weights.empty()) throw std::invalid_argument("node has no neighbors; community undefined");
  std::map<CommunityId, double> mass;
  double total = 0.0;
  for (const auto& [nb, w] : neighbor_weights) {
    const CommunityId c = partition.of(nb);
    if (c == kUnassigned) throw std::invalid_argument("neighbor " + std::to_string(nb) + " has no community");
    mass[c] += static_cast<double>(w);
    total += static_cast<double>(w);
  }
  if (mass.size() == 1) return mass.begin()->first;
  if (!(total > 0)) throw std::invalid_argument("neighbor weights sum to zero");
  double draw = rng.uniform() * total;
  for (const auto& [c, m] : mass) {
    if (draw < m) return c;
    draw -= m;
  }
  return mass.rbegin()->first;
}

CommunityPartition extend_partition(const CommunityPartition& partition, const EventStream& observed,
                                    std::uint64_t seed) {
  CommunityPartition out = partition;
  const std::size_t capacity = std::max(observed.node_count, partition.assignment.size());
  out.assignment.resize(capacity, kUnassigned);
  if (observed.empty()) return out;
  const auto weighted = build_weighted_graph(observed);
  std::vector<std::pair<NodeId, std::uint64_t>> nbrs;
  for (NodeId n : weighted.nodes()) {
    if (partition.of(n) != kUnassigned) continue;
    nbrs.clear();
    for (const auto& nb : weighted.neighbors(n)) {
      if (partition.of(nb.node) != kUnassigned) nbrs.emplace_back(nb.node, nb.weight);
    }
    if (nbrs.empty()) {
      out.assignment[n] = static_cast<CommunityId>(out.k++);
      continue;
    }
    SplitMix64 rng(derive_seed(seed, {n}));
    out.assignment[n] = assign_unseen_community(nbrs, partition, rng);
  }
  return out;
}

std::string partition_to_json(const CommunityPartition& partition, const std::vector<NodeId>& bridging) {
  nlohmann::json j;
  j["seed"] = partition.seed;
  j["k"] = partition.k;
  j["Q"] = partition.modularity;
  nlohmann::json arr = nlohmann::json::array();
  for (CommunityId c : partition.assignment) {
    if (c == kUnassigned) {
      arr.push_back(-1);
    } else {
      arr.push_back(c);
    }
  }
  j["assignment"] = arr;
  j["bridging"] = bridging;
  return j.dump(2);
}

CommunityPartition partition_from_json(const std::string& text) {
  CommunityPartition p;
  try {
    const auto j = nlohmann::json::parse(text);
    p.seed = j.at("seed").get<std::uint64_t>();
    p.k = j.at("k").get<std::size_t>();
    p.modularity = j.at("Q").get<double>();
    for (const auto& v : j.at("assignment")) {
      const auto c = v.get<std::int64_t>();
      if (c >= static_cast<std::int64_t>(p.k)) throw std::invalid_argument("community id exceeds k");
      p.assignment.push_back(c < 0 ? kUnassigned : static_cast<CommunityId>(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("partition JSON schema violation: ") + e.what());
  }
  return p;
}

}  // namespace ctwalks

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctwalks/graph_store.hpp"
#include "ctwalks/rng.hpp"

namespace ctwalks {

using CommunityId = std::uint32_t;
inline constexpr CommunityId kUnassigned = std::numeric_limits<CommunityId>::max();

/// Disjoint, covering node -> community map over the nodes of a weighted graph.
/// Ids beyond the graph, or absent from it, map to kUnassigned.
struct CommunityPartition {
  std::vector<CommunityId> assignment;
  std::size_t k = 0;
  double modularity = 0.0;
  std::uint64_t seed = 0;

  CommunityId of(NodeId n) const { return n < assignment.size() ? assignment[n] : kUnassigned; }
  std::vector<std::vector<NodeId>> members() const;
};

struct LouvainOptions {
  std::uint64_t seed = 0;
  double min_gain = 1e-7;
};

/// Multi-level Louvain on the weighted graph. Local moves use the standard
/// modularity gain in a seeded random node order; communities are then folded
/// into supernodes until a level improves Q by less than `min_gain`.
CommunityPartition louvain(const WeightedTemporalGraph& graph, const LouvainOptions& opts = {});

/// Q = sum_c [in_c / 2m - (tot_c / 2m)^2], in_c counting each internal edge twice.
double modularity(const WeightedTemporalGraph& graph, std::span<const CommunityId> assignment);

/// Per-community temporal subgraphs, the bridging subgraph and the full graph.
/// The intra-community subgraphs are node-disjoint, so they share one index:
/// a node's intra list only ever holds events inside its own community.
struct CommunityGraphs {
  TemporalAdjacency intra;
  TemporalAdjacency inter;
  TemporalAdjacency full;
  std::vector<bool> is_bridging;
  std::vector<NodeId> bridging;
  /// Event indices (into the source stream) routed to each community.
  std::vector<std::vector<std::uint32_t>> intra_events;
  std::vector<std::uint32_t> inter_events;

  bool bridging_node(NodeId n) const { return n < is_bridging.size() && is_bridging[n]; }
};

/// Bridging set V_I: nodes with a weighted edge to another community.
std::vector<bool> bridging_nodes(const WeightedTemporalGraph& graph, const CommunityPartition& partition);

/// Route events: intra iff both endpoints share a community, inter iff both
/// endpoints are bridging (so a same-community bridging event lands in both).
/// Events touching an unassigned node only enter the full graph.
CommunityGraphs derive_subgraphs(const EventStream& stream, const CommunityPartition& partition);

/// Community of a node unseen at partition time, drawn with probability
/// proportional to its edge weight into each community. Throws for an empty
/// neighbor list or an unassigned neighbor.
CommunityId assign_unseen_community(std::span<const std::pair<NodeId, std::uint64_t>> neighbor_weights,
                                    const CommunityPartition& partition, SplitMix64& rng);

/// Extend `partition` to every node of `observed`. Unseen nodes use their
/// weights towards already assigned nodes; nodes with none get a fresh
/// singleton id (k, k+1, ...). The draw is made once per node with `seed`.
CommunityPartition extend_partition(const CommunityPartition& partition, const EventStream& observed,
                                    std::uint64_t seed);

std::string partition_to_json(const CommunityPartition& partition, const std::vector<NodeId>& bridging);
CommunityPartition partition_from_json(const std::string& text);

}  // namespace ctwalks

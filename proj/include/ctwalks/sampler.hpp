#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "ctwalks/community.hpp"
#include "ctwalks/graph_store.hpp"
#include "ctwalks/rng.hpp"

namespace ctwalks {

struct WalkStep {
  NodeId node = 0;
  Timestamp t = 0.0;
  /// Index of the traversed event in the source stream; -1 for the root.
  std::int64_t event_index = -1;

  bool operator==(const WalkStep&) const = default;
};

/// Root first, then strictly decreasing timestamps. `max_length` is the l the
/// walk was sampled for; `steps.size()` is the realized length.
struct TemporalWalk {
  std::vector<WalkStep> steps;
  std::size_t max_length = 0;

  const WalkStep& root() const { return steps.front(); }
  std::size_t realized_length() const { return steps.size(); }
  bool operator==(const TemporalWalk&) const = default;
};

/// R walks from each endpoint of one interaction.
struct WalkSet {
  std::vector<TemporalWalk> source;
  std::vector<TemporalWalk> target;
  bool operator==(const WalkSet&) const = default;
};

/// Which subgraph governs a walk, chosen once from the root's role. The
/// non-default policies implement the sampling ablations.
enum class WalkPolicy {
  kCommunity,        // bridging roots on G_I, others on their G_C
  kNoIntra,          // non-bridging roots walk the full graph
  kNoInter,          // bridging roots walk the full graph
  kUnrestricted,     // every root walks the full graph
};

struct SamplerConfig {
  std::size_t walk_length = 2;
  std::size_t walks_per_node = 16;
  /// Divisor applied to t - t' in the exponent. 1 keeps raw time units.
  double time_scale = 1.0;
  WalkPolicy policy = WalkPolicy::kCommunity;
};

/// Next-step distribution over the candidates of `candidates` (all of which
/// must satisfy t' < t). Probabilities are a stable softmax of -(t - t')/scale.
/// Returns an empty vector for an empty support.
std::vector<double> transition_distribution(std::span<const TemporalAdjacency::Entry> candidates, Timestamp t,
                                            double time_scale);

/// Convenience overload: candidates are v's entries in `adjacency` with t' < t.
std::vector<double> transition_distribution(NodeId v, Timestamp t, const TemporalAdjacency& adjacency,
                                            double time_scale);

const TemporalAdjacency& governing_subgraph(NodeId root, const CommunityGraphs& graphs, WalkPolicy policy);

/// Sample one walk of at most `length` steps on `adjacency`.
TemporalWalk sample_walk_on(NodeId root, Timestamp t0, std::size_t length, const TemporalAdjacency& adjacency,
                            double time_scale, SplitMix64& rng);

TemporalWalk sample_walk(NodeId root, Timestamp t0, std::size_t length, const CommunityGraphs& graphs,
                         const SamplerConfig& config, SplitMix64& rng);

/// R walks from u and R from v, each with its own stream derived from
/// (seed, role, walk index), so results do not depend on `threads`.
WalkSet sample_walk_sets(NodeId u, NodeId v, Timestamp t, const CommunityGraphs& graphs,
                         const SamplerConfig& config, std::uint64_t seed, unsigned threads = 1);

/// Debug dump: one walk per line, "role node:t node:t ...".
void dump_walks(std::ostream& out, const WalkSet& walks);

}  // namespace ctwalks

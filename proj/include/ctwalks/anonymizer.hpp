#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ctwalks/community.hpp"
#include "ctwalks/sampler.hpp"

namespace ctwalks {

/// Community token carried by padding steps.
inline constexpr CommunityId kPadCommunity = kUnassigned - 1;

/// counts[i] = number of walks in which the node sits at position i.
using PositionVector = std::vector<std::uint32_t>;

/// Layout [source_counts | C_u | target_counts | C_v].
struct AnonymizedNodeRep {
  PositionVector source_counts;
  CommunityId source_community = kPadCommunity;
  PositionVector target_counts;
  CommunityId target_community = kPadCommunity;

  bool operator==(const AnonymizedNodeRep&) const = default;
  auto operator<=>(const AnonymizedNodeRep&) const = default;
};

struct AnonymizedStep {
  AnonymizedNodeRep rep;
  Timestamp t = 0.0;
  bool pad = false;

  bool operator==(const AnonymizedStep&) const = default;
};

/// Exactly `walk_length` steps; short walks are padded at the tail with zero
/// counts, the pad token and the last real timestamp.
struct AnonymizedWalk {
  std::vector<AnonymizedStep> steps;
  bool from_source = true;

  bool operator==(const AnonymizedWalk&) const = default;
};

PositionVector position_vector(NodeId w, const TemporalWalk& walk, std::size_t walk_length);
PositionVector aggregate_positions(NodeId w, const std::vector<TemporalWalk>& walks, std::size_t walk_length);

/// Representation of every node seen in either walk set.
std::map<NodeId, AnonymizedNodeRep> anonymize_interaction(const WalkSet& walks, CommunityId source_community,
                                                          CommunityId target_community, std::size_t walk_length);

/// Source walks first, then target walks, each rewritten step by step.
std::vector<AnonymizedWalk> anonymize_walks(const WalkSet& walks, CommunityId source_community,
                                            CommunityId target_community, std::size_t walk_length);

}  // namespace ctwalks

#include "ctwalks/anonymizer.hpp"

#include <stdexcept>

namespace ctwalks {

PositionVector position_vector(NodeId w, const TemporalWalk& walk, std::size_t walk_length) {
  if (walk.realized_length() > walk_length) throw std::invalid_argument("walk longer than the position vector");
  PositionVector counts(walk_length, 0);
  for (std::size_t i = 0; i < walk.steps.size(); ++i) {
    if (walk.steps[i].node == w) counts[i] = 1;
  }
  return counts;
}

PositionVector aggregate_positions(NodeId w, const std::vector<TemporalWalk>& walks, std::size_t walk_length) {
  PositionVector counts(walk_length, 0);
  for (const auto& walk : walks) {
    const auto one = position_vector(w, walk, walk_length);
    for (std::size_t i = 0; i < walk_length; ++i) counts[i] += one[i];
  }
  return counts;
}

namespace {

// Single pass over a walk set instead of one pass per node.
void accumulate(const std::vector<TemporalWalk>& walks, std::size_t walk_length,
                std::map<NodeId, AnonymizedNodeRep>& reps, bool source) {
  for (const auto& walk : walks) {
    if (walk.realized_length() > walk_length) throw std::invalid_argument("walk longer than the position vector");
    for (std::size_t i = 0; i < walk.steps.size(); ++i) {
      auto& rep = reps[walk.steps[i].node];
      auto& counts = source ? rep.source_counts : rep.target_counts;
      if (counts.empty()) counts.assign(walk_length, 0);
      ++counts[i];
    }
  }
}

}  // namespace

std::map<NodeId, AnonymizedNodeRep> anonymize_interaction(const WalkSet& walks, CommunityId source_community,
                                                          CommunityId target_community, std::size_t walk_length) {
  std::map<NodeId, AnonymizedNodeRep> reps;
  accumulate(walks.source, walk_length, reps, true);
  accumulate(walks.target, walk_length, reps, false);
  for (auto& [node, rep] : reps) {
    if (rep.source_counts.empty()) rep.source_counts.assign(walk_length, 0);
    if (rep.target_counts.empty()) rep.target_counts.assign(walk_length, 0);
    rep.source_community = source_community;
    rep.target_community = target_community;
  }
  return reps;
}

std::vector<AnonymizedWalk> anonymize_walks(const WalkSet& walks, CommunityId source_community,
                                            CommunityId target_community, std::size_t walk_length) {
  const auto reps = anonymize_interaction(walks, source_community, target_community, walk_length);
  AnonymizedNodeRep pad;
  pad.source_counts.assign(walk_length, 0);
  pad.target_counts.assign(walk_length, 0);

  std::vector<AnonymizedWalk> out;
  out.reserve(walks.source.size() + walks.target.size());
  auto rewrite = [&](const TemporalWalk& walk, bool from_source) {
    AnonymizedWalk anon;
    anon.from_source = from_source;
    anon.steps.reserve(walk_length);
    for (const auto& step : walk.steps) anon.steps.push_back({reps.at(step.node), step.t, false});
    const Timestamp last = walk.steps.empty() ? 0.0 : walk.steps.back().t;
    while (anon.steps.size() < walk_length) anon.steps.push_back({pad, last, true});
    out.push_back(std::move(anon));
  };
  for (const auto& w : walks.source) rewrite(w, true);
  for (const auto& w : walks.target) rewrite(w, false);
  return out;
}

}  // namespace ctwalks

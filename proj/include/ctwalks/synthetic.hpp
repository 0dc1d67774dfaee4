#pragma once

#include <cstdint>
#include <vector>

#include "ctwalks/community.hpp"
#include "ctwalks/graph_store.hpp"

namespace ctwalks {

/// Planted-partition event stream. Every node pair inside a community
/// interacts at `intra_inter_ratio` times the rate of a pair across
/// communities; event times are uniform on [0, duration].
struct PlantedConfig {
  std::size_t communities = 4;
  std::size_t community_size = 50;
  std::size_t events = 20000;
  double intra_inter_ratio = 10.0;
  double duration = 1e6;
  std::uint64_t seed = 0;
};

struct PlantedStream {
  EventStream stream;
  /// Planted community of each dense node id.
  std::vector<CommunityId> truth;
};

PlantedStream planted_stream(const PlantedConfig& config);

}  // namespace ctwalks

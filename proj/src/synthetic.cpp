#include "ctwalks/synthetic.hpp"

#include <stdexcept>
#include <string>
#include <tuple>

#include "ctwalks/rng.hpp"

namespace ctwalks {

PlantedStream planted_stream(const PlantedConfig& config) {
  const std::size_t c = config.communities;
  const std::size_t s = config.community_size;
  if (c < 2 || s < 2) throw std::invalid_argument("need at least two communities of two nodes");
  if (!(config.intra_inter_ratio > 0) || !(config.duration > 0)) {
    throw std::invalid_argument("rate ratio and duration must be positive");
  }
  const std::size_t n = c * s;
  const double intra_pairs = static_cast<double>(c * s * (s - 1) / 2);
  const double inter_pairs = static_cast<double>(n * (n - 1) / 2) - intra_pairs;
  const double p_intra = config.intra_inter_ratio * intra_pairs / (config.intra_inter_ratio * intra_pairs + inter_pairs);

  SplitMix64 rng(derive_seed(config.seed, {0x706c616eULL}));
  std::vector<std::tuple<NodeId, NodeId, Timestamp>> raw;
  raw.reserve(config.events);
  for (std::size_t i = 0; i < config.events; ++i) {
    NodeId a = 0, b = 0;
    if (rng.uniform() < p_intra) {
      const auto block = static_cast<NodeId>(rng.below(c));
      const auto x = static_cast<NodeId>(rng.below(s));
      auto y = static_cast<NodeId>(rng.below(s - 1));
      if (y >= x) ++y;
      a = block * static_cast<NodeId>(s) + x;
      b = block * static_cast<NodeId>(s) + y;
    } else {
      do {
        a = static_cast<NodeId>(rng.below(n));
        b = static_cast<NodeId>(rng.below(n));
      } while (a / s == b / s);
    }
    raw.emplace_back(a, b, rng.uniform() * config.duration);
  }

  PlantedStream out;
  out.stream = make_stream(n, raw);
  out.stream.labels.resize(n);
  out.truth.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    out.stream.labels[v] = std::to_string(v);
    out.truth[v] = static_cast<CommunityId>(v / s);
  }
  return out;
}

}  // namespace ctwalks

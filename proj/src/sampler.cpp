#include "ctwalks/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ctwalks {

std::vector<double> transition_distribution(std::span<const TemporalAdjacency::Entry> candidates, Timestamp t,
                                            double time_scale) {
  if (!(time_scale > 0)) throw std::invalid_argument("time_scale must be positive");
  if (!std::isfinite(t)) throw std::invalid_argument("walk time must be finite");
  std::vector<double> probs(candidates.size());
  if (candidates.empty()) return probs;
  // The largest exponent belongs to the most recent candidate.
  double max_exp = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    probs[i] = -(t - candidates[i].t) / time_scale;
    max_exp = std::max(max_exp, probs[i]);
  }
  double total = 0.0;
  for (double& p : probs) {
    p = std::exp(p - max_exp);
    total += p;
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<double> transition_distribution(NodeId v, Timestamp t, const TemporalAdjacency& adjacency,
                                            double time_scale) {
  return transition_distribution(adjacency.before(v, t), t, time_scale);
}

const TemporalAdjacency& governing_subgraph(NodeId root, const CommunityGraphs& graphs, WalkPolicy policy) {
  const bool bridging = graphs.bridging_node(root);
  switch (policy) {
    case WalkPolicy::kCommunity:
      return bridging ? graphs.inter : graphs.intra;
    case WalkPolicy::kNoIntra:
      return bridging ? graphs.inter : graphs.full;
    case WalkPolicy::kNoInter:
      return bridging ? graphs.full : graphs.intra;
    case WalkPolicy::kUnrestricted:
      return graphs.full;
  }
  return graphs.full;
}

TemporalWalk sample_walk_on(NodeId root, Timestamp t0, std::size_t length, const TemporalAdjacency& adjacency,
                            double time_scale, SplitMix64& rng) {
  if (length == 0) throw std::invalid_argument("walk length must be at least 1");
  TemporalWalk walk;
  walk.max_length = length;
  walk.steps.reserve(length);
  walk.steps.push_back({root, t0, -1});
  NodeId current = root;
  Timestamp t = t0;
  std::vector<double> weights;
  for (std::size_t step = 1; step < length; ++step) {
    const auto candidates = adjacency.before(current, t);
    if (candidates.empty()) break;
    // Unnormalised stable softmax, newest first. Candidates are sorted by time,
    // so once a weight underflows to zero every older one does too.
    const Timestamp newest = candidates.back().t;
    weights.clear();
    double total = 0.0;
    for (std::size_t i = candidates.size(); i-- > 0;) {
      const double w = std::exp(-(newest - candidates[i].t) / time_scale);
      if (w == 0.0) break;
      weights.push_back(w);
      total += w;
    }
    double draw = rng.uniform() * total;
    std::size_t pick = 0;
    for (; pick + 1 < weights.size(); ++pick) {
      if (draw < weights[pick]) break;
      draw -= weights[pick];
    }
    const auto& chosen = candidates[candidates.size() - 1 - pick];
    walk.steps.push_back({chosen.neighbor, chosen.t, chosen.event_index});
    current = chosen.neighbor;
    t = chosen.t;
  }
  return walk;
}

TemporalWalk sample_walk(NodeId root, Timestamp t0, std::size_t length, const CommunityGraphs& graphs,
                         const SamplerConfig& config, SplitMix64& rng) {
  return sample_walk_on(root, t0, length, governing_subgraph(root, graphs, config.policy), config.time_scale, rng);
}

WalkSet sample_walk_sets(NodeId u, NodeId v, Timestamp t, const CommunityGraphs& graphs,
                         const SamplerConfig& config, std::uint64_t seed, unsigned threads) {
  if (config.walks_per_node == 0) throw std::invalid_argument("walks per node must be at least 1");
  const std::size_t r = config.walks_per_node;
  WalkSet out;
  out.source.resize(r);
  out.target.resize(r);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const bool is_source = i < r;
      const std::size_t idx = is_source ? i : i - r;
      SplitMix64 rng(derive_seed(seed, {is_source ? 0u : 1u, idx}));
      auto walk = sample_walk(is_source ? u : v, t, config.walk_length, graphs, config, rng);
      (is_source ? out.source : out.target)[idx] = std::move(walk);
    }
  };
  const std::size_t total = 2 * r;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
  if (threads == 1) {
    work(0, total);
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (total + threads - 1) / threads;
  for (std::size_t b = 0; b < total; b += chunk) pool.emplace_back(work, b, std::min(total, b + chunk));
  for (auto& th : pool) th.join();
  return out;
}

void dump_walks(std::ostream& out, const WalkSet& walks) {
  auto emit = [&](const char* role, const std::vector<TemporalWalk>& set) {
    for (const auto& w : set) {
      out << role;
      for (const auto& s : w.steps) out << ' ' << s.node << ':' << s.t;
      out << '\n';
    }
  };
  emit("source", walks.source);
  emit("target", walks.target);
}

}  // namespace ctwalks

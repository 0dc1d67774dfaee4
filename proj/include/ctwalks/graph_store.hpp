#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ctwalks {

using NodeId = std::uint32_t;
using Timestamp = double;
using SplitRatios = std::array<double, 3>;
inline constexpr SplitRatios kDefaultRatios{0.7, 0.15, 0.15};

/// Thrown for malformed input data. `line` is 1-based, 0 when not applicable.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Event {
  NodeId u = 0;
  NodeId v = 0;
  Timestamp t = 0.0;
  std::vector<double> attrs;
};

/// Chronologically ordered interactions. Node ids are dense in [0, node_count).
struct EventStream {
  std::vector<Event> events;
  std::size_t node_count = 0;
  std::size_t attr_width = 0;
  /// Original label of each dense id; may be empty for generated streams.
  std::vector<std::string> labels;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
};

inline std::uint64_t pair_key(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

/// Unordered set of node pairs that interacted at least once.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(const EventStream& stream);

  bool contains(NodeId a, NodeId b) const { return keys_.count(pair_key(a, b)) != 0; }
  std::size_t size() const { return keys_.size(); }

 private:
  std::unordered_set<std::uint64_t> keys_;
};

/// Static aggregate: w_uv counts interactions between u and v in either orientation.
class WeightedTemporalGraph {
 public:
  struct Neighbor {
    NodeId node;
    std::uint64_t weight;
  };

  WeightedTemporalGraph() = default;

  /// Capacity for ids [0, node_capacity); nodes without any event are absent.
  WeightedTemporalGraph(std::size_t node_capacity,
                        std::span<const std::tuple<NodeId, NodeId, std::uint64_t>> weighted_edges);

  std::size_t node_capacity() const { return adjacency_.size(); }
  bool has_node(NodeId n) const { return n < present_.size() && present_[n]; }
  /// Present nodes in ascending id order.
  const std::vector<NodeId>& nodes() const { return nodes_; }
  std::uint64_t weight(NodeId a, NodeId b) const;
  std::uint64_t degree(NodeId n) const { return n < degree_.size() ? degree_[n] : 0; }
  std::uint64_t total_weight() const { return total_weight_; }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<Neighbor>& neighbors(NodeId n) const { return adjacency_.at(n); }

 private:
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<std::uint64_t> degree_;
  std::vector<bool> present_;
  std::vector<NodeId> nodes_;
  std::uint64_t total_weight_ = 0;
  std::size_t edge_count_ = 0;
};

/// Per-node time-sorted incident events, for "neighbors with t' < t" queries.
class TemporalAdjacency {
 public:
  struct Entry {
    NodeId neighbor;
    Timestamp t;
    std::uint32_t event_index;
  };

  TemporalAdjacency() = default;
  explicit TemporalAdjacency(std::size_t node_capacity) : lists_(node_capacity) {}

  /// Index every event of `stream` accepted by `keep`.
  template <typename Pred>
  static TemporalAdjacency build(const EventStream& stream, std::size_t node_capacity, Pred keep) {
    TemporalAdjacency adj(node_capacity);
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
      const Event& e = stream.events[i];
      if (!keep(e)) continue;
      adj.add(e.u, e.v, e.t, static_cast<std::uint32_t>(i));
    }
    adj.finalize();
    return adj;
  }

  static TemporalAdjacency build(const EventStream& stream) {
    return build(stream, stream.node_count, [](const Event&) { return true; });
  }

  void add(NodeId u, NodeId v, Timestamp t, std::uint32_t event_index);
  /// Sort each list by (t, event_index). Must be called after the last `add`.
  void finalize();

  std::size_t node_capacity() const { return lists_.size(); }
  std::span<const Entry> entries(NodeId n) const {
    if (n >= lists_.size()) return {};
    return lists_[n];
  }
  /// Entries of `n` with timestamp strictly below `t`; a prefix of `entries(n)`.
  std::span<const Entry> before(NodeId n, Timestamp t) const;
  std::size_t entry_count() const;

 private:
  std::vector<std::vector<Entry>> lists_;
};

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double duration = 0.0;
  double intensity = 0.0;
};

enum class InductiveLabel { kNewNew, kNewOld };

struct NegativeEdge {
  NodeId u = 0;
  NodeId v = 0;
  Timestamp t = 0.0;
};

struct DatasetSplits {
  EventStream train;
  EventStream val;
  EventStream test;
  Timestamp train_end = 0.0;
  Timestamp val_end = 0.0;
  std::vector<NodeId> masked_nodes;
  /// Parallel to val/test events in inductive splits; empty otherwise.
  std::vector<InductiveLabel> val_labels;
  std::vector<InductiveLabel> test_labels;
  std::vector<NegativeEdge> train_negatives;
  std::vector<NegativeEdge> val_negatives;
  std::vector<NegativeEdge> test_negatives;
  std::uint64_t seed = 0;
  SplitRatios ratios = kDefaultRatios;
};

struct IngestOptions {
  /// Delimiter; when unset, commas are used if present in the first data
  /// line, otherwise any run of whitespace.
  std::optional<char> delimiter;
  /// Column index of the first attribute, or none for 3-column files. JODIE
  /// files (u,i,ts,state,features...) use 4.
  std::optional<std::size_t> attr_start;
  bool auto_jodie = true;
  /// Keep source and destination label spaces apart (JODIE user/item ids
  /// overlap). Defaults to on for JODIE-shaped files.
  std::optional<bool> bipartite;
};

struct IngestReport {
  std::size_t self_loops_rejected = 0;
  bool header_skipped = false;
};

/// Parse delimited records, reject self loops, stable-sort by time and remap
/// labels to dense ids in order of first appearance in the sorted stream.
EventStream ingest_events(std::istream& in, const IngestOptions& opts = {},
                          IngestReport* report = nullptr);
EventStream ingest_file(const std::string& path, const IngestOptions& opts = {},
                        IngestReport* report = nullptr);

/// Write a stream as `u,v,t[,attrs]`, with original labels when present and
/// `use_labels` is set, otherwise dense ids.
void write_events(std::ostream& out, const EventStream& stream, bool use_labels = true);

GraphStats compute_stats(const EventStream& stream);
double interaction_intensity(std::size_t nodes, std::size_t edges, double duration);

WeightedTemporalGraph build_weighted_graph(const EventStream& train);

/// Build a stream from raw (u, v, t) triples with already-dense ids.
EventStream make_stream(std::size_t node_count,
                        std::span<const std::tuple<NodeId, NodeId, Timestamp>> events);

/// Ceil-based chronological split sizes for n events; remainder goes to test.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios);

DatasetSplits chronological_split(const EventStream& stream, const SplitRatios& ratios);

/// Inductive protocol: mask ceil(fraction*|V|) nodes, drop their events from
/// train, keep only masked-touching events in val/test.
DatasetSplits mask_inductive_nodes(const EventStream& stream, double fraction, std::uint64_t seed,
                                   const SplitRatios& ratios = kDefaultRatios);

struct NegativeSamplingReport {
  std::size_t fallbacks = 0;
};

/// One negative per positive: same u and t, destination drawn uniformly among
/// nodes that never interact with u. After 100 rejected draws, falls back to any
/// node distinct from u and v.
std::vector<NegativeEdge> sample_negatives(const EventStream& split, const EdgeSet& full_edges,
                                           std::size_t node_count, std::uint64_t seed,
                                           NegativeSamplingReport* report = nullptr);

/// Fill the three negative lists of `splits` with seeds derived from `seed`.
void attach_negatives(DatasetSplits& splits, const EdgeSet& full_edges, std::size_t node_count,
                      std::uint64_t seed);

/// Persist as train.csv, val.csv, test.csv, negatives (*_neg.csv) and manifest.json.
void save_splits(const DatasetSplits& splits, const std::string& dir);
DatasetSplits load_splits(const std::string& dir);

}  // namespace ctwalks

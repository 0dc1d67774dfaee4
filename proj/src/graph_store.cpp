#include "ctwalks/graph_store.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "ctwalks/rng.hpp"

namespace ctwalks {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, std::optional<char> delim) {
  std::vector<std::string_view> out;
  if (delim) {
    std::size_t start = 0;
    for (;;) {
      const std::size_t pos = line.find(*delim, start);
      out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return out;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

struct RawRecord {
  std::string u;
  std::string v;
  double t;
  std::vector<double> attrs;
  std::size_t line;
};

}  // namespace

EdgeSet::EdgeSet(const EventStream& stream) {
  keys_.reserve(stream.size());
  for (const Event& e : stream.events) keys_.insert(pair_key(e.u, e.v));
}

WeightedTemporalGraph::WeightedTemporalGraph(
    std::size_t node_capacity,
    std::span<const std::tuple<NodeId, NodeId, std::uint64_t>> weighted_edges)
    : adjacency_(node_capacity), degree_(node_capacity, 0), present_(node_capacity, false) {
  for (const auto& [a, b, w] : weighted_edges) {
    if (a >= node_capacity || b >= node_capacity) throw std::out_of_range("node id beyond capacity");
    if (w == 0) continue;
    adjacency_[a].push_back({b, w});
    degree_[a] += w;
    present_[a] = true;
    if (a != b) {
      adjacency_[b].push_back({a, w});
      degree_[b] += w;
      present_[b] = true;
    } else {
      // A self loop contributes its weight twice to the degree.
      degree_[a] += w;
    }
    total_weight_ += w;
    ++edge_count_;
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end(), [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
  }
  for (NodeId n = 0; n < node_capacity; ++n) {
    if (present_[n]) nodes_.push_back(n);
  }
}

std::uint64_t WeightedTemporalGraph::weight(NodeId a, NodeId b) const {
  if (a >= adjacency_.size()) return 0;
  const auto& list = adjacency_[a];
  const auto it = std::lower_bound(list.begin(), list.end(), b,
                                   [](const Neighbor& n, NodeId id) { return n.node < id; });
  return (it != list.end() && it->node == b) ? it->weight : 0;
}

void TemporalAdjacency::add(NodeId u, NodeId v, Timestamp t, std::uint32_t event_index) {
  const std::size_t need = static_cast<std::size_t>(std::max(u, v)) + 1;
  if (need > lists_.size()) lists_.resize(need);
  lists_[u].push_back({v, t, event_index});
  lists_[v].push_back({u, t, event_index});
}

void TemporalAdjacency::finalize() {
  for (auto& list : lists_) {
    std::sort(list.begin(), list.end(), [](const Entry& a, const Entry& b) {
      return a.t < b.t || (a.t == b.t && a.event_index < b.event_index);
    });
  }
}

std::span<const TemporalAdjacency::Entry> TemporalAdjacency::before(NodeId n, Timestamp t) const {
  if (n >= lists_.size()) return {};
  const auto& list = lists_[n];
  const auto it = std::lower_bound(list.begin(), list.end(), t,
                                   [](const Entry& e, Timestamp value) { return e.t < value; });
  return {list.data(), static_cast<std::size_t>(it - list.begin())};
}

std::size_t TemporalAdjacency::entry_count() const {
  std::size_t total = 0;
  for (const auto& list : lists_) total += list.size();
  return total;
}

EventStream ingest_events(std::istream& in, const IngestOptions& opts, IngestReport* report) {
  IngestReport local;
  std::vector<RawRecord> records;
  std::optional<char> delim = opts.delimiter;
  bool delim_decided = opts.delimiter.has_value();
  std::optional<std::size_t> attr_start = opts.attr_start;
  std::optional<bool> bipartite = opts.bipartite;
  std::optional<std::size_t> attr_width;
  bool first_data_line = true;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#' || view.front() == '%') continue;
    if (!delim_decided) {
      if (view.find(',') != std::string_view::npos) delim = ',';
      delim_decided = true;
    }
    const auto fields = split_fields(view, delim);
    if (first_data_line) {
      first_data_line = false;
      // Node ids may be arbitrary strings, so only a non-numeric timestamp
      // column marks a header.
      if (!fields.empty() && !parse_number(fields[0]) && (fields.size() < 3 || !parse_number(fields[2]))) {
        local.header_skipped = true;
        continue;
      }
    }
    if (fields.size() < 3) throw DataError("expected at least 3 fields (u, v, t), got " + std::to_string(fields.size()), line_no);
    if (!attr_start) {
      if (fields.size() > 3 && opts.auto_jodie) {
        attr_start = 4;
      } else {
        attr_start = 3;
      }
    }
    if (!bipartite) bipartite = (opts.auto_jodie && fields.size() > 3 && !opts.attr_start);

    const auto t = parse_number(fields[2]);
    if (!t || !std::isfinite(*t)) throw DataError("timestamp is not a finite number: '" + std::string(fields[2]) + "'", line_no);
    if (*t < 0) throw DataError("negative timestamp", line_no);
    if (fields[0].empty() || fields[1].empty()) throw DataError("empty node identifier", line_no);

    RawRecord rec{std::string(fields[0]), std::string(fields[1]), *t, {}, line_no};
    for (std::size_t i = *attr_start; i < fields.size(); ++i) {
      const auto value = parse_number(fields[i]);
      if (!value) throw DataError("attribute column " + std::to_string(i) + " is not numeric", line_no);
      rec.attrs.push_back(*value);
    }
    if (!attr_width) attr_width = rec.attrs.size();
    if (rec.attrs.size() != *attr_width) {
      throw DataError("inconsistent attribute width: expected " + std::to_string(*attr_width) + ", got " +
                          std::to_string(rec.attrs.size()),
                      line_no);
    }
    if (*bipartite) rec.v = "i:" + rec.v;
    if (rec.u == rec.v) {
      ++local.self_loops_rejected;
      continue;
    }
    records.push_back(std::move(rec));
  }

  std::stable_sort(records.begin(), records.end(),
                   [](const RawRecord& a, const RawRecord& b) { return a.t < b.t; });

  EventStream stream;
  stream.attr_width = attr_width.value_or(0);
  std::unordered_map<std::string, NodeId> ids;
  auto intern = [&](const std::string& label) {
    const auto [it, inserted] = ids.emplace(label, static_cast<NodeId>(stream.labels.size()));
    if (inserted) stream.labels.push_back(label);
    return it->second;
  };
  stream.events.reserve(records.size());
  for (auto& rec : records) {
    Event e;
    e.u = intern(rec.u);
    e.v = intern(rec.v);
    e.t = rec.t;
    e.attrs = std::move(rec.attrs);
    stream.events.push_back(std::move(e));
  }
  stream.node_count = stream.labels.size();
  if (report) *report = local;
  return stream;
}

EventStream ingest_file(const std::string& path, const IngestOptions& opts, IngestReport* report) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open event file '" + path + "'");
  return ingest_events(in, opts, report);
}

void write_events(std::ostream& out, const EventStream& stream, bool use_labels) {
  const bool labelled = use_labels && stream.labels.size() == stream.node_count;
  out << std::setprecision(17);
  for (const Event& e : stream.events) {
    if (labelled) {
      out << stream.labels[e.u] << ',' << stream.labels[e.v];
    } else {
      out << e.u << ',' << e.v;
    }
    out << ',' << e.t;
    for (double a : e.attrs) out << ',' << a;
    out << '\n';
  }
}

double interaction_intensity(std::size_t nodes, std::size_t edges, double duration) {
  if (nodes == 0) throw DataError("intensity undefined for an empty node set");
  if (!(duration > 0)) throw DataError("intensity undefined for zero duration");
  return 2.0 * static_cast<double>(edges) / (static_cast<double>(nodes) * duration);
}

GraphStats compute_stats(const EventStream& stream) {
  if (stream.empty()) throw DataError("cannot compute statistics of an empty stream");
  GraphStats stats;
  std::vector<bool> seen(stream.node_count, false);
  double t_min = stream.events.front().t;
  double t_max = t_min;
  for (const Event& e : stream.events) {
    if (e.u >= seen.size() || e.v >= seen.size()) seen.resize(std::max(e.u, e.v) + 1, false);
    seen[e.u] = true;
    seen[e.v] = true;
    t_min = std::min(t_min, e.t);
    t_max = std::max(t_max, e.t);
  }
  stats.node_count = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
  stats.edge_count = stream.size();
  stats.duration = t_max - t_min;
  if (!(stats.duration > 0)) throw DataError("all events share one timestamp; intensity undefined");
  stats.intensity = interaction_intensity(stats.node_count, stats.edge_count, stats.duration);
  return stats;
}

WeightedTemporalGraph build_weighted_graph(const EventStream& train) {
  if (train.empty()) throw DataError("cannot build a weighted graph from an empty stream");
  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  counts.reserve(train.size());
  std::size_t capacity = train.node_count;
  for (const Event& e : train.events) {
    ++counts[pair_key(e.u, e.v)];
    capacity = std::max<std::size_t>(capacity, std::max(e.u, e.v) + 1);
  }
  std::vector<std::tuple<NodeId, NodeId, std::uint64_t>> edges;
  edges.reserve(counts.size());
  for (const auto& [key, w] : counts) {
    edges.emplace_back(static_cast<NodeId>(key >> 32), static_cast<NodeId>(key & 0xffffffffULL), w);
  }
  std::sort(edges.begin(), edges.end());
  return WeightedTemporalGraph(capacity, edges);
}

EventStream make_stream(std::size_t node_count,
                        std::span<const std::tuple<NodeId, NodeId, Timestamp>> events) {
  EventStream stream;
  stream.node_count = node_count;
  for (const auto& [u, v, t] : events) {
    if (u == v) throw DataError("self loop in generated stream");
    if (u >= node_count || v >= node_count) throw DataError("node id beyond node_count");
    stream.events.push_back(Event{u, v, t, {}});
  }
  std::stable_sort(stream.events.begin(), stream.events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
  return stream;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios) {
  for (double r : ratios) {
    if (!(r > 0)) throw DataError("split ratios must be positive");
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) throw DataError("split ratios must sum to 1");
  if (n < 3) throw DataError("need at least 3 events to split, got " + std::to_string(n));
  constexpr double kSlack = 1e-9;
  auto ceil_of = [&](double r) { return static_cast<std::size_t>(std::ceil(r * static_cast<double>(n) - kSlack)); };
  const std::size_t train = std::clamp<std::size_t>(ceil_of(ratios[0]), 1, n - 2);
  const std::size_t val = std::clamp<std::size_t>(ceil_of(ratios[1]), 1, n - train - 1);
  return {train, val, n - train - val};
}

namespace {

EventStream slice(const EventStream& stream, std::size_t begin, std::size_t end) {
  EventStream out;
  out.node_count = stream.node_count;
  out.attr_width = stream.attr_width;
  out.labels = stream.labels;
  out.events.assign(stream.events.begin() + static_cast<std::ptrdiff_t>(begin),
                    stream.events.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

}  // namespace

DatasetSplits chronological_split(const EventStream& stream, const SplitRatios& ratios) {
  const auto sizes = split_sizes(stream.size(), ratios);
  DatasetSplits splits;
  splits.ratios = ratios;
  splits.train = slice(stream, 0, sizes[0]);
  splits.val = slice(stream, sizes[0], sizes[0] + sizes[1]);
  splits.test = slice(stream, sizes[0] + sizes[1], stream.size());
  splits.train_end = splits.train.events.back().t;
  splits.val_end = splits.val.events.back().t;
  return splits;
}

DatasetSplits mask_inductive_nodes(const EventStream& stream, double fraction, std::uint64_t seed,
                                   const SplitRatios& ratios) {
  if (!(fraction > 0 && fraction < 1)) throw DataError("mask fraction must lie in (0, 1)");
  DatasetSplits base = chronological_split(stream, ratios);

  std::vector<NodeId> present;
  {
    std::vector<bool> seen(stream.node_count, false);
    for (const Event& e : stream.events) seen[e.u] = seen[e.v] = true;
    for (NodeId n = 0; n < seen.size(); ++n) {
      if (seen[n]) present.push_back(n);
    }
  }
  const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(present.size()) - 1e-9));
  // Partial Fisher-Yates for a uniform subset.
  SplitMix64 rng(derive_seed(seed, {0x6d61736bULL}));
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(present.size() - i);
    std::swap(present[i], present[j]);
  }
  std::vector<NodeId> masked(present.begin(), present.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(masked.begin(), masked.end());
  std::vector<bool> is_masked(stream.node_count, false);
  for (NodeId n : masked) is_masked[n] = true;

  DatasetSplits out;
  out.ratios = ratios;
  out.seed = seed;
  out.masked_nodes = masked;
  out.train_end = base.train_end;
  out.val_end = base.val_end;
  auto filter = [&](const EventStream& src, bool keep_masked, std::vector<InductiveLabel>* labels) {
    EventStream dst;
    dst.node_count = src.node_count;
    dst.attr_width = src.attr_width;
    dst.labels = src.labels;
    for (const Event& e : src.events) {
      const int touched = static_cast<int>(is_masked[e.u]) + static_cast<int>(is_masked[e.v]);
      if (keep_masked != (touched > 0)) continue;
      dst.events.push_back(e);
      if (labels) labels->push_back(touched == 2 ? InductiveLabel::kNewNew : InductiveLabel::kNewOld);
    }
    return dst;
  };
  out.train = filter(base.train, false, nullptr);
  out.val = filter(base.val, true, &out.val_labels);
  out.test = filter(base.test, true, &out.test_labels);
  if (out.train.empty()) throw DataError("masking removed every training event");
  return out;
}

std::vector<NegativeEdge> sample_negatives(const EventStream& split, const EdgeSet& full_edges,
                                           std::size_t node_count, std::uint64_t seed,
                                           NegativeSamplingReport* report) {
  if (node_count < 3) throw DataError("negative sampling needs at least 3 nodes");
  constexpr int kMaxTries = 100;
  SplitMix64 rng(seed);
  std::vector<NegativeEdge> out;
  out.reserve(split.size());
  std::size_t fallbacks = 0;
  for (const Event& e : split.events) {
    NodeId chosen = e.u;
    bool found = false;
    for (int attempt = 0; attempt < kMaxTries; ++attempt) {
      const auto cand = static_cast<NodeId>(rng.below(node_count));
      if (cand != e.u && !full_edges.contains(e.u, cand)) {
        chosen = cand;
        found = true;
        break;
      }
    }
    if (!found) {
      ++fallbacks;
      // node_count >= 3 guarantees a node distinct from both endpoints.
      do {
        chosen = static_cast<NodeId>(rng.below(node_count));
      } while (chosen == e.u || chosen == e.v);
    }
    out.push_back({e.u, chosen, e.t});
  }
  if (report) report->fallbacks = fallbacks;
  return out;
}

void attach_negatives(DatasetSplits& splits, const EdgeSet& full_edges, std::size_t node_count,
                      std::uint64_t seed) {
  splits.seed = seed;
  splits.train_negatives = sample_negatives(splits.train, full_edges, node_count, derive_seed(seed, {1}));
  splits.val_negatives = sample_negatives(splits.val, full_edges, node_count, derive_seed(seed, {2}));
  splits.test_negatives = sample_negatives(splits.test, full_edges, node_count, derive_seed(seed, {3}));
}

namespace {

void write_negatives(const std::string& path, const std::vector<NegativeEdge>& negs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << std::setprecision(17);
  for (const auto& n : negs) out << n.u << ',' << n.v << ',' << n.t << '\n';
}

std::vector<NegativeEdge> read_negatives(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<NegativeEdge> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line, ',');
    const auto u = f.size() == 3 ? parse_number(f[0]) : std::nullopt;
    const auto v = f.size() == 3 ? parse_number(f[1]) : std::nullopt;
    const auto t = f.size() == 3 ? parse_number(f[2]) : std::nullopt;
    if (!u || !v || !t) throw DataError("malformed negative record in '" + path + "'", line_no);
    out.push_back({static_cast<NodeId>(*u), static_cast<NodeId>(*v), *t});
  }
  return out;
}

EventStream read_dense(const std::string& path, std::size_t node_count, std::size_t attr_width,
                       const std::vector<std::string>& labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  EventStream s;
  s.node_count = node_count;
  s.attr_width = attr_width;
  s.labels = labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line, ',');
    if (f.size() != 3 + attr_width) throw DataError("unexpected field count in '" + path + "'", line_no);
    Event e;
    const auto u = parse_number(f[0]);
    const auto v = parse_number(f[1]);
    const auto t = parse_number(f[2]);
    if (!u || !v || !t || *u >= static_cast<double>(node_count) || *v >= static_cast<double>(node_count)) {
      throw DataError("malformed event in '" + path + "'", line_no);
    }
    e.u = static_cast<NodeId>(*u);
    e.v = static_cast<NodeId>(*v);
    e.t = *t;
    for (std::size_t i = 3; i < f.size(); ++i) {
      const auto a = parse_number(f[i]);
      if (!a) throw DataError("malformed attribute in '" + path + "'", line_no);
      e.attrs.push_back(*a);
    }
    s.events.push_back(std::move(e));
  }
  return s;
}

}  // namespace

void save_splits(const DatasetSplits& splits, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write_stream = [&](const std::string& name, const EventStream& s) {
    std::ofstream out(fs::path(dir) / name);
    if (!out) throw DataError("cannot write '" + (fs::path(dir) / name).string() + "'");
    write_events(out, s, false);
  };
  write_stream("train.csv", splits.train);
  write_stream("val.csv", splits.val);
  write_stream("test.csv", splits.test);
  write_negatives((fs::path(dir) / "train_neg.csv").string(), splits.train_negatives);
  write_negatives((fs::path(dir) / "val_neg.csv").string(), splits.val_negatives);
  write_negatives((fs::path(dir) / "test_neg.csv").string(), splits.test_negatives);

  auto label_names = [](const std::vector<InductiveLabel>& labels) {
    std::vector<std::string> out;
    for (auto l : labels) out.push_back(l == InductiveLabel::kNewNew ? "new-new" : "new-old");
    return out;
  };
  nlohmann::json manifest;
  manifest["seed"] = splits.seed;
  manifest["ratios"] = splits.ratios;
  manifest["boundaries"] = {splits.train_end, splits.val_end};
  manifest["masked_nodes"] = splits.masked_nodes;
  manifest["node_count"] = splits.train.node_count;
  manifest["attr_width"] = splits.train.attr_width;
  manifest["labels"] = splits.train.labels;
  manifest["sizes"] = {splits.train.size(), splits.val.size(), splits.test.size()};
  manifest["val_inductive_labels"] = label_names(splits.val_labels);
  manifest["test_inductive_labels"] = label_names(splits.test_labels);
  std::ofstream out(fs::path(dir) / "manifest.json");
  out << manifest.dump(2) << '\n';
}

DatasetSplits load_splits(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw DataError("missing split manifest '" + manifest_path.string() + "'");
  nlohmann::json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid split manifest: " + std::string(e.what()));
  }
  DatasetSplits s;
  try {
    s.seed = m.at("seed").get<std::uint64_t>();
    s.ratios = m.at("ratios").get<SplitRatios>();
    s.train_end = m.at("boundaries").at(0).get<double>();
    s.val_end = m.at("boundaries").at(1).get<double>();
    s.masked_nodes = m.at("masked_nodes").get<std::vector<NodeId>>();
    const auto node_count = m.at("node_count").get<std::size_t>();
    const auto attr_width = m.at("attr_width").get<std::size_t>();
    const auto labels = m.value("labels", std::vector<std::string>{});
    s.train = read_dense((fs::path(dir) / "train.csv").string(), node_count, attr_width, labels);
    s.val = read_dense((fs::path(dir) / "val.csv").string(), node_count, attr_width, labels);
    s.test = read_dense((fs::path(dir) / "test.csv").string(), node_count, attr_width, labels);
    auto parse_labels = [](const nlohmann::json& arr) {
      std::vector<InductiveLabel> out;
      for (const auto& v : arr) out.push_back(v.get<std::string>() == "new-new" ? InductiveLabel::kNewNew : InductiveLabel::kNewOld);
      return out;
    };
    s.val_labels = parse_labels(m.value("val_inductive_labels", nlohmann::json::array()));
    s.test_labels = parse_labels(m.value("test_inductive_labels", nlohmann::json::array()));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("split manifest schema violation: " + std::string(e.what()));
  }
  s.train_negatives = read_negatives((fs::path(dir) / "train_neg.csv").string());
  s.val_negatives = read_negatives((fs::path(dir) / "val_neg.csv").string());
  s.test_negatives = read_negatives((fs::path(dir) / "test_neg.csv").string());
  if (s.train_negatives.size() != s.train.size() || s.val_negatives.size() != s.val.size() ||
      s.test_negatives.size() != s.test.size()) {
    throw DataError("negative lists are not paired 1:1 with positives");
  }
  return s;
}

}  // namespace ctwalks

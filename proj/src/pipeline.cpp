#include "ctwalks/pipeline.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "ctwalks/anonymizer.hpp"
#include "ctwalks/metrics.hpp"
#include "ctwalks/rng.hpp"

namespace ctwalks {

namespace {

// Seed stream tags, so each consumer draws from its own sequence.
enum : std::uint64_t {
  kTagMask = 1,
  kTagNegatives,
  kTagLouvain,
  kTagExtend,
  kTagInit,
  kTagTrainWalks,
  kTagEvalWalks,
  kTagShuffle,
};

using nlohmann::json;

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type: " + e.what());
  }
}

std::uint64_t eval_seed(std::uint64_t seed, std::uint64_t split, std::size_t index, bool negative) {
  return derive_seed(seed, {kTagEvalWalks, split, index, negative ? 1u : 0u});
}

std::uint64_t split_id(const std::string& split) {
  if (split == "train") return 0;
  if (split == "val") return 1;
  if (split == "test") return 2;
  throw std::invalid_argument("unknown split '" + split + "'");
}

const EventStream& split_events(const DatasetSplits& s, const std::string& split) {
  if (split == "train") return s.train;
  if (split == "val") return s.val;
  if (split == "test") return s.test;
  throw std::invalid_argument("unknown split '" + split + "'");
}

const std::vector<NegativeEdge>& split_negatives(const DatasetSplits& s, const std::string& split) {
  if (split == "train") return s.train_negatives;
  if (split == "val") return s.val_negatives;
  if (split == "test") return s.test_negatives;
  throw std::invalid_argument("unknown split '" + split + "'");
}

template <typename P>
std::vector<std::pair<double*, Eigen::Index>> tensor_views(P& p) {
  std::vector<std::pair<double*, Eigen::Index>> out;
  for_each_tensor(p, [&](std::string_view, auto* data, Eigen::Index r, Eigen::Index c) {
    out.emplace_back(const_cast<double*>(data), r * c);
  });
  return out;
}

}  // namespace

WalkPolicy RunConfig::walk_policy() const {
  if (no_community_walk || (no_intra && no_inter)) return WalkPolicy::kUnrestricted;
  if (no_intra) return WalkPolicy::kNoIntra;
  if (no_inter) return WalkPolicy::kNoInter;
  return WalkPolicy::kCommunity;
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "walk_length", "walks_per_node", "hidden", "community_dim", "step_size", "log_time", "time_scale",
      "learning_rate", "batch_size", "max_epochs", "patience", "seed", "ratios", "task", "inductive_fraction",
      "use_edge_attrs", "no_intra", "no_inter", "no_community_walk", "no_community_label", "no_continuous",
      "shuffle_labels", "data", "out_dir", "checkpoint"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  RunConfig c;
  read_key(j, "walk_length", c.walk_length);
  read_key(j, "walks_per_node", c.walks_per_node);
  read_key(j, "hidden", c.hidden);
  read_key(j, "community_dim", c.community_dim);
  read_key(j, "step_size", c.step_size);
  read_key(j, "log_time", c.log_time);
  read_key(j, "time_scale", c.time_scale);
  read_key(j, "learning_rate", c.learning_rate);
  read_key(j, "batch_size", c.batch_size);
  read_key(j, "max_epochs", c.max_epochs);
  read_key(j, "patience", c.patience);
  read_key(j, "seed", c.seed);
  read_key(j, "ratios", c.ratios);
  std::string task = "transductive";
  read_key(j, "task", task);
  if (task == "transductive") {
    c.task = TaskMode::kTransductive;
  } else if (task == "inductive") {
    c.task = TaskMode::kInductive;
  } else {
    throw ConfigError("task must be 'transductive' or 'inductive', got '" + task + "'");
  }
  read_key(j, "inductive_fraction", c.inductive_fraction);
  read_key(j, "use_edge_attrs", c.use_edge_attrs);
  read_key(j, "no_intra", c.no_intra);
  read_key(j, "no_inter", c.no_inter);
  read_key(j, "no_community_walk", c.no_community_walk);
  read_key(j, "no_community_label", c.no_community_label);
  read_key(j, "no_continuous", c.no_continuous);
  read_key(j, "shuffle_labels", c.shuffle_labels);
  read_key(j, "data", c.data_path);
  read_key(j, "out_dir", c.out_dir);
  read_key(j, "checkpoint", c.checkpoint);

  if (c.walk_length < 1) throw ConfigError("walk_length must be at least 1");
  if (c.walks_per_node < 1) throw ConfigError("walks_per_node must be at least 1");
  if (c.hidden < 1 || c.community_dim < 1) throw ConfigError("hidden and community_dim must be positive");
  if (!(c.step_size > 0 && c.step_size <= 1)) throw ConfigError("step_size must lie in (0, 1]");
  if (std::abs(1.0 / c.step_size - std::round(1.0 / c.step_size)) > 1e-9) {
    throw ConfigError("1/step_size must be an integer");
  }
  if (!(c.time_scale > 0)) throw ConfigError("time_scale must be positive");
  if (!(c.learning_rate > 0)) throw ConfigError("learning_rate must be positive");
  if (c.batch_size < 1 || c.max_epochs < 1 || c.patience < 1) {
    throw ConfigError("batch_size, max_epochs and patience must be positive");
  }
  if (!(c.inductive_fraction > 0 && c.inductive_fraction < 1)) {
    throw ConfigError("inductive_fraction must lie in (0, 1)");
  }
  for (double r : c.ratios) {
    if (!(r > 0)) throw ConfigError("split ratios must be positive");
  }
  if (std::abs(c.ratios[0] + c.ratios[1] + c.ratios[2] - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

namespace {

json config_json(const RunConfig& c, bool with_paths) {
  json j;
  j["walk_length"] = c.walk_length;
  j["walks_per_node"] = c.walks_per_node;
  j["hidden"] = c.hidden;
  j["community_dim"] = c.community_dim;
  j["step_size"] = c.step_size;
  j["log_time"] = c.log_time;
  j["time_scale"] = c.time_scale;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["max_epochs"] = c.max_epochs;
  j["patience"] = c.patience;
  j["seed"] = c.seed;
  j["ratios"] = c.ratios;
  j["task"] = c.task == TaskMode::kTransductive ? "transductive" : "inductive";
  j["inductive_fraction"] = c.inductive_fraction;
  j["use_edge_attrs"] = c.use_edge_attrs;
  j["no_intra"] = c.no_intra;
  j["no_inter"] = c.no_inter;
  j["no_community_walk"] = c.no_community_walk;
  j["no_community_label"] = c.no_community_label;
  j["no_continuous"] = c.no_continuous;
  j["shuffle_labels"] = c.shuffle_labels;
  if (with_paths) {
    j["data"] = c.data_path;
    j["out_dir"] = c.out_dir;
    j["checkpoint"] = c.checkpoint;
  }
  return j;
}

}  // namespace

std::string config_to_json(const RunConfig& config) { return config_json(config, true).dump(2); }

void apply_env_overrides(RunConfig& config) {
  const char* env = std::getenv("CTWALKS_SEED");
  if (!env || !*env) return;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (errno != 0 || *end != '\0' || env[0] == '-') throw ConfigError("CTWALKS_SEED must be an unsigned integer");
  config.seed = v;
}

std::string config_digest(const RunConfig& config) {
  // FNV-1a over the canonical (key-sorted) dump.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_json(config, false).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string report_to_json(const MetricsReport& report) {
  json j;
  j["seed"] = report.seed;
  j["config_digest"] = report.config_digest;
  j["epochs_run"] = report.epochs_run;
  j["best_epoch"] = report.best_epoch;
  j["loss_trace"] = report.loss_trace;
  j["val_auc_trace"] = report.val_auc_trace;
  json results = json::array();
  for (const auto& t : report.tasks) {
    results.push_back({{"task", t.task},
                       {"auc", t.auc},
                       {"ap", t.ap},
                       {"count", t.count},
                       {"epochs_run", report.epochs_run},
                       {"best_epoch", report.best_epoch},
                       {"seed", report.seed},
                       {"config_digest", report.config_digest}});
  }
  j["results"] = results;
  return j.dump(2);
}

PreparedData prepare_data(const EventStream& stream, const RunConfig& config) {
  PreparedData d;
  d.stream = stream;
  if (config.task == TaskMode::kTransductive) {
    d.splits = chronological_split(stream, config.ratios);
  } else {
    d.splits = mask_inductive_nodes(stream, config.inductive_fraction, derive_seed(config.seed, {kTagMask}),
                                    config.ratios);
  }
  d.splits.seed = config.seed;
  attach_negatives(d.splits, EdgeSet(stream), stream.node_count, derive_seed(config.seed, {kTagNegatives}));
  const auto weighted = build_weighted_graph(d.splits.train);
  d.partition = louvain(weighted, {derive_seed(config.seed, {kTagLouvain}), 1e-7});
  d.eval_partition = extend_partition(d.partition, stream, derive_seed(config.seed, {kTagExtend}));
  d.train_graphs = derive_subgraphs(d.splits.train, d.partition);
  d.eval_graphs = derive_subgraphs(d.stream, d.eval_partition);
  return d;
}

EncoderShape shape_for(const RunConfig& config, const PreparedData& data) {
  EncoderShape s;
  s.hidden = config.hidden;
  s.community_dim = config.community_dim;
  s.walk_length = config.walk_length;
  s.attr_width = config.use_edge_attrs ? data.stream.attr_width : 0;
  s.communities = data.partition.k;
  return s;
}

EncoderOptions options_for(const RunConfig& config) {
  EncoderOptions o;
  o.solver.step_size = config.step_size;
  o.solver.log_time = config.log_time;
  o.use_community_labels = !config.no_community_label;
  o.continuous = !config.no_continuous;
  o.count_scale = 1.0 / static_cast<double>(config.walks_per_node);
  return o;
}

InteractionFeaturizer::InteractionFeaturizer(const RunConfig& config, const EncoderShape& shape,
                                             const EncoderOptions& opts, const CommunityGraphs& graphs,
                                             const CommunityPartition& partition, const EventStream& indexed)
    : shape_(shape), opts_(opts), attrs_(shape.attr_width > 0), graphs_(graphs), partition_(partition),
      indexed_(indexed) {
  sampler_.walk_length = config.walk_length;
  sampler_.walks_per_node = config.walks_per_node;
  sampler_.time_scale = config.time_scale;
  sampler_.policy = config.walk_policy();
}

InteractionFeatures InteractionFeaturizer::operator()(const Interaction& x, std::uint64_t seed) const {
  const WalkSet walks = sample_walk_sets(x.u, x.v, x.t, graphs_, sampler_, seed);
  const auto anon = anonymize_walks(walks, partition_.of(x.u), partition_.of(x.v), shape_.walk_length);
  const std::size_t r = walks.source.size();
  InteractionFeatures out;
  std::vector<std::vector<double>> extras;
  for (std::size_t j = 0; j < anon.size(); ++j) {
    if (attrs_) {
      const TemporalWalk& raw = j < r ? walks.source[j] : walks.target[j - r];
      extras.assign(shape_.walk_length, std::vector<double>(shape_.attr_width, 0.0));
      // The root has no incoming edge; step i arrived through event_index.
      for (std::size_t i = 1; i < raw.steps.size(); ++i) {
        extras[i] = indexed_.events.at(static_cast<std::size_t>(raw.steps[i].event_index)).attrs;
      }
    }
    auto f = make_walk_features(anon[j], shape_, opts_, extras);
    auto hit = std::find(out.walks.begin(), out.walks.end(), f);
    if (hit == out.walks.end()) {
      out.walks.push_back(std::move(f));
      out.weights.push_back(1.0);
    } else {
      out.weights[static_cast<std::size_t>(hit - out.walks.begin())] += 1.0;
    }
  }
  for (double& w : out.weights) w /= static_cast<double>(anon.size());
  return out;
}

namespace {

std::vector<WalkFeatures> flatten(std::span<const InteractionFeatures> batch, std::vector<std::size_t>& offsets) {
  std::vector<WalkFeatures> all;
  offsets.clear();
  for (const auto& x : batch) {
    if (x.walks.empty()) throw std::invalid_argument("interaction without walks");
    offsets.push_back(all.size());
    all.insert(all.end(), x.walks.begin(), x.walks.end());
  }
  offsets.push_back(all.size());
  return all;
}

Vector pooled_of(const Matrix& h, const InteractionFeatures& x, std::size_t offset) {
  Vector pooled = Vector::Zero(h.rows());
  for (std::size_t j = 0; j < x.walks.size(); ++j) pooled += x.weights[j] * h.col(static_cast<Eigen::Index>(offset + j));
  return pooled;
}

}  // namespace

std::vector<double> score_logits(const EncoderParams& params, const EncoderOptions& opts,
                                 std::span<const InteractionFeatures> batch) {
  std::vector<std::size_t> offsets;
  const auto all = flatten(batch, offsets);
  BatchEncoder enc(params, opts);
  const Matrix h = enc.forward(all, false);
  std::vector<double> logits;
  logits.reserve(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    logits.push_back(classifier_logit(pooled_of(h, batch[b], offsets[b]), params.classifier));
  }
  return logits;
}

double loss_and_gradients(const EncoderParams& params, const EncoderOptions& opts,
                          std::span<const InteractionFeatures> batch, std::span<const double> labels,
                          EncoderParams& grads) {
  if (labels.size() != batch.size()) throw std::invalid_argument("one label per interaction");
  std::vector<std::size_t> offsets;
  const auto all = flatten(batch, offsets);
  BatchEncoder enc(params, opts);
  const Matrix h = enc.forward(all, true);
  Matrix g_h = Matrix::Zero(h.rows(), h.cols());
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  ScoreTape tape;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const double logit = classifier_logit(pooled_of(h, batch[b], offsets[b]), params.classifier, &tape);
    loss += bce_with_logit(logit, labels[b]) * inv_b;
    const double g_logit = (sigmoid(logit) - labels[b]) * inv_b;
    const Vector g_pooled = classifier_backward(tape, g_logit, params.classifier, grads.classifier);
    for (std::size_t j = 0; j < batch[b].walks.size(); ++j) {
      g_h.col(static_cast<Eigen::Index>(offsets[b] + j)) = batch[b].weights[j] * g_pooled;
    }
  }
  enc.backward(g_h, grads);
  return loss;
}

Adam::Adam(const EncoderParams& like, double lr, double beta1, double beta2, double eps)
    : m_(EncoderParams::zeros(like.shape)), v_(EncoderParams::zeros(like.shape)), lr_(lr), beta1_(beta1),
      beta2_(beta2), eps_(eps) {}

void Adam::step(EncoderParams& params, const EncoderParams& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto p = tensor_views(params);
  auto g = tensor_views(grads);
  auto m = tensor_views(m_);
  auto v = tensor_views(v_);
  for (std::size_t k = 0; k < p.size(); ++k) {
    for (Eigen::Index i = 0; i < p[k].second; ++i) {
      const double gi = g[k].first[i];
      double& mi = m[k].first[i];
      double& vi = v[k].first[i];
      mi = beta1_ * mi + (1.0 - beta1_) * gi;
      vi = beta2_ * vi + (1.0 - beta2_) * gi * gi;
      p[k].first[i] -= lr_ * (mi / c1) / (std::sqrt(vi / c2) + eps_);
    }
  }
}

namespace {

constexpr std::size_t kScoreChunk = 256;

std::vector<double> score_all(const EncoderParams& params, const EncoderOptions& opts,
                              const std::vector<InteractionFeatures>& features) {
  std::vector<double> out;
  out.reserve(features.size());
  for (std::size_t b = 0; b < features.size(); b += kScoreChunk) {
    const std::size_t e = std::min(features.size(), b + kScoreChunk);
    const auto part = score_logits(params, opts, std::span(features).subspan(b, e - b));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// Positives then negatives of `indices`, featurized on the evaluation graphs.
std::vector<InteractionFeatures> featurize_split(const InteractionFeaturizer& feat, const RunConfig& config,
                                                 const PreparedData& data, const std::string& split,
                                                 std::span<const std::size_t> indices) {
  const auto& pos = split_events(data.splits, split);
  const auto& neg = split_negatives(data.splits, split);
  if (neg.size() != pos.size()) throw std::logic_error("negatives are not paired with positives");
  const std::uint64_t sid = split_id(split);
  std::vector<InteractionFeatures> out;
  out.reserve(2 * indices.size());
  for (std::size_t i : indices) {
    const Event& e = pos.events.at(i);
    out.push_back(feat({e.u, e.v, e.t}, eval_seed(config.seed, sid, i, false)));
  }
  for (std::size_t i : indices) {
    const NegativeEdge& n = neg.at(i);
    out.push_back(feat({n.u, n.v, n.t}, eval_seed(config.seed, sid, i, true)));
  }
  return out;
}

template <typename T>
void permute(std::vector<T>& xs, SplitMix64& rng) {
  for (std::size_t i = xs.size(); i > 1; --i) std::swap(xs[i - 1], xs[rng.below(i)]);
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

TrainResult train(const RunConfig& config, const PreparedData& data) {
  const auto start = std::chrono::steady_clock::now();
  const EncoderShape shape = shape_for(config, data);
  const EncoderOptions opts = options_for(config);
  const auto& train_events = data.splits.train;
  if (train_events.empty()) throw std::invalid_argument("training split is empty");
  if (data.splits.train_negatives.size() != train_events.size()) throw std::logic_error("unpaired train negatives");

  EncoderParams params = EncoderParams::initialized(shape, derive_seed(config.seed, {kTagInit}));
  Adam adam(params, config.learning_rate);

  const InteractionFeaturizer train_feat(config, shape, opts, data.train_graphs, data.partition, train_events);
  const InteractionFeaturizer eval_feat(config, shape, opts, data.eval_graphs, data.eval_partition, data.stream);

  const std::size_t n = train_events.size();
  // labels[i] for positive i, labels[n + i] for its negative.
  std::vector<double> labels(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = 1.0;
    labels[n + i] = 0.0;
  }
  const auto val_idx = all_indices(data.splits.val.size());
  const auto val_features = featurize_split(eval_feat, config, data, "val", val_idx);
  std::vector<int> val_labels(val_features.size());
  for (std::size_t i = 0; i < val_labels.size(); ++i) val_labels[i] = i < val_idx.size() ? 1 : 0;
  if (config.shuffle_labels) {
    SplitMix64 rng(derive_seed(config.seed, {kTagShuffle}));
    permute(labels, rng);
    permute(val_labels, rng);
  }

  TrainResult result;
  result.report.seed = config.seed;
  result.report.config_digest = config_digest(config);
  EncoderParams best = params;
  double best_auc = -1.0;
  std::size_t stale = 0;
  std::vector<InteractionFeatures> batch;
  std::vector<double> batch_labels;
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t b = 0; b < n; b += config.batch_size) {
      const std::size_t e = std::min(n, b + config.batch_size);
      batch.clear();
      batch_labels.clear();
      for (std::size_t i = b; i < e; ++i) {
        const Event& ev = train_events.events[i];
        batch.push_back(train_feat({ev.u, ev.v, ev.t}, derive_seed(config.seed, {kTagTrainWalks, epoch, i, 0u})));
        batch_labels.push_back(labels[i]);
      }
      for (std::size_t i = b; i < e; ++i) {
        const NegativeEdge& ne = data.splits.train_negatives[i];
        batch.push_back(train_feat({ne.u, ne.v, ne.t}, derive_seed(config.seed, {kTagTrainWalks, epoch, i, 1u})));
        batch_labels.push_back(labels[n + i]);
      }
      EncoderParams grads = EncoderParams::zeros(shape);
      double loss = 0.0;
      try {
        loss = loss_and_gradients(params, opts, batch, batch_labels, grads);
      } catch (const DivergenceError& err) {
        throw TrainingDiverged("diverged at epoch " + std::to_string(epoch + 1) + ", batch " +
                               std::to_string(batches) + ": " + err.what());
      }
      if (!std::isfinite(loss)) {
        throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                               std::to_string(batches));
      }
      adam.step(params, grads);
      epoch_loss += loss;
      ++batches;
    }
    result.report.loss_trace.push_back(epoch_loss / static_cast<double>(batches));
    result.report.epochs_run = epoch + 1;

    const auto scores = score_all(params, opts, val_features);
    const double auc = roc_auc(scores, val_labels);
    result.report.val_auc_trace.push_back(auc);
    if (auc > best_auc) {
      best_auc = auc;
      best = params;
      result.report.best_epoch = epoch + 1;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  result.params = std::move(best);
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

TaskMetrics evaluate(const EncoderParams& params, const RunConfig& config, const PreparedData& data,
                     const std::string& split, const std::string& task, std::span<const std::size_t> subset) {
  const EncoderShape shape = shape_for(config, data);
  if (!(params.shape == shape)) throw ConfigError("checkpoint shape does not match the configured model");
  const EncoderOptions opts = options_for(config);
  const InteractionFeaturizer feat(config, shape, opts, data.eval_graphs, data.eval_partition, data.stream);
  const auto idx = subset.empty() ? all_indices(split_events(data.splits, split).size())
                                  : std::vector<std::size_t>(subset.begin(), subset.end());
  const auto features = featurize_split(feat, config, data, split, idx);
  const auto scores = score_all(params, opts, features);
  std::vector<int> labels(scores.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i < idx.size() ? 1 : 0;
  TaskMetrics m;
  m.task = task;
  m.auc = roc_auc(scores, labels);
  m.ap = average_precision(scores, labels);
  m.count = idx.size();
  return m;
}

std::vector<TaskMetrics> evaluate_test(const EncoderParams& params, const RunConfig& config,
                                       const PreparedData& data) {
  if (config.task == TaskMode::kTransductive) return {evaluate(params, config, data, "test", "transductive")};
  std::vector<std::size_t> new_new, new_old;
  for (std::size_t i = 0; i < data.splits.test_labels.size(); ++i) {
    (data.splits.test_labels[i] == InductiveLabel::kNewNew ? new_new : new_old).push_back(i);
  }
  std::vector<TaskMetrics> out;
  if (!new_new.empty()) out.push_back(evaluate(params, config, data, "test", "inductive_new_new", new_new));
  if (!new_old.empty()) out.push_back(evaluate(params, config, data, "test", "inductive_new_old", new_old));
  return out;
}

TrainResult run_experiment(const RunConfig& config, const EventStream& stream) {
  const auto start = std::chrono::steady_clock::now();
  const PreparedData data = prepare_data(stream, config);
  TrainResult result = train(config, data);
  result.report.tasks = evaluate_test(result.params, config, data);
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace ctwalks

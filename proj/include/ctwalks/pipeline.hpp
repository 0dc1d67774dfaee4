#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctwalks/community.hpp"
#include "ctwalks/encoder.hpp"
#include "ctwalks/graph_store.hpp"
#include "ctwalks/sampler.hpp"

namespace ctwalks {

/// Raised for configuration problems (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when training produces a non-finite loss.
class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TaskMode { kTransductive, kInductive };

struct RunConfig {
  std::size_t walk_length = 2;
  std::size_t walks_per_node = 16;
  std::size_t hidden = 32;
  std::size_t community_dim = 8;
  double step_size = 0.125;
  bool log_time = true;
  double time_scale = 1.0;
  double learning_rate = 1e-4;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 50;
  std::size_t patience = 3;
  std::uint64_t seed = 0;
  SplitRatios ratios = kDefaultRatios;
  TaskMode task = TaskMode::kTransductive;
  double inductive_fraction = 0.1;
  bool use_edge_attrs = true;

  // ablations
  bool no_intra = false;
  bool no_inter = false;
  bool no_community_walk = false;
  bool no_community_label = false;
  bool no_continuous = false;
  /// Control run: train and validation labels are randomly permuted.
  bool shuffle_labels = false;

  std::string data_path;
  std::string out_dir = "run";
  /// Defaults to <out_dir>/model.ckpt.
  std::string checkpoint;

  std::string checkpoint_path() const { return checkpoint.empty() ? out_dir + "/model.ckpt" : checkpoint; }
  WalkPolicy walk_policy() const;
};

/// Parse a JSON config; unknown keys and wrong types raise ConfigError.
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& config);
/// Apply CTWALKS_SEED when set.
void apply_env_overrides(RunConfig& config);
/// Stable 64-bit digest (hex) of the canonical config JSON, excluding paths.
std::string config_digest(const RunConfig& config);

struct TaskMetrics {
  std::string task;
  double auc = 0.0;
  double ap = 0.0;
  std::size_t count = 0;
};

struct MetricsReport {
  std::vector<TaskMetrics> tasks;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<double> loss_trace;
  std::vector<double> val_auc_trace;
  /// Not serialized, so reports stay byte-identical across reruns.
  double wall_seconds = 0.0;
};

std::string report_to_json(const MetricsReport& report);

/// Everything derived from the raw stream before training.
struct PreparedData {
  EventStream stream;
  DatasetSplits splits;
  CommunityPartition partition;       // train events only
  CommunityPartition eval_partition;  // extended to every node
  CommunityGraphs train_graphs;       // indexes into splits.train
  CommunityGraphs eval_graphs;        // indexes into stream
};

PreparedData prepare_data(const EventStream& stream, const RunConfig& config);

/// Walks of one interaction after exact deduplication. `weights` sum to 1.
struct InteractionFeatures {
  std::vector<WalkFeatures> walks;
  std::vector<double> weights;
};

struct Interaction {
  NodeId u = 0;
  NodeId v = 0;
  Timestamp t = 0.0;
};

/// Samples, anonymizes and featurizes walk sets against one set of graphs.
class InteractionFeaturizer {
 public:
  InteractionFeaturizer(const RunConfig& config, const EncoderShape& shape, const EncoderOptions& opts,
                        const CommunityGraphs& graphs, const CommunityPartition& partition,
                        const EventStream& indexed);

  InteractionFeatures operator()(const Interaction& x, std::uint64_t seed) const;

 private:
  SamplerConfig sampler_;
  EncoderShape shape_;
  EncoderOptions opts_;
  bool attrs_;
  const CommunityGraphs& graphs_;
  const CommunityPartition& partition_;
  const EventStream& indexed_;
};

EncoderShape shape_for(const RunConfig& config, const PreparedData& data);
EncoderOptions options_for(const RunConfig& config);

/// Forward the batch and return one logit per interaction.
std::vector<double> score_logits(const EncoderParams& params, const EncoderOptions& opts,
                                 std::span<const InteractionFeatures> batch);

/// Mean BCE of the batch; gradients are accumulated into `grads`.
double loss_and_gradients(const EncoderParams& params, const EncoderOptions& opts,
                          std::span<const InteractionFeatures> batch, std::span<const double> labels,
                          EncoderParams& grads);

/// Adam with bias correction over every parameter tensor.
class Adam {
 public:
  Adam(const EncoderParams& like, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(EncoderParams& params, const EncoderParams& grads);

 private:
  EncoderParams m_, v_;
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
};

struct TrainResult {
  EncoderParams params;
  MetricsReport report;
};

TrainResult train(const RunConfig& config, const PreparedData& data);

/// Score a split's positives and paired negatives. `subset` selects positive
/// indices (and their negatives); empty means all.
TaskMetrics evaluate(const EncoderParams& params, const RunConfig& config, const PreparedData& data,
                     const std::string& split, const std::string& task, std::span<const std::size_t> subset = {});

/// Test-split metrics for the configured task mode.
std::vector<TaskMetrics> evaluate_test(const EncoderParams& params, const RunConfig& config,
                                       const PreparedData& data);

/// prepare, train, evaluate on test.
TrainResult run_experiment(const RunConfig& config, const EventStream& stream);

}  // namespace ctwalks

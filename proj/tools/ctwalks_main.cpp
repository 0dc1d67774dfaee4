// Command line front end: stats, split, communities, train, eval, oracle, synth.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctwalks/community.hpp"
#include "ctwalks/encoder.hpp"
#include "ctwalks/graph_store.hpp"
#include "ctwalks/pipeline.hpp"
#include "ctwalks/synthetic.hpp"
#include "ctwalks/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ctwalks;

namespace {

// Validation problems map to exit code 1, everything else to 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ValidationError(what + " path is empty");
  if (!fs::exists(path)) throw ValidationError(what + " '" + path + "' does not exist");
}

EventStream read_stream(const std::string& path, IngestReport* report = nullptr) {
  require_file(path, "event file");
  return ingest_file(path, {}, report);
}

RunConfig run_config(const std::string& path, std::optional<std::uint64_t> seed) {
  require_file(path, "config");
  RunConfig c = load_config(path);
  apply_env_overrides(c);
  if (seed) c.seed = *seed;
  return c;
}

json lemma1_json(const Lemma1Report& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"t", row.t},
                    {"r_community", row.community},
                    {"r_traditional", row.traditional},
                    {"mixed_bound", row.mixed_bound},
                    {"holds", row.holds},
                    {"bound_holds", row.bound_holds},
                    {"equal", row.equal},
                    {"reached_community", row.reached_community},
                    {"reached_traditional", row.reached_traditional},
                    {"reached_holds", row.reached_holds}});
  }
  return {{"u", r.u}, {"v", r.v}, {"all_neighbors_bridging", r.all_neighbors_bridging}, {"holds", r.holds()},
          {"bound_holds", r.bound_holds()}, {"reached_holds", r.reached_holds()}, {"rows", rows}};
}

// Every cross-community pair of bridging nodes in the graph, in id order.
std::vector<std::pair<NodeId, NodeId>> bridging_pairs(const PartitionedGraph& pg) {
  const auto bridging = static_bridging(pg.graph, pg.assignment);
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId a = 0; a < pg.graph.size(); ++a) {
    for (NodeId b = 0; b < pg.graph.size(); ++b) {
      if (bridging[a] && bridging[b] && pg.assignment[a] != pg.assignment[b]) out.emplace_back(a, b);
    }
  }
  return out;
}

json oracle_lemma1(std::size_t trials, std::size_t t_max, std::uint64_t seed) {
  json reports = json::array();
  bool all = true, bound = true, reached = true;
  for (std::size_t i = 0; i < trials; ++i) {
    SplitMix64 rng(derive_seed(seed, {i}));
    const std::size_t n = 6 + rng.below(7);
    const auto pg = random_partitioned_graph(n, 2, 0.5, 0.2, derive_seed(seed, {i, 1u}));
    const auto pairs = bridging_pairs(pg);
    const auto [u, v] = pairs[rng.below(pairs.size())];
    const auto r = check_lemma1(pg.graph, pg.assignment, u, v, t_max);
    all = all && r.holds();
    bound = bound && r.bound_holds();
    reached = reached && r.reached_holds();
    auto j = lemma1_json(r);
    j["nodes"] = n;
    reports.push_back(j);
  }
  const auto bar = barbell_fixture();
  const auto barbell = check_lemma1(bar.graph, bar.assignment, 2, 3, t_max);
  return {{"check", "lemma1"}, {"holds", all && barbell.holds()}, {"bound_holds", bound && barbell.bound_holds()},
          {"reached_holds", reached && barbell.reached_holds()},
          {"barbell", lemma1_json(barbell)},
          {"random", reports}};
}

json oracle_matrices(std::size_t trials, std::size_t window, double k, std::uint64_t seed) {
  json out = json::array();
  bool all = true;
  for (std::size_t i = 0; i < trials; ++i) {
    SplitMix64 rng(derive_seed(seed, {i}));
    const std::size_t communities = 2 + rng.below(3);
    const std::size_t n = 2 * communities + rng.below(9);
    const auto pg = random_partitioned_graph(n, communities, 0.6, 0.15, derive_seed(seed, {i, 1u}));
    const auto m = build_matrices(pg.graph, pg.assignment);
    double worst_intra = 0.0, worst_inter = 0.0;
    for (Eigen::Index r = 0; r < m.M_I.rows(); ++r) {
      const bool isolated = std::find(m.isolated_in_block.begin(), m.isolated_in_block.end(), r) !=
                            m.isolated_in_block.end();
      worst_intra = std::max(worst_intra, std::abs(m.M_I.row(r).sum() - (isolated ? 0.0 : 1.0)));
      worst_inter = std::max(worst_inter, std::abs(m.M_C.row(r).sum() - (m.bridging[r] ? 1.0 : 0.0)));
    }
    const auto base = pmi_target(m, window, k);
    const auto doubled = pmi_target(m, window, 2 * k);
    double worst_shift = 0.0;
    for (Eigen::Index r = 0; r < base.values.rows(); ++r) {
      for (Eigen::Index c = 0; c < base.values.cols(); ++c) {
        if (!base.defined(r, c)) continue;
        worst_shift = std::max(worst_shift, std::abs(base.values(r, c) - doubled.values(r, c) - std::log(2.0)));
      }
    }
    const bool ok = worst_intra <= 1e-12 && worst_inter <= 1e-12 && worst_shift <= 1e-12;
    all = all && ok;
    out.push_back({{"nodes", n},
                   {"communities", communities},
                   {"intra_row_error", worst_intra},
                   {"inter_row_error", worst_inter},
                   {"shift_error", worst_shift},
                   {"ok", ok}});
  }
  return {{"check", "matrices"}, {"holds", all}, {"trials", out}};
}

int run(int argc, char** argv) {
  CLI::App app{"Community-aware temporal walks for link prediction"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  std::string out_path;

  auto* stats = app.add_subcommand("stats", "Dataset statistics as JSON");
  std::string stats_file;
  stats->add_option("file", stats_file, "Event file")->required();
  stats->add_option("--out", out_path, "Write the report here instead of stdout");

  auto* split = app.add_subcommand("split", "Chronological or inductive split with negatives");
  std::string split_file, split_dir;
  double inductive = 0.0;
  SplitRatios ratios = kDefaultRatios;
  split->add_option("file", split_file, "Event file")->required();
  split->add_option("--dir", split_dir, "Output directory")->required();
  split->add_option("--seed", seed, "Seed");
  split->add_option("--inductive", inductive, "Mask this fraction of nodes (0 disables)");
  split->add_option("--ratios", ratios, "Train, val and test ratios")->expected(3);

  auto* comm = app.add_subcommand("communities", "Louvain partition of the train split");
  std::string comm_file;
  comm->add_option("file", comm_file, "Event file")->required();
  comm->add_option("--seed", seed, "Seed");
  comm->add_option("--ratios", ratios, "Train, val and test ratios")->expected(3);
  comm->add_option("--out", out_path, "Write the partition here instead of stdout");

  std::string config_path, checkpoint;
  auto* train_cmd = app.add_subcommand("train", "Train and evaluate on the test split");
  train_cmd->add_option("--config", config_path, "Run config (JSON)")->required();
  train_cmd->add_option("--seed", seed, "Seed (overrides config and CTWALKS_SEED)");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a trained checkpoint on the test split");
  eval_cmd->add_option("--config", config_path, "Run config (JSON)")->required();
  eval_cmd->add_option("--seed", seed, "Seed (overrides config and CTWALKS_SEED)");
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint (default <out_dir>/model.ckpt)");

  auto* oracle = app.add_subcommand("oracle", "First-passage and transition-matrix checks");
  std::string check;
  std::size_t trials = 0, t_max = 6, window = 3;
  double negatives = 5.0;
  oracle->add_option("check", check, "lemma1 | matrices")->required()->check(CLI::IsMember({"lemma1", "matrices"}));
  oracle->add_option("--trials", trials, "Random trials (default 50 for lemma1, 20 for matrices)");
  oracle->add_option("--t-max", t_max, "Longest first-passage time");
  oracle->add_option("--window", window, "Window T of the matrix sum");
  oracle->add_option("--negatives", negatives, "Negative samples k");
  oracle->add_option("--seed", seed, "Seed");
  oracle->add_option("--out", out_path, "Write the report here instead of stdout");

  auto* synth = app.add_subcommand("synth", "Write a planted-community event stream");
  PlantedConfig planted;
  std::string synth_out;
  synth->add_option("--out", synth_out, "Output CSV")->required();
  synth->add_option("--communities", planted.communities, "Community count");
  synth->add_option("--size", planted.community_size, "Nodes per community");
  synth->add_option("--events", planted.events, "Event count");
  synth->add_option("--ratio", planted.intra_inter_ratio, "Per-pair intra/inter rate ratio");
  synth->add_option("--duration", planted.duration, "Time span");
  synth->add_option("--seed", seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (stats->parsed()) {
    IngestReport report;
    const auto stream = read_stream(stats_file, &report);
    const auto s = compute_stats(stream);
    emit({{"file", stats_file},
          {"nodes", s.node_count},
          {"events", s.edge_count},
          {"duration", s.duration},
          {"intensity", s.intensity},
          {"self_loops_rejected", report.self_loops_rejected},
          {"header_skipped", report.header_skipped}},
         out_path);
  } else if (split->parsed()) {
    const auto stream = read_stream(split_file);
    const std::uint64_t s = seed.value_or(0);
    DatasetSplits splits = inductive > 0 ? mask_inductive_nodes(stream, inductive, s, ratios)
                                         : chronological_split(stream, ratios);
    splits.seed = s;
    attach_negatives(splits, EdgeSet(stream), stream.node_count, s);
    fs::create_directories(split_dir);
    save_splits(splits, split_dir);
    emit({{"dir", split_dir},
          {"train", splits.train.size()},
          {"val", splits.val.size()},
          {"test", splits.test.size()},
          {"masked_nodes", splits.masked_nodes.size()}},
         "");
  } else if (comm->parsed()) {
    const auto stream = read_stream(comm_file);
    const auto splits = chronological_split(stream, ratios);
    const auto graph = build_weighted_graph(splits.train);
    const auto partition = louvain(graph, {seed.value_or(0), 1e-7});
    const auto flags = bridging_nodes(graph, partition);
    std::vector<NodeId> bridging;
    for (NodeId n = 0; n < flags.size(); ++n) {
      if (flags[n]) bridging.push_back(n);
    }
    emit(json::parse(partition_to_json(partition, bridging)), out_path);
  } else if (train_cmd->parsed()) {
    const RunConfig config = run_config(config_path, seed);
    const auto stream = read_stream(config.data_path);
    const auto data = prepare_data(stream, config);
    auto result = train(config, data);
    result.report.tasks = evaluate_test(result.params, config, data);
    fs::create_directories(config.out_dir);
    const json extra = {{"config_digest", result.report.config_digest},
                        {"epochs_run", result.report.epochs_run},
                        {"best_epoch", result.report.best_epoch}};
    save_checkpoint(config.checkpoint_path(), result.params, options_for(config), config.seed, extra.dump());
    const std::string report = report_to_json(result.report);
    std::ofstream(config.out_dir + "/metrics.json") << report << "\n";
    std::ofstream(config.out_dir + "/partition.json")
        << partition_to_json(data.partition, data.train_graphs.bridging) << "\n";
    std::cout << report << "\n";
    std::cerr << "wall-clock " << result.report.wall_seconds << " s\n";
  } else if (eval_cmd->parsed()) {
    RunConfig config = run_config(config_path, seed);
    if (!checkpoint.empty()) config.checkpoint = checkpoint;
    const std::string ckpt = config.checkpoint_path();
    if (!fs::exists(ckpt)) throw ValidationError("checkpoint '" + ckpt + "' not found; run train first");
    std::string header;
    const auto params = load_checkpoint(ckpt, nullptr, &header);
    const auto stream = read_stream(config.data_path);
    const auto data = prepare_data(stream, config);
    MetricsReport report;
    const auto extra = json::parse(header).at("extra");
    report.seed = config.seed;
    report.config_digest = config_digest(config);
    if (extra.value("config_digest", "") != report.config_digest) {
      throw ValidationError("checkpoint was trained with a different config (digest " +
                            extra.value("config_digest", "?") + ")");
    }
    report.epochs_run = extra.value("epochs_run", std::size_t{0});
    report.best_epoch = extra.value("best_epoch", std::size_t{0});
    report.tasks = evaluate_test(params, config, data);
    std::cout << report_to_json(report) << "\n";
  } else if (oracle->parsed()) {
    const std::uint64_t s = seed.value_or(0);
    const json report = check == "lemma1" ? oracle_lemma1(trials ? trials : 50, t_max, s)
                                          : oracle_matrices(trials ? trials : 20, window, negatives, s);
    emit(report, out_path);
  } else if (synth->parsed()) {
    planted.seed = seed.value_or(0);
    const auto p = planted_stream(planted);
    std::ofstream out(synth_out);
    if (!out) throw std::runtime_error("cannot write '" + synth_out + "'");
    write_events(out, p.stream);
    emit({{"out", synth_out}, {"nodes", p.stream.node_count}, {"events", p.stream.size()}}, "");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return 2;
  }
}

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ctwalks/community.hpp"

namespace ctwalks {

/// Static, unweighted, undirected simple graph.
class StaticGraph {
 public:
  explicit StaticGraph(std::size_t n = 0) : adj_(n) {}
  static StaticGraph from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges);

  /// Ignores self loops and duplicates.
  void add_edge(NodeId a, NodeId b);
  bool has_edge(NodeId a, NodeId b) const;
  std::size_t size() const { return adj_.size(); }
  std::size_t degree(NodeId n) const { return adj_.at(n).size(); }
  const std::vector<NodeId>& neighbors(NodeId n) const { return adj_.at(n); }

 private:
  std::vector<std::vector<NodeId>> adj_;
};

/// Nodes with a neighbor in another community.
std::vector<bool> static_bridging(const StaticGraph& graph, std::span<const CommunityId> assignment);

enum class PassagePolicy {
  kTraditional,  // uniform over all neighbors
  kCommunity,    // bridging roots move over bridging neighbors, others stay in their community
};

/// r[t][u]: probability that a walk from u first reaches the target at step t.
/// Row 0 is all zero; rows 1..t_max hold the recursion.
struct FirstPassageTable {
  NodeId target = 0;
  std::vector<std::vector<double>> r;

  double at(std::size_t t, NodeId u) const { return r.at(t).at(u); }
  std::size_t t_max() const { return r.empty() ? 0 : r.size() - 1; }
};

/// Exact first-passage dynamic program. Under the community policy the walk
/// regime is fixed by its root: a bridging root walks the bridging subgraph,
/// any other root walks its own community.
FirstPassageTable first_passage(const StaticGraph& graph, NodeId target, std::size_t t_max, PassagePolicy policy,
                                std::span<const CommunityId> assignment = {});

struct Lemma1Row {
  std::size_t t = 0;
  double community = 0.0;
  double traditional = 0.0;
  /// (1/d(u)) * sum over all neighbors j of the community table at t-1,
  /// i.e. the right-hand side of the inequality as stated.
  double mixed_bound = 0.0;
  /// community >= traditional (full traditional DP).
  bool holds = false;
  /// community >= mixed_bound (the one-step form).
  bool bound_holds = false;
  bool equal = false;
  /// Probability of having reached v within t steps, under each policy.
  double reached_community = 0.0;
  double reached_traditional = 0.0;
  bool reached_holds = false;
};

struct Lemma1Report {
  NodeId u = 0, v = 0;
  bool all_neighbors_bridging = false;
  std::vector<Lemma1Row> rows;
  bool holds() const;
  bool bound_holds() const;
  bool reached_holds() const;
};

/// Compare community and traditional first-passage probabilities from u to v.
/// Throws unless u and v are bridging nodes in different communities.
Lemma1Report check_lemma1(const StaticGraph& graph, std::span<const CommunityId> assignment, NodeId u, NodeId v,
                          std::size_t t_max, double slack = 1e-12);

struct TransitionMatrices {
  Eigen::MatrixXd M_I;
  Eigen::MatrixXd M_C;
  Eigen::VectorXd degree;
  double vol = 0.0;
  std::vector<bool> bridging;
  /// Nodes whose row of M_I is zero because they have no neighbor in their block.
  std::vector<NodeId> isolated_in_block;
};

/// M_I: block-diagonal D_i^-1 A_i. M_C: row-normalized adjacency restricted to
/// bridging nodes, zero elsewhere. Both in global node order.
TransitionMatrices build_matrices(const StaticGraph& graph, std::span<const CommunityId> assignment);

struct PmiTarget {
  Eigen::MatrixXd values;
  /// False where the argument of the log is zero; `values` holds -inf there.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> defined;
};

/// log(vol * (1/T sum_{r=1..T} (M_C^r + M_I^r)) * D^-1) - log k, entry-wise.
PmiTarget pmi_target(const TransitionMatrices& m, std::size_t window, double negatives);

struct PartitionedGraph {
  StaticGraph graph;
  std::vector<CommunityId> assignment;
};

/// Random graph on n nodes split into `communities` contiguous blocks of random
/// sizes (each >= 2): edges inside a block with probability p_in, across with
/// p_out, redrawn until at least one cross edge exists.
PartitionedGraph random_partitioned_graph(std::size_t n, std::size_t communities, double p_in, double p_out,
                                          std::uint64_t seed);

/// Two triangles {0,1,2} and {3,4,5} joined by the edge 2-3.
PartitionedGraph barbell_fixture();

/// (1/T) sum_{r=1..T} M^r by repeated multiplication.
Eigen::MatrixXd mean_power_sum(const Eigen::MatrixXd& m, std::size_t window);

}  // namespace ctwalks

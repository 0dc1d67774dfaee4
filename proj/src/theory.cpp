#include "ctwalks/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ctwalks/rng.hpp"

namespace ctwalks {

StaticGraph StaticGraph::from_edges(std::size_t n, std::span<const std::pair<NodeId, NodeId>> edges) {
  StaticGraph g(n);
  for (const auto& [a, b] : edges) g.add_edge(a, b);
  return g;
}

void StaticGraph::add_edge(NodeId a, NodeId b) {
  if (a >= adj_.size() || b >= adj_.size()) throw std::out_of_range("edge endpoint beyond graph size");
  if (a == b || has_edge(a, b)) return;
  adj_[a].push_back(b);
  adj_[b].push_back(a);
}

bool StaticGraph::has_edge(NodeId a, NodeId b) const {
  const auto& list = adj_.at(a);
  return std::find(list.begin(), list.end(), b) != list.end();
}

namespace {

void check_assignment(const StaticGraph& graph, std::span<const CommunityId> assignment) {
  if (assignment.size() != graph.size()) throw std::invalid_argument("assignment must cover every node");
  for (CommunityId c : assignment) {
    if (c == kUnassigned) throw std::invalid_argument("assignment has an unassigned node");
  }
}

// Transition lists of one walk regime.
using Moves = std::vector<std::vector<NodeId>>;

Moves traditional_moves(const StaticGraph& g) {
  Moves m(g.size());
  for (NodeId x = 0; x < g.size(); ++x) m[x] = g.neighbors(x);
  return m;
}

Moves filtered_moves(const StaticGraph& g, auto keep) {
  Moves m(g.size());
  for (NodeId x = 0; x < g.size(); ++x) {
    for (NodeId j : g.neighbors(x)) {
      if (keep(x, j)) m[x].push_back(j);
    }
  }
  return m;
}

std::vector<std::vector<double>> passage_dp(const Moves& moves, NodeId target, std::size_t t_max) {
  const std::size_t n = moves.size();
  std::vector<std::vector<double>> r(t_max + 1, std::vector<double>(n, 0.0));
  for (std::size_t t = 1; t <= t_max; ++t) {
    for (NodeId x = 0; x < n; ++x) {
      const auto& next = moves[x];
      if (next.empty()) continue;
      double sum = 0.0;
      for (NodeId j : next) {
        if (j == target) {
          if (t == 1) sum += 1.0;
        } else {
          sum += r[t - 1][j];
        }
      }
      r[t][x] = sum / static_cast<double>(next.size());
    }
  }
  return r;
}

}  // namespace

std::vector<bool> static_bridging(const StaticGraph& graph, std::span<const CommunityId> assignment) {
  check_assignment(graph, assignment);
  std::vector<bool> out(graph.size(), false);
  for (NodeId x = 0; x < graph.size(); ++x) {
    for (NodeId j : graph.neighbors(x)) {
      if (assignment[j] != assignment[x]) {
        out[x] = true;
        break;
      }
    }
  }
  return out;
}

FirstPassageTable first_passage(const StaticGraph& graph, NodeId target, std::size_t t_max, PassagePolicy policy,
                                std::span<const CommunityId> assignment) {
  if (t_max < 1) throw std::invalid_argument("t_max must be at least 1");
  if (target >= graph.size()) throw std::out_of_range("target beyond graph size");
  FirstPassageTable table;
  table.target = target;
  if (policy == PassagePolicy::kTraditional) {
    table.r = passage_dp(traditional_moves(graph), target, t_max);
    return table;
  }
  const auto bridging = static_bridging(graph, assignment);
  const auto inter = passage_dp(filtered_moves(graph, [&](NodeId x, NodeId j) { return bridging[x] && bridging[j]; }),
                                target, t_max);
  const auto intra = passage_dp(
      filtered_moves(graph, [&](NodeId x, NodeId j) { return assignment[x] == assignment[j]; }), target, t_max);
  table.r = intra;
  for (std::size_t t = 1; t <= t_max; ++t) {
    for (NodeId x = 0; x < graph.size(); ++x) {
      if (bridging[x]) table.r[t][x] = inter[t][x];
    }
  }
  return table;
}

bool Lemma1Report::holds() const {
  return std::all_of(rows.begin(), rows.end(), [](const Lemma1Row& r) { return r.holds; });
}

bool Lemma1Report::bound_holds() const {
  return std::all_of(rows.begin(), rows.end(), [](const Lemma1Row& r) { return r.bound_holds; });
}

bool Lemma1Report::reached_holds() const {
  return std::all_of(rows.begin(), rows.end(), [](const Lemma1Row& r) { return r.reached_holds; });
}

Lemma1Report check_lemma1(const StaticGraph& graph, std::span<const CommunityId> assignment, NodeId u, NodeId v,
                          std::size_t t_max, double slack) {
  const auto bridging = static_bridging(graph, assignment);
  if (u >= graph.size() || v >= graph.size()) throw std::out_of_range("node beyond graph size");
  if (!bridging[u] || !bridging[v]) throw std::invalid_argument("u and v must both be bridging nodes");
  if (assignment[u] == assignment[v]) throw std::invalid_argument("u and v must lie in different communities");

  const auto comm = first_passage(graph, v, t_max, PassagePolicy::kCommunity, assignment);
  const auto trad = first_passage(graph, v, t_max, PassagePolicy::kTraditional);
  Lemma1Report report;
  report.u = u;
  report.v = v;
  report.all_neighbors_bridging = std::all_of(graph.neighbors(u).begin(), graph.neighbors(u).end(),
                                              [&](NodeId j) { return bridging[j]; });
  const double d = static_cast<double>(graph.degree(u));
  for (std::size_t t = 1; t <= t_max; ++t) {
    Lemma1Row row;
    row.t = t;
    row.community = comm.at(t, u);
    row.traditional = trad.at(t, u);
    double mixed = 0.0;
    for (NodeId j : graph.neighbors(u)) {
      if (j == v) {
        if (t == 1) mixed += 1.0;
      } else {
        mixed += comm.at(t - 1, j);
      }
    }
    row.mixed_bound = d > 0 ? mixed / d : 0.0;
    row.holds = row.community + slack >= row.traditional;
    row.bound_holds = row.community + slack >= row.mixed_bound;
    row.equal = std::abs(row.community - row.traditional) <= slack;
    row.reached_community = (report.rows.empty() ? 0.0 : report.rows.back().reached_community) + row.community;
    row.reached_traditional = (report.rows.empty() ? 0.0 : report.rows.back().reached_traditional) + row.traditional;
    row.reached_holds = row.reached_community + slack >= row.reached_traditional;
    report.rows.push_back(row);
  }
  return report;
}

TransitionMatrices build_matrices(const StaticGraph& graph, std::span<const CommunityId> assignment) {
  check_assignment(graph, assignment);
  const auto n = static_cast<Eigen::Index>(graph.size());
  TransitionMatrices m;
  m.M_I = Eigen::MatrixXd::Zero(n, n);
  m.M_C = Eigen::MatrixXd::Zero(n, n);
  m.degree = Eigen::VectorXd::Zero(n);
  m.bridging = static_bridging(graph, assignment);
  for (NodeId x = 0; x < graph.size(); ++x) {
    m.degree[x] = static_cast<double>(graph.degree(x));
    std::vector<NodeId> block, bridge;
    for (NodeId j : graph.neighbors(x)) {
      if (assignment[j] == assignment[x]) block.push_back(j);
      if (m.bridging[x] && m.bridging[j]) bridge.push_back(j);
    }
    if (block.empty()) m.isolated_in_block.push_back(x);
    for (NodeId j : block) m.M_I(x, j) = 1.0 / static_cast<double>(block.size());
    for (NodeId j : bridge) m.M_C(x, j) = 1.0 / static_cast<double>(bridge.size());
  }
  m.vol = m.degree.sum();
  return m;
}

PartitionedGraph random_partitioned_graph(std::size_t n, std::size_t communities, double p_in, double p_out,
                                          std::uint64_t seed) {
  if (communities < 2 || n < 2 * communities) throw std::invalid_argument("need at least two nodes per community");
  SplitMix64 rng(derive_seed(seed, {0x67726170ULL}));
  for (;;) {
    // Cut points: every block keeps at least two nodes.
    std::vector<std::size_t> sizes(communities, 2);
    for (std::size_t extra = n - 2 * communities; extra > 0; --extra) ++sizes[rng.below(communities)];
    PartitionedGraph out{StaticGraph(n), {}};
    for (std::size_t c = 0; c < communities; ++c) {
      out.assignment.insert(out.assignment.end(), sizes[c], static_cast<CommunityId>(c));
    }
    bool crossing = false;
    for (NodeId a = 0; a < n; ++a) {
      for (NodeId b = a + 1; b < n; ++b) {
        const bool same = out.assignment[a] == out.assignment[b];
        if (rng.uniform() < (same ? p_in : p_out)) {
          out.graph.add_edge(a, b);
          crossing = crossing || !same;
        }
      }
    }
    if (crossing) return out;
  }
}

PartitionedGraph barbell_fixture() {
  const std::vector<std::pair<NodeId, NodeId>> edges = {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {2, 3}};
  return {StaticGraph::from_edges(6, edges), {0, 0, 0, 1, 1, 1}};
}

Eigen::MatrixXd mean_power_sum(const Eigen::MatrixXd& m, std::size_t window) {
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  Eigen::MatrixXd power = m;
  Eigen::MatrixXd sum = m;
  for (std::size_t r = 2; r <= window; ++r) {
    power = power * m;
    sum += power;
  }
  return sum / static_cast<double>(window);
}

PmiTarget pmi_target(const TransitionMatrices& m, std::size_t window, double negatives) {
  if (!(negatives >= 1)) throw std::invalid_argument("negative sample count must be at least 1");
  const Eigen::MatrixXd mix = mean_power_sum(m.M_C, window) + mean_power_sum(m.M_I, window);
  const auto n = mix.rows();
  PmiTarget out;
  out.values.resize(n, n);
  out.defined.resize(n, n);
  const double shift = std::log(negatives);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = m.degree[j];
      const double arg = d > 0 ? m.vol * mix(i, j) / d : 0.0;
      out.defined(i, j) = arg > 0;
      out.values(i, j) = arg > 0 ? std::log(arg) - shift : -std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

}  // namespace ctwalks

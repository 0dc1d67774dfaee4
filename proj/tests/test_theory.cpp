#include <gtest/gtest.h>

#include <cmath>

#include "ctwalks/rng.hpp"
#include "ctwalks/theory.hpp"

using namespace ctwalks;

namespace {

// Simulated first-visit frequencies for t = 1..t_max. Under the community
// policy the allowed moves are fixed by the root.
std::vector<double> simulate_first_visits(const StaticGraph& g, std::span<const CommunityId> assignment, NodeId u,
                                          NodeId v, std::size_t t_max, PassagePolicy policy, int walks,
                                          std::uint64_t seed) {
  std::vector<bool> bridging;
  if (policy == PassagePolicy::kCommunity) bridging = static_bridging(g, assignment);
  const bool root_bridging = policy == PassagePolicy::kCommunity && bridging[u];
  std::vector<double> freq(t_max + 1, 0.0);
  SplitMix64 rng(seed);
  for (int w = 0; w < walks; ++w) {
    NodeId at = u;
    for (std::size_t t = 1; t <= t_max; ++t) {
      std::vector<NodeId> options;
      for (NodeId j : g.neighbors(at)) {
        if (policy == PassagePolicy::kTraditional) options.push_back(j);
        else if (root_bridging ? bridging[j] && bridging[at] : assignment[j] == assignment[at]) options.push_back(j);
      }
      if (options.empty()) break;
      at = options[rng.below(options.size())];
      if (at == v) {
        freq[t] += 1.0 / walks;
        break;
      }
    }
  }
  return freq;
}

StaticGraph path_abc() {
  const std::vector<std::pair<NodeId, NodeId>> e = {{0, 1}, {1, 2}};
  return StaticGraph::from_edges(3, e);
}

}  // namespace

TEST(StaticGraphs, SimpleGraphSemantics) {
  StaticGraph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 0);
  g.add_edge(2, 2);
  EXPECT_EQ(g.degree(0), 1u);
  EXPECT_EQ(g.degree(2), 0u);
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_FALSE(g.has_edge(0, 2));
}

TEST(FirstPassage, PathGraph) {
  const auto g = path_abc();
  const auto table = first_passage(g, 2, 4, PassagePolicy::kTraditional);
  EXPECT_DOUBLE_EQ(table.at(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(table.at(2, 0), 0.5);
  EXPECT_EQ(table.at(1, 0), 0.0);
  EXPECT_EQ(table.at(1, 2), 0.0);
  EXPECT_EQ(table.at(0, 1), 0.0);
  // a -> b -> a -> b -> c
  EXPECT_DOUBLE_EQ(table.at(4, 0), 0.25);
  EXPECT_THROW(first_passage(g, 2, 0, PassagePolicy::kTraditional), std::invalid_argument);
}

TEST(FirstPassage, UnreachableTargetGivesZeros) {
  StaticGraph g(4);
  g.add_edge(0, 1);
  g.add_edge(2, 3);
  const auto table = first_passage(g, 3, 5, PassagePolicy::kTraditional);
  for (std::size_t t = 0; t <= 5; ++t) EXPECT_EQ(table.at(t, 0), 0.0);
}

TEST(FirstPassage, MassApproachesOne) {
  const auto bar = barbell_fixture();
  const auto table = first_passage(bar.graph, 5, 500, PassagePolicy::kTraditional);
  for (NodeId u = 0; u < 5; ++u) {
    double mass = 0.0;
    for (std::size_t t = 1; t <= 500; ++t) {
      EXPECT_GE(table.at(t, u), 0.0);
      mass += table.at(t, u);
    }
    EXPECT_GE(mass, 0.99);
    EXPECT_LE(mass, 1.0 + 1e-12);
  }
}

TEST(FirstPassage, MatchesMonteCarlo) {
  const auto pg = random_partitioned_graph(8, 2, 0.6, 0.3, 5);
  for (auto policy : {PassagePolicy::kTraditional, PassagePolicy::kCommunity}) {
    for (NodeId v : {NodeId{0}, NodeId{7}}) {
      const auto table = first_passage(pg.graph, v, 5, policy, pg.assignment);
      for (NodeId u = 0; u < 8; ++u) {
        if (u == v) continue;
        const auto sim = simulate_first_visits(pg.graph, pg.assignment, u, v, 5, policy, 100000, derive_seed(9, {u, v}));
        for (std::size_t t = 1; t <= 5; ++t) EXPECT_NEAR(sim[t], table.at(t, u), 0.01) << "u=" << u << " t=" << t;
      }
    }
  }
}

TEST(FirstPassage, BarbellBridgeFavorsCommunityWalks) {
  const auto bar = barbell_fixture();
  const auto trad = first_passage(bar.graph, 3, 3, PassagePolicy::kTraditional);
  const auto comm = first_passage(bar.graph, 3, 3, PassagePolicy::kCommunity, bar.assignment);
  EXPECT_DOUBLE_EQ(trad.at(1, 2), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(comm.at(1, 2), 1.0);
  const auto report = check_lemma1(bar.graph, bar.assignment, 2, 3, 6);
  EXPECT_FALSE(report.all_neighbors_bridging);
  EXPECT_TRUE(report.rows[0].holds);
  EXPECT_FALSE(report.rows[0].equal);
  // every community walk hits v at step one, so no mass is left for later steps
  EXPECT_EQ(report.rows[2].community, 0.0);
  EXPECT_NEAR(report.rows[2].traditional, 1.0 / 9.0, 1e-15);
  EXPECT_FALSE(report.rows[2].holds);
  EXPECT_TRUE(report.bound_holds());
  EXPECT_TRUE(report.reached_holds());
}

TEST(FirstPassage, EqualityWhenAllNeighborsBridge) {
  // 4-cycle split into {0,1} and {2,3}: every node is bridging
  const std::vector<std::pair<NodeId, NodeId>> e = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  const auto g = StaticGraph::from_edges(4, e);
  const std::vector<CommunityId> a = {0, 0, 1, 1};
  const auto report = check_lemma1(g, a, 1, 2, 6);
  EXPECT_TRUE(report.all_neighbors_bridging);
  EXPECT_DOUBLE_EQ(report.rows[0].community, 0.5);
  for (const auto& row : report.rows) EXPECT_TRUE(row.equal) << row.t;
}

TEST(FirstPassage, ComparisonPreconditions) {
  const auto bar = barbell_fixture();
  EXPECT_THROW(check_lemma1(bar.graph, bar.assignment, 0, 3, 3), std::invalid_argument);
  const std::vector<CommunityId> one = {0, 0, 0, 0, 0, 0};
  EXPECT_THROW(check_lemma1(bar.graph, one, 2, 3, 3), std::invalid_argument);
}

TEST(FirstPassage, OneStepBoundHoldsOnRandomGraphs) {
  std::size_t checked = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto pg = random_partitioned_graph(10, 2, 0.5, 0.2, s);
    const auto bridging = static_bridging(pg.graph, pg.assignment);
    for (NodeId u = 0; u < 10; ++u) {
      for (NodeId v = 0; v < 10; ++v) {
        if (!bridging[u] || !bridging[v] || pg.assignment[u] == pg.assignment[v]) continue;
        const auto report = check_lemma1(pg.graph, pg.assignment, u, v, 6);
        EXPECT_TRUE(report.bound_holds());
        EXPECT_TRUE(report.rows[0].holds);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 50u);
}

TEST(Matrices, DisjointCliques) {
  const std::vector<std::pair<NodeId, NodeId>> e = {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}};
  const auto g = StaticGraph::from_edges(6, e);
  const std::vector<CommunityId> a = {0, 0, 0, 1, 1, 1};
  const auto m = build_matrices(g, a);
  EXPECT_TRUE(m.M_C.isZero(0.0));
  for (int i = 0; i < 6; ++i) EXPECT_DOUBLE_EQ(m.M_I.row(i).sum(), 1.0);
  EXPECT_EQ(m.M_I(0, 3), 0.0);
  EXPECT_EQ(m.vol, 12.0);
}

TEST(Matrices, SingleCrossEdge) {
  const auto bar = barbell_fixture();
  const auto m = build_matrices(bar.graph, bar.assignment);
  int nonzero_rows = 0;
  for (int i = 0; i < 6; ++i) {
    if (!m.M_C.row(i).isZero(0.0)) {
      ++nonzero_rows;
      EXPECT_DOUBLE_EQ(m.M_C.row(i).sum(), 1.0);
    }
  }
  EXPECT_EQ(nonzero_rows, 2);
  EXPECT_EQ(m.M_C(2, 3), 1.0);
  EXPECT_EQ(m.M_I(2, 3), 0.0);
  EXPECT_DOUBLE_EQ(m.M_I(2, 0), 0.5);
}

TEST(Matrices, RandomPartitionsStructure) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto pg = random_partitioned_graph(12, 3, 0.6, 0.15, s);
    const auto m = build_matrices(pg.graph, pg.assignment);
    for (NodeId i = 0; i < 12; ++i) {
      const bool isolated =
          std::find(m.isolated_in_block.begin(), m.isolated_in_block.end(), i) != m.isolated_in_block.end();
      EXPECT_NEAR(m.M_I.row(i).sum(), isolated ? 0.0 : 1.0, 1e-12);
      EXPECT_NEAR(m.M_C.row(i).sum(), m.bridging[i] ? 1.0 : 0.0, 1e-12);
      for (NodeId j = 0; j < 12; ++j) {
        if (pg.assignment[i] != pg.assignment[j]) EXPECT_EQ(m.M_I(i, j), 0.0);
        if (!m.bridging[j]) EXPECT_EQ(m.M_C(i, j), 0.0);
      }
    }
  }
}

TEST(Pmi, FourCycleHandValue) {
  const std::vector<std::pair<NodeId, NodeId>> e = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  const auto g = StaticGraph::from_edges(4, e);
  const std::vector<CommunityId> one = {0, 0, 0, 0};
  const auto m = build_matrices(g, one);
  EXPECT_TRUE(m.M_C.isZero(0.0));
  for (double k : {1.0, 5.0}) {
    const auto pmi = pmi_target(m, 1, k);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (g.has_edge(static_cast<NodeId>(i), static_cast<NodeId>(j))) {
          EXPECT_NEAR(pmi.values(i, j), std::log(2.0) - std::log(k), 1e-14);
        } else {
          EXPECT_FALSE(pmi.defined(i, j));
          EXPECT_TRUE(std::isinf(pmi.values(i, j)));
        }
      }
    }
  }
}

TEST(Pmi, DoublingNegativesShiftsByLogTwo) {
  const auto pg = random_partitioned_graph(10, 2, 0.6, 0.2, 3);
  const auto m = build_matrices(pg.graph, pg.assignment);
  const auto a = pmi_target(m, 3, 2.0);
  const auto b = pmi_target(m, 3, 4.0);
  EXPECT_EQ(a.defined, b.defined);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      if (a.defined(i, j)) EXPECT_NEAR(a.values(i, j) - b.values(i, j), std::log(2.0), 1e-12);
    }
  }
  EXPECT_THROW(pmi_target(m, 3, 0.5), std::invalid_argument);
}

TEST(Pmi, PowerSumsAreSymmetricAfterDegreeScaling) {
  const auto pg = random_partitioned_graph(10, 2, 0.7, 0.3, 4);
  const auto n = 10;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (NodeId i = 0; i < 10; ++i) {
    for (NodeId j : pg.graph.neighbors(i)) a(i, j) = 1.0;
  }
  Eigen::VectorXd d = a.rowwise().sum();
  Eigen::MatrixXd p = d.cwiseInverse().asDiagonal() * a;
  const Eigen::MatrixXd s = mean_power_sum(p, 4) * d.cwiseInverse().asDiagonal();
  EXPECT_LT((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-10);

  const auto m = build_matrices(pg.graph, pg.assignment);
  Eigen::VectorXd intra = Eigen::VectorXd::Zero(n);
  for (NodeId i = 0; i < 10; ++i) {
    for (NodeId j : pg.graph.neighbors(i)) intra[i] += pg.assignment[i] == pg.assignment[j] ? 1.0 : 0.0;
  }
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) inv[i] = intra[i] > 0 ? 1.0 / intra[i] : 0.0;
  const Eigen::MatrixXd si = mean_power_sum(m.M_I, 4) * inv.asDiagonal();
  EXPECT_LT((si - si.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(mean_power_sum(p, 0), std::invalid_argument);
}

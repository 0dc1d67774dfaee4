#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "ctwalks/encoder.hpp"
#include "ctwalks/pipeline.hpp"

using namespace ctwalks;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

EncoderShape small_shape() {
  EncoderShape s;
  s.hidden = 4;
  s.community_dim = 2;
  s.walk_length = 3;
  s.communities = 3;
  return s;
}

void scale_params(EncoderParams& p, double factor, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-factor, factor);
  for_each_tensor(p, [&](std::string_view, double* d, Eigen::Index r, Eigen::Index c) {
    for (Eigen::Index i = 0; i < r * c; ++i) d[i] = u(gen);
  });
}

WalkFeatures random_walk(const EncoderShape& s, std::mt19937_64& gen, bool with_pad = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  WalkFeatures w;
  for (std::size_t i = 0; i < s.walk_length; ++i) {
    Vector x = Vector::Zero(static_cast<Eigen::Index>(s.input_width()));
    for (std::size_t j = 0; j < s.walk_length; ++j) {
      x[static_cast<Eigen::Index>(j)] = std::floor(u(gen) * 3) / 2.0;
      x[static_cast<Eigen::Index>(s.walk_length + s.community_dim + j)] = std::floor(u(gen) * 3) / 2.0;
    }
    w.static_input.push_back(x);
    const auto tok = static_cast<std::uint32_t>(gen() % (s.communities + 1));
    const bool pad = with_pad && i + 1 == s.walk_length;
    w.tokens.push_back({pad ? static_cast<std::uint32_t>(s.communities + 1) : tok,
                        static_cast<std::uint32_t>(gen() % s.communities)});
    if (i + 1 < s.walk_length) w.intervals.push_back(pad || (with_pad && i + 2 == s.walk_length) ? 0.0 : u(gen) * 50);
  }
  return w;
}

std::vector<InteractionFeatures> random_batch(const EncoderShape& s, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<InteractionFeatures> batch(3);
  for (auto& b : batch) {
    for (int r = 0; r < 4; ++r) b.walks.push_back(random_walk(s, gen, r == 3));
    b.weights = {0.1, 0.2, 0.3, 0.4};
  }
  return batch;
}

// Taylor polynomial of exp to fourth order: the exact RK4-family amplification
// factor for y' = -y.
double rk4_factor(double z) { return 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0; }

}  // namespace

TEST(Gru, ZeroWeightsHalveState) {
  EncoderShape s = small_shape();
  const auto p = EncoderParams::zeros(s);
  Vector h(4);
  h << 0.4, -1.0, 2.0, 0.0;
  const Vector x = Vector::Ones(static_cast<Eigen::Index>(s.input_width()));
  EXPECT_TRUE(gru_update(h, x, p.g).isApprox(0.5 * h, 0.0));
}

TEST(Gru, ScalarHandComputation) {
  EncoderShape s;
  s.hidden = 1;
  s.community_dim = 0;
  s.walk_length = 1;  // input width 2
  auto p = EncoderParams::zeros(s);
  p.g.W_z(0, 0) = 0.3, p.g.U_z(0, 0) = -0.2, p.g.U_z(0, 1) = 0.5, p.g.b_z[0] = 0.1;
  p.g.W_r(0, 0) = -0.7, p.g.U_r(0, 0) = 0.4, p.g.U_r(0, 1) = 0.0, p.g.b_r[0] = 0.2;
  p.g.W_h(0, 0) = 1.1, p.g.U_h(0, 0) = 0.6, p.g.U_h(0, 1) = -0.9, p.g.b_h[0] = -0.05;
  Vector h(1), x(2);
  h << 0.8;
  x << 1.0, 2.0;
  const double z = sig(0.3 * 0.8 - 0.2 * 1.0 + 0.5 * 2.0 + 0.1);
  const double r = sig(-0.7 * 0.8 + 0.4 * 1.0 + 0.2);
  const double c = std::tanh(1.1 * r * 0.8 + 0.6 * 1.0 - 0.9 * 2.0 - 0.05);
  EXPECT_NEAR(gru_update(h, x, p.g)[0], z * c + (1 - z) * 0.8, 1e-12);

  p.f.W_z(0, 0) = 0.9, p.f.b_z[0] = -0.3, p.f.W_r(0, 0) = 0.25, p.f.b_r[0] = 0.5, p.f.W_h(0, 0) = -1.4,
  p.f.b_h[0] = 0.2;
  const double fz = sig(0.9 * 0.8 - 0.3);
  const double fr = sig(0.25 * 0.8 + 0.5);
  const double fc = std::tanh(-1.4 * fr * 0.8 + 0.2);
  EXPECT_NEAR(ode_rhs(h, p.f)[0], (1 - fz) * (fc - 0.8), 1e-12);
}

TEST(Gru, ShapeMismatchThrows) {
  const auto p = EncoderParams::zeros(small_shape());
  EXPECT_THROW(gru_update(Vector::Zero(3), Vector::Zero(10), p.g), std::invalid_argument);
  EXPECT_THROW(ode_rhs(Vector::Zero(5), p.f), std::invalid_argument);
}

TEST(Rhs, BoundedOnUnitBox) {
  auto p = EncoderParams::zeros(small_shape());
  scale_params(p, 5.0, 3);
  EXPECT_TRUE(ode_rhs(Vector::Zero(4), EncoderParams::zeros(small_shape()).f).isZero(0.0));
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Vector h(4);
    for (int j = 0; j < 4; ++j) h[j] = u(gen);
    EXPECT_LE(ode_rhs(h, p.f).cwiseAbs().maxCoeff(), 2.0);
  }
}

TEST(Integrate, ZeroIntervalIsBitwiseIdentity) {
  auto p = EncoderParams::zeros(small_shape());
  scale_params(p, 1.0, 5);
  Vector h(4);
  h << 0.1, 0.2, -0.3, 0.7;
  SolverConfig solver;
  const Vector out = integrate(h, 0.0, p.f, solver);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(out[i], h[i]);
  solver.log_time = false;
  const Vector raw = integrate(h, 0.0, p.f, solver);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(raw[i], h[i]);
}

TEST(Integrate, LogTransform) {
  SolverConfig solver;
  EXPECT_DOUBLE_EQ(solver.effective_interval(9.0), 1.0);
  EXPECT_EQ(solver.effective_interval(0.0), 0.0);
  EXPECT_THROW(solver.effective_interval(-1.0), std::invalid_argument);
  solver.log_time = false;
  EXPECT_EQ(solver.effective_interval(9.0), 9.0);
}

TEST(Integrate, StepSizeValidation) {
  SolverConfig solver;
  EXPECT_EQ(solver.steps(), 8u);
  solver.step_size = 0.3;
  EXPECT_THROW(solver.steps(), std::invalid_argument);
  solver.step_size = 0.0;
  EXPECT_THROW(solver.steps(), std::invalid_argument);
  solver.step_size = 1.0;
  EXPECT_EQ(solver.steps(), 1u);
}

TEST(Integrate, ExponentialDecay) {
  // zero parameters give rhs = -h/2, so an interval of 2 is dh/ds = -h
  const auto p = EncoderParams::zeros(small_shape());
  SolverConfig solver;
  solver.log_time = false;
  const Vector h = Vector::Ones(4);
  const Vector out = integrate(h, 2.0, p.f, solver);
  EXPECT_LT(std::abs(out[0] - std::exp(-1.0)), 1e-5);
  EXPECT_NEAR(out[0], std::pow(rk4_factor(-0.125), 8), 1e-15);
}

TEST(Integrate, FourthOrderConvergence) {
  const auto p = EncoderParams::zeros(small_shape());
  SolverConfig coarse{0.25, false}, fine{0.125, false};
  const Vector h = Vector::Ones(4);
  const double e_coarse = std::abs(integrate(h, 2.0, p.f, coarse)[0] - std::exp(-1.0));
  const double e_fine = std::abs(integrate(h, 2.0, p.f, fine)[0] - std::exp(-1.0));
  const double ratio = e_coarse / e_fine;
  EXPECT_GT(ratio, 14.0);
  EXPECT_LT(ratio, 18.0);
}

TEST(Integrate, ReparameterizationIdentity) {
  auto p = EncoderParams::zeros(small_shape());
  scale_params(p, 1.0, 6);
  Vector h(4);
  h << 0.5, -0.2, 0.1, 0.9;
  SolverConfig solver{0.125, false};
  for (double dt : {0.3, 2.0, 7.5}) {
    const Vector direct =
        rk38_solve(h, 0.0, dt, 8, [&](double, const Vector& y) -> Vector { return ode_rhs(y, p.f); });
    EXPECT_LT((integrate(h, dt, p.f, solver) - direct).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Integrate, DivergenceReportsStep) {
  auto p = EncoderParams::zeros(small_shape());
  Vector h = Vector::Ones(4);
  h[0] = std::numeric_limits<double>::infinity();
  try {
    integrate(h, 5.0, p.f, SolverConfig{});
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("step 0"), std::string::npos);
  }
}

TEST(Encode, ZeroWeightsGiveZero) {
  const auto s = small_shape();
  const auto p = EncoderParams::zeros(s);
  std::mt19937_64 gen(7);
  EXPECT_TRUE(encode_walk(random_walk(s, gen), p, {}).isZero(0.0));
}

TEST(Encode, LengthOneIsSingleGruStep) {
  EncoderShape s = small_shape();
  s.walk_length = 1;
  auto p = EncoderParams::initialized(s, 8);
  std::mt19937_64 gen(9);
  const auto w = random_walk(s, gen);
  EncoderOptions opts;
  Vector x = w.static_input[0];
  x.segment(1, 2) = p.community_embeddings.row(w.tokens[0][0]).transpose();
  x.segment(4, 2) = p.community_embeddings.row(w.tokens[0][1]).transpose();
  EXPECT_TRUE(encode_walk(w, p, opts).isApprox(gru_update(Vector::Zero(4), x, p.g), 1e-14));
}

TEST(Encode, MatchesUnrolledChain) {
  const auto s = small_shape();
  auto p = EncoderParams::zeros(s);
  scale_params(p, 1.0, 10);
  std::mt19937_64 gen(11);
  const auto w = random_walk(s, gen, true);
  for (bool continuous : {true, false}) {
    EncoderOptions opts;
    opts.continuous = continuous;
    Vector h = Vector::Zero(4);
    for (std::size_t i = 0; i < 3; ++i) {
      if (i > 0 && continuous) h = integrate(h, w.intervals[i - 1], p.f, opts.solver);
      Vector x = w.static_input[i];
      x.segment(3, 2) = p.community_embeddings.row(w.tokens[i][0]).transpose();
      x.segment(8, 2) = p.community_embeddings.row(w.tokens[i][1]).transpose();
      h = gru_update(h, x, p.g);
    }
    EXPECT_LT((encode_walk(w, p, opts) - h).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Encode, BatchEqualsSingles) {
  const auto s = small_shape();
  auto p = EncoderParams::initialized(s, 12);
  std::mt19937_64 gen(13);
  std::vector<WalkFeatures> walks;
  for (int i = 0; i < 6; ++i) walks.push_back(random_walk(s, gen, i % 2 == 0));
  EncoderOptions opts;
  BatchEncoder enc(p, opts);
  const Matrix h = enc.forward(walks, false);
  for (int i = 0; i < 6; ++i) {
    EXPECT_LT((h.col(i) - encode_walk(walks[static_cast<std::size_t>(i)], p, opts)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Encode, BoundedUnderLargeWeights) {
  const auto s = small_shape();
  auto p = EncoderParams::zeros(s);
  scale_params(p, 4.0, 14);
  std::mt19937_64 gen(15);
  EncoderOptions opts;
  for (int i = 0; i < 200; ++i) {
    auto w = random_walk(s, gen);
    for (auto& t : w.intervals) t *= 1e4;
    EXPECT_LE(encode_walk(w, p, opts).cwiseAbs().maxCoeff(), 3.0);
  }
}

TEST(Score, PoolingAndClassifier) {
  const auto s = small_shape();
  auto p = EncoderParams::initialized(s, 16);
  Matrix enc(4, 3);
  enc << 0.1, 0.2, 0.3, -0.4, 0.5, 0.0, 0.9, -0.9, 0.2, 0.3, 0.3, 0.3;
  Matrix perm(4, 3);
  perm.col(0) = enc.col(2), perm.col(1) = enc.col(0), perm.col(2) = enc.col(1);
  EXPECT_EQ(pool_and_score(enc, p), pool_and_score(perm, p));
  EXPECT_DOUBLE_EQ(pool_and_score(enc.col(1), p), sigmoid(classifier_logit(enc.col(1), p.classifier)));
  EXPECT_EQ(pool_and_score(enc, EncoderParams::zeros(s)), 0.5);
  EXPECT_THROW(pool_and_score(Matrix(4, 0), p), std::invalid_argument);
}

TEST(Score, StableBce) {
  EXPECT_NEAR(bce_with_logit(0.0, 1.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(bce_with_logit(800.0, 0.0), 800.0, 1e-9);
  EXPECT_NEAR(bce_with_logit(-800.0, 1.0), 800.0, 1e-9);
  EXPECT_NEAR(bce_with_logit(2.0, 1.0), -std::log(sig(2.0)), 1e-15);
  EXPECT_NEAR(bce_with_logit(2.0, 0.0), -std::log(1 - sig(2.0)), 1e-14);
}

TEST(Gradients, MatchCentralDifferences) {
  const auto s = small_shape();
  auto p = EncoderParams::zeros(s);
  scale_params(p, 0.8, 17);
  const auto batch = random_batch(s, 18);
  const std::vector<double> labels = {1.0, 0.0, 1.0};
  EncoderOptions opts;
  opts.count_scale = 0.5;
  auto grads = EncoderParams::zeros(s);
  loss_and_gradients(p, opts, batch, labels, grads);

  auto loss_at = [&](const EncoderParams& q) {
    const auto logits = score_logits(q, opts, batch);
    double l = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) l += bce_with_logit(logits[i], labels[i]) / 3.0;
    return l;
  };
  const double eps = 1e-5;
  double worst = 0.0;
  std::string worst_name;
  std::vector<double*> grad_ptrs;
  for_each_tensor(grads, [&](std::string_view, double* d, Eigen::Index, Eigen::Index) { grad_ptrs.push_back(d); });
  std::size_t t = 0;
  for_each_tensor(p, [&](std::string_view name, double* d, Eigen::Index r, Eigen::Index c) {
    for (Eigen::Index i = 0; i < r * c; ++i) {
      const double keep = d[i];
      d[i] = keep + eps;
      const double up = loss_at(p);
      d[i] = keep - eps;
      const double down = loss_at(p);
      d[i] = keep;
      const double fd = (up - down) / (2 * eps);
      const double an = grad_ptrs[t][i];
      const double rel = std::abs(fd - an) / std::max(1e-6, std::abs(fd) + std::abs(an));
      if (rel > worst) worst = rel, worst_name = std::string(name);
    }
    ++t;
  });
  EXPECT_LT(worst, 1e-4) << worst_name;
}

TEST(Gradients, UnusedPadRowIsExactlyZero) {
  const auto s = small_shape();
  auto p = EncoderParams::initialized(s, 19);
  auto batch = random_batch(s, 20);
  for (auto& b : batch) {
    for (auto& w : b.walks) {
      for (auto& tok : w.tokens) {
        tok[0] = std::min<std::uint32_t>(tok[0], 2);
        tok[1] = std::min<std::uint32_t>(tok[1], 2);
      }
    }
  }
  auto grads = EncoderParams::zeros(s);
  loss_and_gradients(p, {}, batch, std::vector<double>{1, 0, 1}, grads);
  EXPECT_TRUE(grads.community_embeddings.row(4).isZero(0.0));
  EXPECT_TRUE(grads.community_embeddings.row(3).isZero(0.0));
  EXPECT_FALSE(grads.community_embeddings.row(0).isZero(0.0));
}

TEST(Gradients, Linearity) {
  const auto s = small_shape();
  auto p = EncoderParams::initialized(s, 21);
  const auto batch = random_batch(s, 22);
  auto once = EncoderParams::zeros(s);
  auto twice = EncoderParams::zeros(s);
  loss_and_gradients(p, {}, batch, std::vector<double>{1, 0, 0}, once);
  loss_and_gradients(p, {}, batch, std::vector<double>{1, 0, 0}, twice);
  loss_and_gradients(p, {}, batch, std::vector<double>{1, 0, 0}, twice);
  EXPECT_TRUE(twice.g.W_h.isApprox(2.0 * once.g.W_h, 1e-14));
  EXPECT_TRUE(twice.f.W_z.isApprox(2.0 * once.f.W_z, 1e-14));
  EXPECT_TRUE(twice.community_embeddings.isApprox(2.0 * once.community_embeddings, 1e-14));
}

TEST(Features, LayoutAndWidths) {
  AnonymizedStep step;
  step.rep.source_counts = {2, 0};
  step.rep.target_counts = {0, 1};
  Vector eu(2), ev(2);
  eu << 0.1, 0.2;
  ev << 0.3, 0.4;
  const Vector plain = attributed_features(step, eu, ev, {}, {}, 0.5);
  Vector expected(8);
  expected << 1.0, 0.0, 0.1, 0.2, 0.0, 0.5, 0.3, 0.4;
  EXPECT_EQ(plain, expected);
  const std::vector<double> node(4, 1.0), edge(2, 2.0);
  const Vector rich = attributed_features(step, eu, ev, node, edge);
  EXPECT_EQ(rich.size(), plain.size() + 6);
  EXPECT_EQ(rich.tail(2), Vector::Constant(2, 2.0));
  step.rep.target_counts = {1};
  EXPECT_THROW(attributed_features(step, eu, ev, {}, {}), std::invalid_argument);
}

TEST(Features, FromAnonymizedWalk) {
  EncoderShape s = small_shape();
  s.walk_length = 2;
  s.attr_width = 1;
  AnonymizedWalk w;
  w.steps.resize(2);
  w.steps[0].rep = {{2, 0}, 1, {0, 0}, 7};
  w.steps[0].t = 10.0;
  w.steps[1].rep = {{0, 0}, kPadCommunity, {0, 0}, kPadCommunity};
  w.steps[1].t = 10.0;
  w.steps[1].pad = true;
  EncoderOptions opts;
  opts.count_scale = 0.5;
  const auto f = make_walk_features(w, s, opts, {{0.0}, {3.0}});
  EXPECT_EQ(f.tokens[0], (std::array<std::uint32_t, 2>{1, 3}));
  EXPECT_EQ(f.tokens[1], (std::array<std::uint32_t, 2>{4, 4}));
  ASSERT_EQ(f.intervals.size(), 1u);
  EXPECT_EQ(f.intervals[0], 0.0);
  EXPECT_EQ(f.static_input[0][0], 1.0);
  EXPECT_EQ(f.static_input[1][s.input_width() - 1], 3.0);
  EXPECT_THROW(make_walk_features(w, s, opts), std::invalid_argument);
  EXPECT_EQ(embedding_row(kUnassigned, s), 3u);
}

TEST(Checkpoint, RoundTripIsBitwise) {
  EncoderShape s = small_shape();
  s.attr_width = 3;
  auto p = EncoderParams::initialized(s, 23);
  EncoderOptions opts;
  opts.continuous = false;
  opts.count_scale = 1.0 / 16.0;
  opts.solver.step_size = 0.25;
  const auto path = (std::filesystem::temp_directory_path() / "ctwalks_test.ckpt").string();
  save_checkpoint(path, p, opts, 42, R"({"note":1})");
  EncoderOptions back_opts;
  std::string header;
  const auto q = load_checkpoint(path, &back_opts, &header);
  EXPECT_EQ(q.shape, s);
  std::vector<double> a, b;
  for_each_tensor(p, [&](std::string_view, double* d, Eigen::Index r, Eigen::Index c) { a.insert(a.end(), d, d + r * c); });
  auto qq = q;
  for_each_tensor(qq, [&](std::string_view, double* d, Eigen::Index r, Eigen::Index c) { b.insert(b.end(), d, d + r * c); });
  EXPECT_EQ(a, b);
  EXPECT_EQ(back_opts.continuous, false);
  EXPECT_EQ(back_opts.count_scale, 1.0 / 16.0);
  EXPECT_EQ(back_opts.solver.step_size, 0.25);
  EXPECT_NE(header.find("\"note\":1"), std::string::npos);
  std::filesystem::remove(path);
  EXPECT_THROW(load_checkpoint(path), std::runtime_error);
}

TEST(Params, InitializationRanges) {
  const auto s = small_shape();
  const auto p = EncoderParams::initialized(s, 24);
  EXPECT_EQ(p.community_embeddings.rows(), 5);
  EXPECT_LE(p.g.W_z.cwiseAbs().maxCoeff(), 0.5);
  EXPECT_TRUE(p.g.b_z.isZero(0.0));
  EXPECT_TRUE(p.classifier.b_2.isZero(0.0));
  EXPECT_FALSE(p.g.U_h.isZero(0.0));
  const auto q = EncoderParams::initialized(s, 24);
  EXPECT_EQ(p.g.U_h, q.g.U_h);
}

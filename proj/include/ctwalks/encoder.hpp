#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ctwalks/anonymizer.hpp"

namespace ctwalks {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// g: GRU cell with external input.
struct GruParams {
  Matrix W_z, U_z;
  Vector b_z;
  Matrix W_r, U_r;
  Vector b_r;
  Matrix W_h, U_h;
  Vector b_h;
};

/// f: input-free GRU-style vector field.
struct OdeParams {
  Matrix W_z;
  Vector b_z;
  Matrix W_r;
  Vector b_r;
  Matrix W_h;
  Vector b_h;
};

/// One hidden layer (ReLU) followed by a scalar logit.
struct ClassifierParams {
  Matrix W_1;
  Vector b_1;
  Vector w_2;
  Vector b_2;  // size 1
};

struct EncoderShape {
  std::size_t hidden = 32;
  std::size_t community_dim = 8;
  std::size_t walk_length = 2;
  std::size_t attr_width = 0;
  /// Communities known at training time. Embedding rows: 0..k-1 for them,
  /// k for unknown/fresh labels, k+1 for padding.
  std::size_t communities = 1;

  std::size_t input_width() const { return 2 * walk_length + 2 * community_dim + attr_width; }
  std::size_t embedding_rows() const { return communities + 2; }
  bool operator==(const EncoderShape&) const = default;
};

struct EncoderParams {
  EncoderShape shape;
  GruParams g;
  OdeParams f;
  Matrix community_embeddings;  // embedding_rows x community_dim
  ClassifierParams classifier;

  /// All tensors zero, correctly shaped.
  static EncoderParams zeros(const EncoderShape& shape);
  /// Weights uniform in [-1/sqrt(d_h), 1/sqrt(d_h)], biases zero.
  static EncoderParams initialized(const EncoderShape& shape, std::uint64_t seed);

  std::size_t parameter_count() const;
};

/// Visit every tensor in declaration order as (name, data, rows, cols).
template <typename Params, typename Fn>
void for_each_tensor(Params& p, Fn&& fn) {
  fn(std::string_view("g.W_z"), p.g.W_z.data(), p.g.W_z.rows(), p.g.W_z.cols());
  fn(std::string_view("g.U_z"), p.g.U_z.data(), p.g.U_z.rows(), p.g.U_z.cols());
  fn(std::string_view("g.b_z"), p.g.b_z.data(), p.g.b_z.rows(), p.g.b_z.cols());
  fn(std::string_view("g.W_r"), p.g.W_r.data(), p.g.W_r.rows(), p.g.W_r.cols());
  fn(std::string_view("g.U_r"), p.g.U_r.data(), p.g.U_r.rows(), p.g.U_r.cols());
  fn(std::string_view("g.b_r"), p.g.b_r.data(), p.g.b_r.rows(), p.g.b_r.cols());
  fn(std::string_view("g.W_h"), p.g.W_h.data(), p.g.W_h.rows(), p.g.W_h.cols());
  fn(std::string_view("g.U_h"), p.g.U_h.data(), p.g.U_h.rows(), p.g.U_h.cols());
  fn(std::string_view("g.b_h"), p.g.b_h.data(), p.g.b_h.rows(), p.g.b_h.cols());
  fn(std::string_view("f.W_z"), p.f.W_z.data(), p.f.W_z.rows(), p.f.W_z.cols());
  fn(std::string_view("f.b_z"), p.f.b_z.data(), p.f.b_z.rows(), p.f.b_z.cols());
  fn(std::string_view("f.W_r"), p.f.W_r.data(), p.f.W_r.rows(), p.f.W_r.cols());
  fn(std::string_view("f.b_r"), p.f.b_r.data(), p.f.b_r.rows(), p.f.b_r.cols());
  fn(std::string_view("f.W_h"), p.f.W_h.data(), p.f.W_h.rows(), p.f.W_h.cols());
  fn(std::string_view("f.b_h"), p.f.b_h.data(), p.f.b_h.rows(), p.f.b_h.cols());
  fn(std::string_view("community_embeddings"), p.community_embeddings.data(), p.community_embeddings.rows(),
     p.community_embeddings.cols());
  fn(std::string_view("classifier.W_1"), p.classifier.W_1.data(), p.classifier.W_1.rows(), p.classifier.W_1.cols());
  fn(std::string_view("classifier.b_1"), p.classifier.b_1.data(), p.classifier.b_1.rows(), p.classifier.b_1.cols());
  fn(std::string_view("classifier.w_2"), p.classifier.w_2.data(), p.classifier.w_2.rows(), p.classifier.w_2.cols());
  fn(std::string_view("classifier.b_2"), p.classifier.b_2.data(), p.classifier.b_2.rows(), p.classifier.b_2.cols());
}

/// Fixed-step Runge-Kutta 3/8 over the reparameterized interval s in [0, 1].
struct SolverConfig {
  double step_size = 0.125;
  /// Integrate over log10(dt + 1) instead of dt.
  bool log_time = true;

  std::size_t steps() const;
  double effective_interval(double elapsed) const;
};

struct EncoderOptions {
  SolverConfig solver;
  bool use_community_labels = true;
  /// When false the interval integration is replaced by the identity.
  bool continuous = true;
  /// Position counts are multiplied by this before entering g (1/R).
  double count_scale = 1.0;
};

/// Raised when the hidden state stops being finite during integration.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Vector gru_update(const Vector& h_prev, const Vector& x, const GruParams& params);
Vector ode_rhs(const Vector& h, const OdeParams& params);

/// Solve dh/ds = ode_rhs(h) * dt' over s in [0, 1], dt' the effective interval.
/// A zero interval returns `h` unchanged.
Vector integrate(const Vector& h, double elapsed, const OdeParams& params, const SolverConfig& solver);

/// One classical RK 3/8 step of size `dt` for dy/dt = rhs(t, y).
template <typename State, typename Rhs>
State rk38_step(const State& y, double t, double dt, Rhs&& rhs) {
  const State k1 = rhs(t, y);
  const State k2 = rhs(t + dt / 3.0, State(y + dt * k1 / 3.0));
  const State k3 = rhs(t + 2.0 * dt / 3.0, State(y + dt * (k2 - k1 / 3.0)));
  const State k4 = rhs(t + dt, State(y + dt * (k1 - k2 + k3)));
  return State(y + dt * (k1 + 3.0 * k2 + 3.0 * k3 + k4) / 8.0);
}

/// `steps` equal RK 3/8 steps from t0 to t1.
template <typename State, typename Rhs>
State rk38_solve(State y, double t0, double t1, std::size_t steps, Rhs&& rhs) {
  const double dt = (t1 - t0) / static_cast<double>(steps);
  for (std::size_t i = 0; i < steps; ++i) y = rk38_step(y, t0 + static_cast<double>(i) * dt, dt, rhs);
  return y;
}

/// Row of the embedding table used for a community token.
std::size_t embedding_row(CommunityId c, const EncoderShape& shape);

/// Everything about one walk the encoder needs, independent of parameters.
struct WalkFeatures {
  /// Per step: input vector with zeros in the two embedding slots.
  std::vector<Vector> static_input;
  /// Per step: embedding rows for the source and target labels.
  std::vector<std::array<std::uint32_t, 2>> tokens;
  /// Elapsed time between consecutive steps (size walk_length - 1).
  std::vector<double> intervals;

  bool operator==(const WalkFeatures&) const = default;
};

/// Feature layout for one step: [source_counts | emb(C_u) | target_counts |
/// emb(C_v) | X_w | X_e]. `node_attrs` and `edge_attrs` may be empty.
Vector attributed_features(const AnonymizedStep& step, const Vector& source_embedding,
                           const Vector& target_embedding, std::span<const double> node_attrs,
                           std::span<const double> edge_attrs, double count_scale = 1.0);

/// `extras[i]` is appended to step i (attributes); pass {} for none.
WalkFeatures make_walk_features(const AnonymizedWalk& walk, const EncoderShape& shape, const EncoderOptions& opts,
                                const std::vector<std::vector<double>>& extras = {});

/// Forward pass over a batch of walks, optionally recording what backward needs.
class BatchEncoder {
 public:
  BatchEncoder(const EncoderParams& params, const EncoderOptions& opts) : params_(params), opts_(opts) {}

  /// Returns d_h x B final hidden states.
  Matrix forward(std::span<const WalkFeatures> walks, bool record = true);

  /// Accumulate parameter gradients for dLoss/d(output) = `grad_out`.
  void backward(const Matrix& grad_out, EncoderParams& grads) const;

 private:
  struct GruTape {
    Matrix h_prev, x, z, r, c;
  };
  struct StageTape {
    Matrix y, z, r, c;
  };
  struct GapTape {
    Vector scale;
    std::vector<std::array<StageTape, 4>> steps;
  };

  Matrix gru_forward(const Matrix& h_prev, const Matrix& x, GruTape* tape) const;
  Matrix rhs_forward(const Matrix& y, const Vector& scale, StageTape* tape) const;
  Matrix integrate_forward(const Matrix& h, const Vector& scale, GapTape* tape) const;
  Matrix gru_backward(const GruTape& tape, const Matrix& g_out, EncoderParams& grads, Matrix& g_x) const;
  Matrix rhs_backward(const StageTape& tape, const Vector& scale, const Matrix& g_out, EncoderParams& grads) const;
  Matrix integrate_backward(const GapTape& tape, const Matrix& g_out, EncoderParams& grads) const;

  const EncoderParams& params_;
  const EncoderOptions& opts_;
  std::size_t batch_ = 0;
  std::vector<std::vector<std::array<std::uint32_t, 2>>> tokens_;  // per step, per column
  std::vector<GruTape> gru_tapes_;
  std::vector<GapTape> gap_tapes_;
};

/// Single-walk encoding: h'_0 = 0, then alternate g and integration.
Vector encode_walk(const WalkFeatures& walk, const EncoderParams& params, const EncoderOptions& opts);

/// Weighted mean of walk encodings followed by the classifier.
struct ScoreTape {
  Vector pooled, hidden_pre, hidden;
  double logit = 0.0;
};

double classifier_logit(const Vector& pooled, const ClassifierParams& params, ScoreTape* tape = nullptr);

/// Mean over walk encodings (columns of `encodings`), then classifier, then sigmoid.
double pool_and_score(const Matrix& encodings, const EncoderParams& params);

/// Backprop a logit gradient through the classifier; returns dLoss/d(pooled).
Vector classifier_backward(const ScoreTape& tape, double g_logit, const ClassifierParams& params,
                           ClassifierParams& grads);

double sigmoid(double x);
/// Binary cross entropy evaluated from a logit, numerically stable.
double bce_with_logit(double logit, double label);

/// Checkpoint: magic line, JSON header length (8 bytes LE), JSON header, then
/// little-endian float64 tensors in `for_each_tensor` order.
void save_checkpoint(const std::string& path, const EncoderParams& params, const EncoderOptions& opts,
                     std::uint64_t seed, const std::string& extra_json = "{}");
EncoderParams load_checkpoint(const std::string& path, EncoderOptions* opts = nullptr,
                              std::string* header_json = nullptr);

}  // namespace ctwalks

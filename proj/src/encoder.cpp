#include "ctwalks/encoder.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "ctwalks/rng.hpp"

namespace ctwalks {

namespace {

Matrix sigmoid_of(const Matrix& a) { return (1.0 + (-a.array()).exp()).inverse().matrix(); }

bool is_bias(std::string_view name) {
  const auto dot = name.rfind('.');
  return dot != std::string_view::npos && name.substr(dot + 1, 2) == "b_";
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double bce_with_logit(double logit, double label) {
  // softplus(logit) - label * logit
  const double softplus = logit > 0 ? logit + std::log1p(std::exp(-logit)) : std::log1p(std::exp(logit));
  return softplus - label * logit;
}

EncoderParams EncoderParams::zeros(const EncoderShape& shape) {
  const auto h = static_cast<Eigen::Index>(shape.hidden);
  const auto in = static_cast<Eigen::Index>(shape.input_width());
  EncoderParams p;
  p.shape = shape;
  p.g.W_z = Matrix::Zero(h, h);
  p.g.U_z = Matrix::Zero(h, in);
  p.g.b_z = Vector::Zero(h);
  p.g.W_r = Matrix::Zero(h, h);
  p.g.U_r = Matrix::Zero(h, in);
  p.g.b_r = Vector::Zero(h);
  p.g.W_h = Matrix::Zero(h, h);
  p.g.U_h = Matrix::Zero(h, in);
  p.g.b_h = Vector::Zero(h);
  p.f.W_z = Matrix::Zero(h, h);
  p.f.b_z = Vector::Zero(h);
  p.f.W_r = Matrix::Zero(h, h);
  p.f.b_r = Vector::Zero(h);
  p.f.W_h = Matrix::Zero(h, h);
  p.f.b_h = Vector::Zero(h);
  p.community_embeddings =
      Matrix::Zero(static_cast<Eigen::Index>(shape.embedding_rows()), static_cast<Eigen::Index>(shape.community_dim));
  p.classifier.W_1 = Matrix::Zero(h, h);
  p.classifier.b_1 = Vector::Zero(h);
  p.classifier.w_2 = Vector::Zero(h);
  p.classifier.b_2 = Vector::Zero(1);
  return p;
}

EncoderParams EncoderParams::initialized(const EncoderShape& shape, std::uint64_t seed) {
  EncoderParams p = zeros(shape);
  const double bound = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
  SplitMix64 rng(derive_seed(seed, {0x696e6974ULL}));
  for_each_tensor(p, [&](std::string_view name, double* data, Eigen::Index rows, Eigen::Index cols) {
    if (is_bias(name)) return;
    for (Eigen::Index i = 0; i < rows * cols; ++i) data[i] = (2.0 * rng.uniform() - 1.0) * bound;
  });
  return p;
}

std::size_t EncoderParams::parameter_count() const {
  std::size_t n = 0;
  for_each_tensor(*this, [&](std::string_view, const double*, Eigen::Index r, Eigen::Index c) {
    n += static_cast<std::size_t>(r * c);
  });
  return n;
}

std::size_t SolverConfig::steps() const {
  if (!(step_size > 0 && step_size <= 1)) throw std::invalid_argument("step_size must lie in (0, 1]");
  const double n = 1.0 / step_size;
  const double rounded = std::round(n);
  if (std::abs(n - rounded) > 1e-9) throw std::invalid_argument("1/step_size must be an integer");
  return static_cast<std::size_t>(rounded);
}

double SolverConfig::effective_interval(double elapsed) const {
  if (elapsed < 0) throw std::invalid_argument("elapsed time must be non-negative");
  return log_time ? std::log10(elapsed + 1.0) : elapsed;
}

Vector gru_update(const Vector& h_prev, const Vector& x, const GruParams& p) {
  if (h_prev.size() != p.W_z.cols() || x.size() != p.U_z.cols()) throw std::invalid_argument("gru_update shape mismatch");
  const Vector z = sigmoid_of(p.W_z * h_prev + p.U_z * x + p.b_z);
  const Vector r = sigmoid_of(p.W_r * h_prev + p.U_r * x + p.b_r);
  const Vector c = (p.W_h * r.cwiseProduct(h_prev) + p.U_h * x + p.b_h).array().tanh().matrix();
  return z.cwiseProduct(c) + (Vector::Ones(z.size()) - z).cwiseProduct(h_prev);
}

Vector ode_rhs(const Vector& h, const OdeParams& p) {
  if (h.size() != p.W_z.cols()) throw std::invalid_argument("ode_rhs shape mismatch");
  const Vector z = sigmoid_of(p.W_z * h + p.b_z);
  const Vector r = sigmoid_of(p.W_r * h + p.b_r);
  const Vector c = (p.W_h * r.cwiseProduct(h) + p.b_h).array().tanh().matrix();
  return (Vector::Ones(z.size()) - z).cwiseProduct(c - h);
}

Vector integrate(const Vector& h, double elapsed, const OdeParams& params, const SolverConfig& solver) {
  const double scale = solver.effective_interval(elapsed);
  if (scale == 0.0) return h;
  const std::size_t steps = solver.steps();
  Vector y = h;
  auto rhs = [&](double, const Vector& state) -> Vector { return scale * ode_rhs(state, params); };
  for (std::size_t i = 0; i < steps; ++i) {
    y = rk38_step(y, static_cast<double>(i) * solver.step_size, solver.step_size, rhs);
    if (!y.allFinite()) throw DivergenceError("hidden state diverged at RK step " + std::to_string(i));
  }
  return y;
}

std::size_t embedding_row(CommunityId c, const EncoderShape& shape) {
  if (c == kPadCommunity) return shape.communities + 1;
  if (c < shape.communities) return c;
  return shape.communities;
}

Vector attributed_features(const AnonymizedStep& step, const Vector& source_embedding,
                           const Vector& target_embedding, std::span<const double> node_attrs,
                           std::span<const double> edge_attrs, double count_scale) {
  const std::size_t l = step.rep.source_counts.size();
  if (step.rep.target_counts.size() != l) throw std::invalid_argument("source/target count widths differ");
  if (source_embedding.size() != target_embedding.size()) throw std::invalid_argument("embedding widths differ");
  const auto dc = static_cast<std::size_t>(source_embedding.size());
  Vector x(static_cast<Eigen::Index>(2 * l + 2 * dc + node_attrs.size() + edge_attrs.size()));
  Eigen::Index at = 0;
  for (auto c : step.rep.source_counts) x[at++] = count_scale * static_cast<double>(c);
  x.segment(at, static_cast<Eigen::Index>(dc)) = source_embedding;
  at += static_cast<Eigen::Index>(dc);
  for (auto c : step.rep.target_counts) x[at++] = count_scale * static_cast<double>(c);
  x.segment(at, static_cast<Eigen::Index>(dc)) = target_embedding;
  at += static_cast<Eigen::Index>(dc);
  for (double a : node_attrs) x[at++] = a;
  for (double a : edge_attrs) x[at++] = a;
  return x;
}

WalkFeatures make_walk_features(const AnonymizedWalk& walk, const EncoderShape& shape, const EncoderOptions& opts,
                                const std::vector<std::vector<double>>& extras) {
  if (walk.steps.size() != shape.walk_length) throw std::invalid_argument("walk length differs from encoder shape");
  if (!extras.empty() && extras.size() != walk.steps.size()) throw std::invalid_argument("one attribute row per step");
  WalkFeatures f;
  const Vector zero_emb = Vector::Zero(static_cast<Eigen::Index>(shape.community_dim));
  for (std::size_t i = 0; i < walk.steps.size(); ++i) {
    const auto& step = walk.steps[i];
    std::span<const double> attrs;
    if (!extras.empty()) attrs = extras[i];
    if (attrs.size() != shape.attr_width) throw std::invalid_argument("attribute width mismatch");
    f.static_input.push_back(attributed_features(step, zero_emb, zero_emb, attrs, {}, opts.count_scale));
    f.tokens.push_back({static_cast<std::uint32_t>(embedding_row(step.rep.source_community, shape)),
                        static_cast<std::uint32_t>(embedding_row(step.rep.target_community, shape))});
    if (i + 1 < walk.steps.size()) f.intervals.push_back(std::abs(step.t - walk.steps[i + 1].t));
  }
  return f;
}

Matrix BatchEncoder::gru_forward(const Matrix& h_prev, const Matrix& x, GruTape* tape) const {
  const auto& p = params_.g;
  Matrix z = p.W_z * h_prev + p.U_z * x;
  z.colwise() += p.b_z;
  z = sigmoid_of(z);
  Matrix r = p.W_r * h_prev + p.U_r * x;
  r.colwise() += p.b_r;
  r = sigmoid_of(r);
  Matrix c = p.W_h * r.cwiseProduct(h_prev) + p.U_h * x;
  c.colwise() += p.b_h;
  c = c.array().tanh().matrix();
  Matrix out = (z.array() * c.array() + (1.0 - z.array()) * h_prev.array()).matrix();
  if (tape) *tape = GruTape{h_prev, x, std::move(z), std::move(r), std::move(c)};
  return out;
}

Matrix BatchEncoder::rhs_forward(const Matrix& y, const Vector& scale, StageTape* tape) const {
  const auto& p = params_.f;
  Matrix z = p.W_z * y;
  z.colwise() += p.b_z;
  z = sigmoid_of(z);
  Matrix r = p.W_r * y;
  r.colwise() += p.b_r;
  r = sigmoid_of(r);
  Matrix c = p.W_h * r.cwiseProduct(y);
  c.colwise() += p.b_h;
  c = c.array().tanh().matrix();
  Matrix out = ((1.0 - z.array()) * (c - y).array()).matrix();
  out = out * scale.asDiagonal();
  if (tape) *tape = StageTape{y, std::move(z), std::move(r), std::move(c)};
  return out;
}

Matrix BatchEncoder::integrate_forward(const Matrix& h, const Vector& scale, GapTape* tape) const {
  if (!opts_.continuous || scale.isZero(0.0)) {
    if (tape) tape->steps.clear();
    return h;
  }
  const std::size_t steps = opts_.solver.steps();
  const double ds = opts_.solver.step_size;
  if (tape) {
    tape->scale = scale;
    tape->steps.resize(steps);
  }
  Matrix y = h;
  for (std::size_t i = 0; i < steps; ++i) {
    StageTape* st = tape ? tape->steps[i].data() : nullptr;
    const Matrix k1 = rhs_forward(y, scale, st ? &st[0] : nullptr);
    const Matrix k2 = rhs_forward(y + (ds / 3.0) * k1, scale, st ? &st[1] : nullptr);
    const Matrix k3 = rhs_forward(y + ds * (k2 - k1 / 3.0), scale, st ? &st[2] : nullptr);
    const Matrix k4 = rhs_forward(y + ds * (k1 - k2 + k3), scale, st ? &st[3] : nullptr);
    y += (ds / 8.0) * (k1 + 3.0 * k2 + 3.0 * k3 + k4);
    if (!y.allFinite()) throw DivergenceError("hidden state diverged at RK step " + std::to_string(i));
  }
  return y;
}

Matrix BatchEncoder::forward(std::span<const WalkFeatures> walks, bool record) {
  const auto& shape = params_.shape;
  const std::size_t l = shape.walk_length;
  const auto d_h = static_cast<Eigen::Index>(shape.hidden);
  const auto d_in = static_cast<Eigen::Index>(shape.input_width());
  const auto d_c = static_cast<Eigen::Index>(shape.community_dim);
  const auto off_u = static_cast<Eigen::Index>(l);
  const auto off_v = static_cast<Eigen::Index>(2 * l) + d_c;
  batch_ = walks.size();
  const auto b = static_cast<Eigen::Index>(batch_);

  tokens_.assign(l, std::vector<std::array<std::uint32_t, 2>>(batch_));
  gru_tapes_.assign(record ? l : 0, GruTape{});
  gap_tapes_.assign(record && l > 1 ? l - 1 : 0, GapTape{});

  Matrix h = Matrix::Zero(d_h, b);
  for (std::size_t i = 0; i < l; ++i) {
    Matrix x(d_in, b);
    for (Eigen::Index col = 0; col < b; ++col) {
      const auto& w = walks[static_cast<std::size_t>(col)];
      if (w.static_input.size() != l) throw std::invalid_argument("walk features have the wrong length");
      x.col(col) = w.static_input[i];
      tokens_[i][static_cast<std::size_t>(col)] = w.tokens[i];
      if (opts_.use_community_labels) {
        x.col(col).segment(off_u, d_c) = params_.community_embeddings.row(w.tokens[i][0]).transpose();
        x.col(col).segment(off_v, d_c) = params_.community_embeddings.row(w.tokens[i][1]).transpose();
      }
    }
    if (i > 0) {
      Vector scale(b);
      for (Eigen::Index col = 0; col < b; ++col) {
        scale[col] = opts_.solver.effective_interval(walks[static_cast<std::size_t>(col)].intervals[i - 1]);
      }
      h = integrate_forward(h, scale, record ? &gap_tapes_[i - 1] : nullptr);
    }
    h = gru_forward(h, x, record ? &gru_tapes_[i] : nullptr);
  }
  return h;
}

Matrix BatchEncoder::gru_backward(const GruTape& t, const Matrix& g_out, EncoderParams& grads, Matrix& g_x) const {
  const auto& p = params_.g;
  auto& dg = grads.g;
  const Matrix g_z = (g_out.array() * (t.c - t.h_prev).array()).matrix();
  const Matrix g_c = (g_out.array() * t.z.array()).matrix();
  Matrix g_h = (g_out.array() * (1.0 - t.z.array())).matrix();

  const Matrix g_ah = (g_c.array() * (1.0 - t.c.array().square())).matrix();
  const Matrix rh = t.r.cwiseProduct(t.h_prev);
  dg.W_h.noalias() += g_ah * rh.transpose();
  dg.U_h.noalias() += g_ah * t.x.transpose();
  dg.b_h += g_ah.rowwise().sum();
  const Matrix g_rh = p.W_h.transpose() * g_ah;
  const Matrix g_ar = (g_rh.array() * t.h_prev.array() * t.r.array() * (1.0 - t.r.array())).matrix();
  g_h += g_rh.cwiseProduct(t.r);

  const Matrix g_az = (g_z.array() * t.z.array() * (1.0 - t.z.array())).matrix();
  dg.W_z.noalias() += g_az * t.h_prev.transpose();
  dg.U_z.noalias() += g_az * t.x.transpose();
  dg.b_z += g_az.rowwise().sum();
  dg.W_r.noalias() += g_ar * t.h_prev.transpose();
  dg.U_r.noalias() += g_ar * t.x.transpose();
  dg.b_r += g_ar.rowwise().sum();

  g_h.noalias() += p.W_z.transpose() * g_az;
  g_h.noalias() += p.W_r.transpose() * g_ar;
  g_x = p.U_z.transpose() * g_az;
  g_x.noalias() += p.U_r.transpose() * g_ar;
  g_x.noalias() += p.U_h.transpose() * g_ah;
  return g_h;
}

Matrix BatchEncoder::rhs_backward(const StageTape& t, const Vector& scale, const Matrix& g_out,
                                  EncoderParams& grads) const {
  const auto& p = params_.f;
  auto& df = grads.f;
  const Matrix g_f = g_out * scale.asDiagonal();
  const Matrix g_c = (g_f.array() * (1.0 - t.z.array())).matrix();
  const Matrix g_z = (-g_f.array() * (t.c - t.y).array()).matrix();
  Matrix g_y = (-g_f.array() * (1.0 - t.z.array())).matrix();

  const Matrix g_ah = (g_c.array() * (1.0 - t.c.array().square())).matrix();
  df.W_h.noalias() += g_ah * t.r.cwiseProduct(t.y).transpose();
  df.b_h += g_ah.rowwise().sum();
  const Matrix g_ry = p.W_h.transpose() * g_ah;
  const Matrix g_ar = (g_ry.array() * t.y.array() * t.r.array() * (1.0 - t.r.array())).matrix();
  g_y += g_ry.cwiseProduct(t.r);
  const Matrix g_az = (g_z.array() * t.z.array() * (1.0 - t.z.array())).matrix();
  df.W_r.noalias() += g_ar * t.y.transpose();
  df.b_r += g_ar.rowwise().sum();
  df.W_z.noalias() += g_az * t.y.transpose();
  df.b_z += g_az.rowwise().sum();
  g_y.noalias() += p.W_r.transpose() * g_ar;
  g_y.noalias() += p.W_z.transpose() * g_az;
  return g_y;
}

Matrix BatchEncoder::integrate_backward(const GapTape& tape, const Matrix& g_out, EncoderParams& grads) const {
  if (tape.steps.empty()) return g_out;
  const double ds = opts_.solver.step_size;
  Matrix g = g_out;
  for (std::size_t i = tape.steps.size(); i-- > 0;) {
    const auto& st = tape.steps[i];
    Matrix g_y = g;
    Matrix g_k1 = (ds / 8.0) * g;
    Matrix g_k2 = (3.0 * ds / 8.0) * g;
    Matrix g_k3 = (3.0 * ds / 8.0) * g;
    const Matrix g_k4 = (ds / 8.0) * g;

    const Matrix g_y4 = rhs_backward(st[3], tape.scale, g_k4, grads);
    g_y += g_y4;
    g_k1 += ds * g_y4;
    g_k2 -= ds * g_y4;
    g_k3 += ds * g_y4;

    const Matrix g_y3 = rhs_backward(st[2], tape.scale, g_k3, grads);
    g_y += g_y3;
    g_k1 -= (ds / 3.0) * g_y3;
    g_k2 += ds * g_y3;

    const Matrix g_y2 = rhs_backward(st[1], tape.scale, g_k2, grads);
    g_y += g_y2;
    g_k1 += (ds / 3.0) * g_y2;

    g_y += rhs_backward(st[0], tape.scale, g_k1, grads);
    g = std::move(g_y);
  }
  return g;
}

void BatchEncoder::backward(const Matrix& grad_out, EncoderParams& grads) const {
  const std::size_t l = params_.shape.walk_length;
  if (gru_tapes_.size() != l) throw std::logic_error("backward requires a recorded forward pass");
  const auto d_c = static_cast<Eigen::Index>(params_.shape.community_dim);
  const auto off_u = static_cast<Eigen::Index>(l);
  const auto off_v = static_cast<Eigen::Index>(2 * l) + d_c;
  Matrix g = grad_out;
  Matrix g_x;
  for (std::size_t i = l; i-- > 0;) {
    g = gru_backward(gru_tapes_[i], g, grads, g_x);
    if (opts_.use_community_labels) {
      for (std::size_t col = 0; col < batch_; ++col) {
        const auto c = static_cast<Eigen::Index>(col);
        grads.community_embeddings.row(tokens_[i][col][0]) += g_x.col(c).segment(off_u, d_c).transpose();
        grads.community_embeddings.row(tokens_[i][col][1]) += g_x.col(c).segment(off_v, d_c).transpose();
      }
    }
    if (i > 0) g = integrate_backward(gap_tapes_[i - 1], g, grads);
  }
}

Vector encode_walk(const WalkFeatures& walk, const EncoderParams& params, const EncoderOptions& opts) {
  if (walk.static_input.empty()) throw std::invalid_argument("cannot encode an empty walk");
  BatchEncoder enc(params, opts);
  return enc.forward(std::span<const WalkFeatures>(&walk, 1), false).col(0);
}

double classifier_logit(const Vector& pooled, const ClassifierParams& p, ScoreTape* tape) {
  const Vector pre = p.W_1 * pooled + p.b_1;
  const Vector hidden = pre.cwiseMax(0.0);
  const double logit = p.w_2.dot(hidden) + p.b_2[0];
  if (tape) *tape = ScoreTape{pooled, pre, hidden, logit};
  return logit;
}

double pool_and_score(const Matrix& encodings, const EncoderParams& params) {
  if (encodings.cols() == 0) throw std::invalid_argument("pooling needs at least one encoding");
  const Vector pooled = encodings.rowwise().mean();
  return sigmoid(classifier_logit(pooled, params.classifier));
}

Vector classifier_backward(const ScoreTape& tape, double g_logit, const ClassifierParams& p, ClassifierParams& grads) {
  grads.w_2 += g_logit * tape.hidden;
  grads.b_2[0] += g_logit;
  const Vector g_pre = (g_logit * p.w_2).cwiseProduct((tape.hidden_pre.array() > 0.0).cast<double>().matrix());
  grads.W_1.noalias() += g_pre * tape.pooled.transpose();
  grads.b_1 += g_pre;
  return p.W_1.transpose() * g_pre;
}

namespace {

constexpr char kMagic[] = "CTWALKS-CKPT-1\n";

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw std::runtime_error("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const EncoderParams& params, const EncoderOptions& opts,
                     std::uint64_t seed, const std::string& extra_json) {
  nlohmann::json header;
  header["d_h"] = params.shape.hidden;
  header["d_c"] = params.shape.community_dim;
  header["k"] = params.shape.communities;
  header["walk_length"] = params.shape.walk_length;
  header["attr_width"] = params.shape.attr_width;
  header["solver"] = {{"method", "rk38"}, {"step_size", opts.solver.step_size}, {"log_time", opts.solver.log_time}};
  header["options"] = {{"use_community_labels", opts.use_community_labels},
                       {"continuous", opts.continuous},
                       {"count_scale", opts.count_scale}};
  header["seed"] = seed;
  nlohmann::json tensors = nlohmann::json::array();
  for_each_tensor(params, [&](std::string_view name, const double*, Eigen::Index r, Eigen::Index c) {
    tensors.push_back({{"name", std::string(name)}, {"rows", r}, {"cols", c}});
  });
  header["tensors"] = tensors;
  header["extra"] = nlohmann::json::parse(extra_json);
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  out.write(kMagic, sizeof(kMagic) - 1);
  put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for_each_tensor(params, [&](std::string_view, const double* data, Eigen::Index r, Eigen::Index c) {
    for (Eigen::Index i = 0; i < r * c; ++i) put_u64(out, std::bit_cast<std::uint64_t>(data[i]));
  });
}

EncoderParams load_checkpoint(const std::string& path, EncoderOptions* opts, std::string* header_json) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  std::string magic(sizeof(kMagic) - 1, '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (magic != kMagic) throw std::runtime_error("'" + path + "' is not a checkpoint");
  const std::uint64_t len = get_u64(in);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error("truncated checkpoint header");
  const auto header = nlohmann::json::parse(text);
  EncoderShape shape;
  shape.hidden = header.at("d_h").get<std::size_t>();
  shape.community_dim = header.at("d_c").get<std::size_t>();
  shape.communities = header.at("k").get<std::size_t>();
  shape.walk_length = header.at("walk_length").get<std::size_t>();
  shape.attr_width = header.at("attr_width").get<std::size_t>();
  EncoderParams params = EncoderParams::zeros(shape);
  std::size_t index = 0;
  const auto& tensors = header.at("tensors");
  for_each_tensor(params, [&](std::string_view name, double* data, Eigen::Index r, Eigen::Index c) {
    const auto& t = tensors.at(index++);
    if (t.at("name").get<std::string>() != name || t.at("rows").get<Eigen::Index>() != r ||
        t.at("cols").get<Eigen::Index>() != c) {
      throw std::runtime_error("checkpoint tensor layout mismatch at " + std::string(name));
    }
    for (Eigen::Index i = 0; i < r * c; ++i) data[i] = std::bit_cast<double>(get_u64(in));
  });
  if (opts) {
    opts->solver.step_size = header.at("solver").at("step_size").get<double>();
    opts->solver.log_time = header.at("solver").at("log_time").get<bool>();
    opts->use_community_labels = header.at("options").at("use_community_labels").get<bool>();
    opts->continuous = header.at("options").at("continuous").get<bool>();
    opts->count_scale = header.at("options").at("count_scale").get<double>();
  }
  if (header_json) *header_json = text;
  return params;
}

}  // namespace ctwalks

// Copyright 2026 The VISA-VIS Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Two-headed residual MLP: input projection, `depth` fully-connected residual
// blocks, then a masked-softmax policy head and a tanh value head. Gradients
// are computed by hand and applied with plain SGD.
//
// The scalar type is a template parameter: training runs in float, the
// finite-difference gradient checks run in double.

#ifndef VISAVIS_NEURAL_HPP_
#define VISAVIS_NEURAL_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "visavis/errors.hpp"
#include "visavis/game.hpp"

namespace visavis {

struct NetConfig {
  int rows = 3;
  int cols = 3;
  int hidden_width = 128;
  int depth = 2;
  int action_count = 9;
  double l2_lambda = 1e-4;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;

  int input_size() const { return 3 * rows * cols; }

  // Per-game defaults: depth 2 for 3x3 Tic-Tac-Toe, 4 otherwise; width 128.
  static NetConfig for_game(GameId game) {
    const GameShape sh = shape_of(game);
    NetConfig c;
    c.rows = sh.rows;
    c.cols = sh.cols;
    c.action_count = sh.num_actions;
    c.depth = game == GameId::kTicTacToe ? 2 : 4;
    c.learning_rate = game == GameId::kTicTacToe ? 1e-3 : 1e-4;
    return c;
  }

  void validate() const {
    if (rows <= 0 || cols <= 0) throw ConfigInvalid("net: board dims must be positive");
    if (hidden_width <= 0) throw ConfigInvalid("net.hidden_width must be > 0");
    if (depth <= 0) throw ConfigInvalid("net.depth must be > 0");
    if (action_count <= 0) throw ConfigInvalid("net.action_count must be > 0");
    if (!(l2_lambda >= 0)) throw ConfigInvalid("net.l2_lambda must be >= 0");
    if (!(learning_rate >= 0)) throw ConfigInvalid("net.learning_rate must be >= 0");
  }

  // Total scalar parameter count.
  std::int64_t parameter_count() const {
    const std::int64_t w = hidden_width, in = input_size(), a = action_count;
    return in * w + w + depth * 2 * (w * w + w) + w * a + a + w + 1;
  }

  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

struct Prediction {
  std::vector<double> p;  // over the full action space, 0 on illegal actions
  double v = 0.0;
};

struct TrainExample {
  StateEncoding encoding;
  LegalMask mask;
  std::vector<double> pi;
  double z = 0.0;
};

using TrainBatch = std::vector<TrainExample>;

struct LossParts {
  double total = 0.0;
  double value_mse = 0.0;
  double policy_ce = 0.0;
  double l2 = 0.0;
};

inline constexpr double kLogFloor = 1e-12;

template <typename T>
class Network {
 public:
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  struct Block {
    Matrix w1;
    Vector b1;
    Matrix w2;
    Vector b2;
  };

  Network() = default;

  // All-zero parameters with the shapes declared by `config`.
  explicit Network(const NetConfig& config) : config_(config) {
    config.validate();
    const int w = config.hidden_width;
    w_in = Matrix::Zero(w, config.input_size());
    b_in = Vector::Zero(w);
    blocks.resize(config.depth);
    for (Block& b : blocks) {
      b.w1 = Matrix::Zero(w, w);
      b.b1 = Vector::Zero(w);
      b.w2 = Matrix::Zero(w, w);
      b.b2 = Vector::Zero(w);
    }
    w_policy = Matrix::Zero(config.action_count, w);
    b_policy = Vector::Zero(config.action_count);
    w_value = Matrix::Zero(1, w);
    b_value = Vector::Zero(1);
  }

  const NetConfig& config() const { return config_; }

  // Visits every tensor in checkpoint order with a stable name.
  template <typename F>
  void for_each_tensor(F&& f) {
    f("input.w", w_in);
    f("input.b", b_in);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const std::string p = "block" + std::to_string(i);
      f(p + ".w1", blocks[i].w1);
      f(p + ".b1", blocks[i].b1);
      f(p + ".w2", blocks[i].w2);
      f(p + ".b2", blocks[i].b2);
    }
    f("policy.w", w_policy);
    f("policy.b", b_policy);
    f("value.w", w_value);
    f("value.b", b_value);
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    const_cast<Network*>(this)->for_each_tensor(
        [&](const std::string& name, auto& t) { f(name, std::as_const(t)); });
  }

  std::int64_t parameter_count() const {
    std::int64_t n = 0;
    for_each_tensor([&](const std::string&, const auto& t) { n += t.size(); });
    return n;
  }

  double squared_norm() const {
    double s = 0;
    for_each_tensor([&](const std::string&, const auto& t) {
      s += static_cast<double>(t.squaredNorm());
    });
    return s;
  }

  bool all_finite() const {
    bool ok = true;
    for_each_tensor(
        [&](const std::string&, const auto& t) { ok = ok && t.allFinite(); });
    return ok;
  }

  template <typename U>
  Network<U> cast() const {
    Network<U> out(config_);
    out.w_in = w_in.template cast<U>();
    out.b_in = b_in.template cast<U>();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      out.blocks[i].w1 = blocks[i].w1.template cast<U>();
      out.blocks[i].b1 = blocks[i].b1.template cast<U>();
      out.blocks[i].w2 = blocks[i].w2.template cast<U>();
      out.blocks[i].b2 = blocks[i].b2.template cast<U>();
    }
    out.w_policy = w_policy.template cast<U>();
    out.b_policy = b_policy.template cast<U>();
    out.w_value = w_value.template cast<U>();
    out.b_value = b_value.template cast<U>();
    return out;
  }

  // Bitwise equality of config and every parameter.
  bool operator==(const Network& other) const {
    if (!(config_ == other.config_)) return false;
    const auto a = flatten();
    const auto b = other.flatten();
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
  }

  std::vector<T> flatten() const {
    std::vector<T> flat;
    flat.reserve(parameter_count());
    for_each_tensor([&](const std::string&, const auto& t) {
      flat.insert(flat.end(), t.data(), t.data() + t.size());
    });
    return flat;
  }

  Matrix w_in;
  Vector b_in;
  std::vector<Block> blocks;
  Matrix w_policy;
  Vector b_policy;
  Matrix w_value;
  Vector b_value;

 private:
  NetConfig config_;
};

// Weights ~ N(0, 2/fan_in), except the second layer of each residual block and
// the heads which use N(0, 1/fan_in). Biases start at zero.
template <typename T = float>
Network<T> init_network(const NetConfig& config) {
  Network<T> net(config);
  std::mt19937_64 rng(config.seed);
  auto fill = [&](auto& m, double scale) {
    std::normal_distribution<double> dist(0.0, scale);
    for (Eigen::Index i = 0; i < m.size(); ++i)
      m.data()[i] = static_cast<T>(dist(rng));
  };
  const double width = config.hidden_width;
  fill(net.w_in, std::sqrt(2.0 / config.input_size()));
  for (auto& b : net.blocks) {
    fill(b.w1, std::sqrt(2.0 / width));
    fill(b.w2, std::sqrt(1.0 / width));
  }
  fill(net.w_policy, std::sqrt(1.0 / width));
  fill(net.w_value, std::sqrt(1.0 / width));
  return net;
}

namespace internal {

template <typename T>
T relu(T x) {
  return x > T(0) ? x : T(0);
}

// Softmax over the legal entries of `logits`, computed in double.
template <typename Derived>
std::vector<double> masked_softmax(const Eigen::MatrixBase<Derived>& logits,
                                   const LegalMask& mask) {
  const int n = static_cast<int>(mask.size());
  std::vector<double> p(n, 0.0);
  double max_logit = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a)
    if (mask[a]) max_logit = std::max(max_logit, static_cast<double>(logits(a)));
  double sum = 0.0;
  for (int a = 0; a < n; ++a) {
    if (!mask[a]) continue;
    p[a] = std::exp(static_cast<double>(logits(a)) - max_logit);
    sum += p[a];
  }
  for (double& x : p) x /= sum;
  return p;
}

inline void check_shapes(const NetConfig& c, const StateEncoding& enc,
                         const LegalMask& mask) {
  if (static_cast<int>(enc.planes.size()) != c.input_size())
    throw ShapeMismatch("encoding has " + std::to_string(enc.planes.size()) +
                        " values, network expects " +
                        std::to_string(c.input_size()));
  if (static_cast<int>(mask.size()) != c.action_count)
    throw ShapeMismatch("mask has " + std::to_string(mask.size()) +
                        " entries, network expects " +
                        std::to_string(c.action_count));
  bool any = false;
  for (auto m : mask) any = any || m;
  if (!any) throw ShapeMismatch("mask has no legal action");
}

}  // namespace internal

template <typename T>
Prediction forward(const Network<T>& net, const StateEncoding& enc,
                   const LegalMask& mask) {
  internal::check_shapes(net.config(), enc, mask);
  using Vector = typename Network<T>::Vector;
  Vector x(enc.planes.size());
  for (std::size_t i = 0; i < enc.planes.size(); ++i) x(i) = static_cast<T>(enc.planes[i]);

  Vector h = (net.w_in * x + net.b_in).unaryExpr(&internal::relu<T>);
  Vector a(h.size());
  for (const auto& b : net.blocks) {
    a.noalias() = b.w1 * h;
    a = (a + b.b1).unaryExpr(&internal::relu<T>);
    Vector r = b.w2 * a + b.b2;
    h = (h + r).unaryExpr(&internal::relu<T>);
  }
  Vector logits = net.w_policy * h + net.b_policy;
  const T pre = (net.w_value * h)(0) + net.b_value(0);
  return {internal::masked_softmax(logits, mask), std::tanh(static_cast<double>(pre))};
}

template <typename T>
Prediction forward(const Network<T>& net, const GameState& s) {
  return forward(net, encode(s), legal_mask(s));
}

namespace internal {

// Forward pass over a whole batch, keeping what backprop needs.
template <typename T>
struct BatchActivations {
  using Matrix = typename Network<T>::Matrix;
  Matrix x;
  std::vector<Matrix> h;      // h[0] after input layer, h[i+1] after block i
  std::vector<Matrix> a_pre;  // per block, first layer pre-activation
  std::vector<Matrix> a;      // per block, first layer output
  std::vector<Matrix> s_pre;  // per block, residual sum before relu
  Matrix h0_pre;
  Matrix logits;
  Eigen::Matrix<T, 1, Eigen::Dynamic> v_pre;
};

template <typename T>
BatchActivations<T> batch_forward(const Network<T>& net,
                                  const TrainBatch& batch) {
  using Matrix = typename Network<T>::Matrix;
  const NetConfig& c = net.config();
  const int n = static_cast<int>(batch.size());
  BatchActivations<T> act;
  act.x.resize(c.input_size(), n);
  for (int j = 0; j < n; ++j) {
    internal::check_shapes(c, batch[j].encoding, batch[j].mask);
    for (int i = 0; i < c.input_size(); ++i)
      act.x(i, j) = static_cast<T>(batch[j].encoding.planes[i]);
  }
  act.h0_pre = (net.w_in * act.x).colwise() + net.b_in;
  act.h.push_back(act.h0_pre.unaryExpr(&relu<T>));
  for (const auto& b : net.blocks) {
    Matrix a_pre = (b.w1 * act.h.back()).colwise() + b.b1;
    Matrix a = a_pre.unaryExpr(&relu<T>);
    Matrix s_pre = act.h.back() + ((b.w2 * a).colwise() + b.b2);
    act.h.push_back(s_pre.unaryExpr(&relu<T>));
    act.a_pre.push_back(std::move(a_pre));
    act.a.push_back(std::move(a));
    act.s_pre.push_back(std::move(s_pre));
  }
  act.logits = (net.w_policy * act.h.back()).colwise() + net.b_policy;
  act.v_pre = (net.w_value * act.h.back()).array() + net.b_value(0);
  return act;
}

// Per-row policy cross-entropy with the log floor, plus its gradient with
// respect to the logits (exact, including the floor's zero derivative).
template <typename T>
double policy_terms(const BatchActivations<T>& act, const TrainBatch& batch,
                    typename Network<T>::Matrix* dlogits) {
  double ce = 0.0;
  const int n = static_cast<int>(batch.size());
  for (int j = 0; j < n; ++j) {
    const auto& row = batch[j];
    const auto p = masked_softmax(act.logits.col(j), row.mask);
    double active_mass = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
      if (!row.mask[a] || row.pi[a] == 0.0) continue;
      ce -= row.pi[a] * std::log(std::max(p[a], kLogFloor));
      if (p[a] > kLogFloor) active_mass += row.pi[a];
    }
    if (dlogits) {
      for (std::size_t a = 0; a < p.size(); ++a) {
        double g = 0.0;
        if (row.mask[a]) {
          g = p[a] * active_mass;
          if (p[a] > kLogFloor) g -= row.pi[a];
        }
        (*dlogits)(a, j) = static_cast<T>(g / n);
      }
    }
  }
  return ce / n;
}

}  // namespace internal

// Mean over the batch of (z - v)^2 - pi . log p, plus lambda * ||theta||^2.
template <typename T>
LossParts loss(const Network<T>& net, const TrainBatch& batch) {
  if (batch.empty()) throw std::invalid_argument("loss of an empty batch");
  const auto act = internal::batch_forward(net, batch);
  LossParts parts;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const double v = std::tanh(static_cast<double>(act.v_pre(j)));
    parts.value_mse += (batch[j].z - v) * (batch[j].z - v);
  }
  parts.value_mse /= batch.size();
  parts.policy_ce = internal::policy_terms(act, batch, nullptr);
  parts.l2 = net.config().l2_lambda * net.squared_norm();
  parts.total = parts.value_mse + parts.policy_ce + parts.l2;
  return parts;
}

// Exact gradient of loss() with respect to every parameter.
template <typename T>
Network<T> gradients(const Network<T>& net, const TrainBatch& batch,
                     LossParts* parts_out = nullptr) {
  using Matrix = typename Network<T>::Matrix;
  if (batch.empty()) throw std::invalid_argument("gradient of an empty batch");
  const NetConfig& c = net.config();
  const int n = static_cast<int>(batch.size());
  const auto act = internal::batch_forward(net, batch);
  Network<T> g(c);

  Matrix dlogits(c.action_count, n);
  LossParts parts;
  parts.policy_ce = internal::policy_terms(act, batch, &dlogits);

  Eigen::Matrix<T, 1, Eigen::Dynamic> dv_pre(n);
  for (int j = 0; j < n; ++j) {
    const double v = std::tanh(static_cast<double>(act.v_pre(j)));
    const double diff = batch[j].z - v;
    parts.value_mse += diff * diff;
    dv_pre(j) = static_cast<T>(-2.0 * diff * (1.0 - v * v) / n);
  }
  parts.value_mse /= n;

  const Matrix& h_last = act.h.back();
  g.w_policy = dlogits * h_last.transpose();
  g.b_policy = dlogits.rowwise().sum();
  g.w_value = dv_pre * h_last.transpose();
  g.b_value(0) = dv_pre.sum();
  Matrix dh = net.w_policy.transpose() * dlogits +
              net.w_value.transpose() * dv_pre;

  for (int i = static_cast<int>(net.blocks.size()) - 1; i >= 0; --i) {
    const auto& b = net.blocks[i];
    Matrix ds = dh.cwiseProduct(
        act.s_pre[i].unaryExpr([](T x) { return x > T(0) ? T(1) : T(0); }));
    g.blocks[i].w2 = ds * act.a[i].transpose();
    g.blocks[i].b2 = ds.rowwise().sum();
    Matrix da = (b.w2.transpose() * ds)
                    .cwiseProduct(act.a_pre[i].unaryExpr(
                        [](T x) { return x > T(0) ? T(1) : T(0); }));
    g.blocks[i].w1 = da * act.h[i].transpose();
    g.blocks[i].b1 = da.rowwise().sum();
    dh = ds + b.w1.transpose() * da;
  }
  Matrix dh0 = dh.cwiseProduct(
      act.h0_pre.unaryExpr([](T x) { return x > T(0) ? T(1) : T(0); }));
  g.w_in = dh0 * act.x.transpose();
  g.b_in = dh0.rowwise().sum();

  const T two_lambda = static_cast<T>(2.0 * c.l2_lambda);
  if (c.l2_lambda > 0) {
    const auto theta = net.flatten();
    std::size_t offset = 0;
    g.for_each_tensor([&](const std::string&, auto& t) {
      for (Eigen::Index k = 0; k < t.size(); ++k)
        t.data()[k] += two_lambda * theta[offset + k];
      offset += t.size();
    });
  }
  if (parts_out) {
    parts.l2 = c.l2_lambda * net.squared_norm();
    parts.total = parts.value_mse + parts.policy_ce + parts.l2;
    *parts_out = parts;
  }
  return g;
}

struct SgdState {
  std::int64_t steps = 0;
};

struct StepStats {
  LossParts loss;  // evaluated before the update
  double grad_norm = 0.0;
};

// One SGD step at config().learning_rate. On a non-finite gradient the
// parameters are left untouched and NonFiniteGradient names the tensor.
template <typename T>
StepStats grad_step(Network<T>& net, const TrainBatch& batch, SgdState& opt) {
  StepStats stats;
  Network<T> g = gradients(net, batch, &stats.loss);
  std::string bad;
  double norm2 = 0.0;
  g.for_each_tensor([&](const std::string& name, const auto& t) {
    if (bad.empty() && !t.allFinite()) bad = name;
    norm2 += static_cast<double>(t.squaredNorm());
  });
  if (bad.empty() && !std::isfinite(stats.loss.total)) bad = "loss";
  if (!bad.empty())
    throw NonFiniteGradient(bad, "non-finite gradient in " + bad);
  stats.grad_norm = std::sqrt(norm2);
  const T lr = static_cast<T>(net.config().learning_rate);
  std::vector<T> flat_grad = g.flatten();
  std::size_t offset = 0;
  net.for_each_tensor([&](const std::string&, auto& t) {
    for (Eigen::Index k = 0; k < t.size(); ++k)
      t.data()[k] -= lr * flat_grad[offset + k];
    offset += t.size();
  });
  ++opt.steps;
  return stats;
}

// ---------------------------------------------------------------------------
// Checkpoints: "VVIS", u32 format version, u32 config length, config as
// "key=value" lines, u64 value count, then little-endian float32 values in
// for_each_tensor order.

inline constexpr std::uint32_t kCheckpointVersion = 1;

inline std::string config_to_text(const NetConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "rows=" << c.rows << "\ncols=" << c.cols
      << "\nhidden_width=" << c.hidden_width << "\ndepth=" << c.depth
      << "\naction_count=" << c.action_count << "\nl2_lambda=" << c.l2_lambda
      << "\nlearning_rate=" << c.learning_rate << "\nseed=" << c.seed << "\n";
  return out.str();
}

inline NetConfig config_from_text(const std::string& text) {
  NetConfig c;
  std::istringstream in(text);
  std::string line;
  int seen = 0;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CorruptCheckpoint("bad config line: " + line);
    const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    try {
      if (key == "rows") c.rows = std::stoi(val);
      else if (key == "cols") c.cols = std::stoi(val);
      else if (key == "hidden_width") c.hidden_width = std::stoi(val);
      else if (key == "depth") c.depth = std::stoi(val);
      else if (key == "action_count") c.action_count = std::stoi(val);
      else if (key == "l2_lambda") c.l2_lambda = std::stod(val);
      else if (key == "learning_rate") c.learning_rate = std::stod(val);
      else if (key == "seed") c.seed = std::stoull(val);
      else throw CorruptCheckpoint("unknown config key: " + key);
    } catch (const std::logic_error&) {
      throw CorruptCheckpoint("bad config value: " + line);
    }
    ++seen;
  }
  if (seen != 8) throw CorruptCheckpoint("incomplete config block");
  try {
    c.validate();
  } catch (const ConfigInvalid& e) {
    throw CorruptCheckpoint(e.what());
  }
  return c;
}

namespace internal {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}
inline std::uint64_t get_le(const std::string& in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace internal

template <typename T>
std::string serialize_checkpoint(const Network<T>& net) {
  std::string out = "VVIS";
  internal::put_u32(out, kCheckpointVersion);
  const std::string cfg = config_to_text(net.config());
  internal::put_u32(out, static_cast<std::uint32_t>(cfg.size()));
  out += cfg;
  const auto flat = net.flatten();
  internal::put_u64(out, flat.size());
  for (T value : flat)
    internal::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(value)));
  return out;
}

inline Network<float> deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "VVIS") != 0)
    throw CorruptCheckpoint("missing checkpoint magic");
  const auto version = static_cast<std::uint32_t>(internal::get_le(bytes, 4, 4));
  if (version != kCheckpointVersion)
    throw VersionMismatch("checkpoint format version " + std::to_string(version) +
                          ", expected " + std::to_string(kCheckpointVersion));
  const auto cfg_len = internal::get_le(bytes, 8, 4);
  if (bytes.size() < 12 + cfg_len + 8) throw CorruptCheckpoint("truncated header");
  const NetConfig config = config_from_text(bytes.substr(12, cfg_len));
  std::size_t pos = 12 + cfg_len;
  const auto count = internal::get_le(bytes, pos, 8);
  pos += 8;
  if (static_cast<std::int64_t>(count) != config.parameter_count())
    throw CorruptCheckpoint("value count does not match the config");
  if (bytes.size() != pos + 4 * count)
    throw CorruptCheckpoint("checkpoint size mismatch (truncated or padded)");
  Network<float> net(config);
  net.for_each_tensor([&](const std::string&, auto& t) {
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      t.data()[k] = std::bit_cast<float>(
          static_cast<std::uint32_t>(internal::get_le(bytes, pos, 4)));
      pos += 4;
    }
  });
  return net;
}

template <typename T>
void save_checkpoint(const Network<T>& net, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(net);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to " + path.string());
}

inline Network<float> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace visavis

#endif  // VISAVIS_NEURAL_HPP_

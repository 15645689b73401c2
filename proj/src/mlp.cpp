/* Copyright 2026 The glp Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "glp/mlp.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "glp/error.hpp"

namespace glp {

double activate(Activation a, double x) noexcept {
  switch (a) {
    case Activation::leaky_relu: return x > 0.0 ? x : kLeakySlope * x;
    case Activation::tanh: return std::tanh(x);
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::identity: return x;
  }
  return x;
}

double activate_grad(Activation a, double x) noexcept {
  switch (a) {
    case Activation::leaky_relu: return x > 0.0 ? 1.0 : kLeakySlope;
    case Activation::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
    case Activation::identity: return 1.0;
  }
  return 1.0;
}

double activate_grad2(Activation a, double x) noexcept {
  switch (a) {
    case Activation::tanh: {
      const double t = std::tanh(x);
      return -2.0 * t * (1.0 - t * t);
    }
    case Activation::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s) * (1.0 - 2.0 * s);
    }
    default: return 0.0;
  }
}

Eigen::MatrixXd spectral_normalize(const Eigen::MatrixXd& w, SpectralState& state) {
  if (state.u.size() != w.rows()) state.u = Eigen::VectorXd::Ones(w.rows()) / std::sqrt(double(w.rows()));
  if (state.v.size() != w.cols()) state.v = Eigen::VectorXd::Ones(w.cols()) / std::sqrt(double(w.cols()));
  Eigen::VectorXd v = w.transpose() * state.u;
  const double vn = v.norm();
  if (vn > 0.0) state.v = v / vn;
  Eigen::VectorXd u = w * state.v;
  const double un = u.norm();
  if (un > 0.0) state.u = u / un;
  state.sigma = state.u.dot(w * state.v);
  if (!(state.sigma > 0.0)) return w;
  return w / state.sigma;
}

Mlp::Mlp(std::vector<std::size_t> sizes, std::vector<Activation> activations) {
  require(sizes.size() >= 2, "Mlp: need at least input and output sizes");
  require(activations.size() + 1 == sizes.size(), "Mlp: activations must match layer count");
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    require(sizes[l] >= 1 && sizes[l + 1] >= 1, "Mlp: zero-width layer");
    Layer layer;
    layer.weight = Eigen::MatrixXd::Zero(sizes[l + 1], sizes[l]);
    layer.bias = Eigen::VectorXd::Zero(sizes[l + 1]);
    layer.activation = activations[l];
    layers_.push_back(std::move(layer));
  }
}

Mlp Mlp::random(std::vector<std::size_t> sizes, std::vector<Activation> activations, Rng& rng) {
  Mlp net(std::move(sizes), std::move(activations));
  for (auto& layer : net.layers_) {
    const double gain = layer.activation == Activation::leaky_relu ? 2.0 : 1.0;
    const double scale = std::sqrt(gain / static_cast<double>(layer.weight.cols()));
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) layer.weight(r, c) = scale * rng.normal();
  }
  return net;
}

std::vector<std::size_t> Mlp::sizes() const {
  std::vector<std::size_t> s;
  if (layers_.empty()) return s;
  s.push_back(input_dim());
  for (const auto& l : layers_) s.push_back(l.weight.rows());
  return s;
}

void Mlp::enable_spectral_norm(Rng& rng, int warmup) {
  spectral_.assign(layers_.size(), {});
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    auto& st = spectral_[l];
    st.u.resize(layers_[l].weight.rows());
    for (Eigen::Index i = 0; i < st.u.size(); ++i) st.u[i] = rng.normal();
    st.u.normalize();
    st.v = Eigen::VectorXd::Zero(layers_[l].weight.cols());
  }
  for (int i = 0; i < warmup; ++i) power_iterate();
}

void Mlp::set_spectral_states(std::vector<SpectralState> states) {
  require(states.empty() || states.size() == layers_.size(), "Mlp: spectral state count mismatch");
  for (std::size_t l = 0; l < states.size(); ++l) {
    require(states[l].u.size() == layers_[l].weight.rows() && states[l].v.size() == layers_[l].weight.cols(),
            "Mlp: spectral state shape mismatch");
  }
  spectral_ = std::move(states);
}

void Mlp::power_iterate() {
  for (std::size_t l = 0; l < spectral_.size(); ++l) (void)spectral_normalize(layers_[l].weight, spectral_[l]);
}

Eigen::MatrixXd Mlp::effective_weight(std::size_t layer) const {
  if (spectral_.empty() || !(spectral_[layer].sigma > 0.0)) return layers_[layer].weight;
  return layers_[layer].weight / spectral_[layer].sigma;
}

std::size_t Mlp::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

std::vector<double> Mlp::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weight.data(), l.weight.data() + l.weight.size());
    out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
  }
  return out;
}

void Mlp::set_flat_parameters(std::span<const double> params) {
  require(params.size() == parameter_count(), "Mlp: parameter count mismatch");
  std::size_t k = 0;
  for (auto& l : layers_) {
    std::memcpy(l.weight.data(), params.data() + k, sizeof(double) * l.weight.size());
    k += l.weight.size();
    std::memcpy(l.bias.data(), params.data() + k, sizeof(double) * l.bias.size());
    k += l.bias.size();
  }
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    const auto& x = a.layers_[l];
    const auto& y = b.layers_[l];
    if (x.activation != y.activation || x.weight.rows() != y.weight.rows() ||
        x.weight.cols() != y.weight.cols() || x.weight != y.weight || x.bias != y.bias)
      return false;
  }
  return true;
}

namespace {

void apply_activation(Activation a, Eigen::MatrixXd& m) {
  switch (a) {
    case Activation::identity: return;
    case Activation::leaky_relu: m = m.unaryExpr([](double x) { return x > 0.0 ? x : kLeakySlope * x; }); return;
    case Activation::tanh: m = m.array().tanh().matrix(); return;
    case Activation::sigmoid: m = m.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); }); return;
  }
}

Eigen::MatrixXd activation_grad(Activation a, const Eigen::MatrixXd& pre) {
  return pre.unaryExpr([a](double x) { return activate_grad(a, x); });
}

}  // namespace

ForwardCache mlp_forward(const Mlp& net, const Eigen::MatrixXd& x) {
  require(net.num_layers() > 0, "mlp_forward: empty network");
  require(static_cast<std::size_t>(x.rows()) == net.input_dim(), "mlp_forward: input dimension mismatch");
  ForwardCache cache;
  cache.inputs.reserve(net.num_layers());
  cache.pre.reserve(net.num_layers());
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& layer = net.layers()[l];
    Eigen::MatrixXd pre = net.effective_weight(l) * a;
    pre.colwise() += layer.bias;
    cache.inputs.push_back(std::move(a));
    a = pre;
    apply_activation(layer.activation, a);
    cache.pre.push_back(std::move(pre));
  }
  cache.output = std::move(a);
  return cache;
}

Eigen::MatrixXd mlp_predict(const Mlp& net, const Eigen::MatrixXd& x) {
  require(static_cast<std::size_t>(x.rows()) == net.input_dim(), "mlp_predict: input dimension mismatch");
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    Eigen::MatrixXd pre = net.effective_weight(l) * a;
    pre.colwise() += net.layers()[l].bias;
    apply_activation(net.layers()[l].activation, pre);
    a = std::move(pre);
  }
  return a;
}

Eigen::VectorXd mlp_predict(const Mlp& net, const Eigen::VectorXd& x) {
  return mlp_predict(net, Eigen::MatrixXd(x)).col(0);
}

MlpGradients MlpGradients::zeros_like(const Mlp& net) {
  MlpGradients g;
  for (const auto& l : net.layers()) {
    g.weight.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
    g.bias.push_back(Eigen::VectorXd::Zero(l.bias.size()));
  }
  return g;
}

std::vector<double> MlpGradients::flat() const {
  std::vector<double> out;
  for (std::size_t l = 0; l < weight.size(); ++l) {
    out.insert(out.end(), weight[l].data(), weight[l].data() + weight[l].size());
    out.insert(out.end(), bias[l].data(), bias[l].data() + bias[l].size());
  }
  return out;
}

MlpGradients& MlpGradients::operator+=(const MlpGradients& other) {
  require(weight.size() == other.weight.size(), "MlpGradients: shape mismatch");
  for (std::size_t l = 0; l < weight.size(); ++l) {
    weight[l] += other.weight[l];
    bias[l] += other.bias[l];
  }
  return *this;
}

MlpGradients& MlpGradients::operator*=(double s) {
  for (auto& w : weight) w *= s;
  for (auto& b : bias) b *= s;
  input *= s;
  return *this;
}

MlpGradients mlp_grad(const Mlp& net, const ForwardCache& cache, const Eigen::MatrixXd& upstream) {
  const std::size_t L = net.num_layers();
  require(cache.pre.size() == L && cache.inputs.size() == L, "mlp_grad: cache does not match network");
  require(upstream.rows() == cache.output.rows() && upstream.cols() == cache.output.cols(),
          "mlp_grad: upstream gradient shape mismatch");

  MlpGradients g;
  g.weight.resize(L);
  g.bias.resize(L);
  Eigen::MatrixXd delta =
      upstream.cwiseProduct(activation_grad(net.layers()[L - 1].activation, cache.pre[L - 1]));
  for (std::size_t l = L; l-- > 0;) {
    g.weight[l] = delta * cache.inputs[l].transpose();
    g.bias[l] = delta.rowwise().sum();
    Eigen::MatrixXd back = net.effective_weight(l).transpose() * delta;
    if (l > 0) {
      delta = back.cwiseProduct(activation_grad(net.layers()[l - 1].activation, cache.pre[l - 1]));
    } else {
      g.input = std::move(back);
    }
  }
  chain_spectral_norm(net, g);
  return g;
}

void chain_spectral_norm(const Mlp& net, MlpGradients& grads) {
  if (!net.spectral_norm()) return;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& st = net.spectral_states()[l];
    if (!(st.sigma > 0.0)) continue;
    const Eigen::MatrixXd w_eff = net.effective_weight(l);
    const double proj = grads.weight[l].cwiseProduct(w_eff).sum();
    grads.weight[l] = (grads.weight[l] - proj * st.u * st.v.transpose()) / st.sigma;
  }
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& cfg) {
  require(params.size() == grads.size(), "adam_step: gradient size mismatch");
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.t = 0;
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

void adam_step(Mlp& net, const MlpGradients& grads, AdamState& state, const AdamConfig& cfg) {
  auto params = net.flat_parameters();
  const auto g = grads.flat();
  adam_step(params, g, state, cfg);
  net.set_flat_parameters(params);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[4] = {'G', 'L', 'P', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}
  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return std::bit_cast<double>(v);
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) fail(Errc::format, "checkpoint: truncated file");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Mlp& net) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(net.num_layers()));
  put_u32(out, static_cast<std::uint32_t>(net.input_dim()));
  for (const auto& l : net.layers()) {
    put_u32(out, static_cast<std::uint32_t>(l.weight.rows()));
    out.push_back(static_cast<std::uint8_t>(l.activation));
  }
  out.push_back(net.spectral_norm() ? 1 : 0);
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    const auto& l = net.layers()[k];
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) put_f64(out, l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) put_f64(out, l.bias[r]);
    if (net.spectral_norm()) {
      const auto& st = net.spectral_states()[k];
      put_f64(out, st.sigma);
      for (Eigen::Index i = 0; i < st.u.size(); ++i) put_f64(out, st.u[i]);
      for (Eigen::Index i = 0; i < st.v.size(); ++i) put_f64(out, st.v[i]);
    }
  }
  return out;
}

Mlp decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    fail(Errc::format, "checkpoint: bad magic");
  }
  Reader in(bytes.subspan(4));
  const auto version = in.u32();
  if (version != kCheckpointVersion) fail(Errc::format, "checkpoint: unsupported version " + std::to_string(version));
  const auto n_layers = in.u32();
  if (n_layers == 0 || n_layers > 1024) fail(Errc::format, "checkpoint: bad layer count");
  std::vector<std::size_t> sizes{in.u32()};
  std::vector<Activation> acts;
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    sizes.push_back(in.u32());
    const auto a = in.u8();
    if (a > static_cast<std::uint8_t>(Activation::identity)) fail(Errc::format, "checkpoint: bad activation");
    acts.push_back(static_cast<Activation>(a));
  }
  for (auto s : sizes)
    if (s == 0 || s > (1u << 24)) fail(Errc::format, "checkpoint: bad layer size");
  const bool sn = in.u8() != 0;
  Mlp net(sizes, acts);
  std::vector<SpectralState> states;
  for (auto& l : net.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = in.f64();
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = in.f64();
    if (sn) {
      SpectralState st;
      st.sigma = in.f64();
      st.u.resize(l.weight.rows());
      st.v.resize(l.weight.cols());
      for (Eigen::Index i = 0; i < st.u.size(); ++i) st.u[i] = in.f64();
      for (Eigen::Index i = 0; i < st.v.size(); ++i) st.v[i] = in.f64();
      states.push_back(std::move(st));
    }
  }
  if (!in.done()) fail(Errc::format, "checkpoint: trailing bytes");
  if (sn) net.set_spectral_states(std::move(states));
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const Mlp& net) {
  const auto bytes = encode_checkpoint(net);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Mlp load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes(std::istreambuf_iterator<char>(in), {});
  return decode_checkpoint(bytes);
}

}  // namespace glp

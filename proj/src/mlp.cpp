// Copyright 2026 The metricopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "metricopt/mlp.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "metricopt/binary_io.hpp"
#include "metricopt/errors.hpp"

namespace metricopt {
namespace {

constexpr std::string_view kCheckpointMagic = "MOPTNN";
constexpr std::uint32_t kCheckpointVersion = 1;

double logistic(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

DenseLayer zeros_like(const DenseLayer& layer) {
  return {Matrix::Zero(layer.weight.rows(), layer.weight.cols()), Vector::Zero(layer.bias.size())};
}

}  // namespace

MlpModel::MlpModel(std::size_t input_dim, std::vector<std::size_t> hidden, double dropout,
                   std::uint64_t seed)
    : input_dim_(input_dim), hidden_(std::move(hidden)), dropout_(dropout) {
  if (input_dim_ < 1) throw InvalidArgument("input width must be at least 1");
  if (!(dropout_ >= 0.0 && dropout_ < 1.0)) throw InvalidArgument("dropout must lie in [0, 1)");
  for (auto w : hidden_) {
    if (w < 1) throw InvalidArgument("hidden widths must be at least 1");
  }

  Engine engine = make_engine(seed, Stream::init);
  std::size_t fan_in = input_dim_;
  auto add_layer = [&](std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> uniform(-limit, limit);
    DenseLayer layer{Matrix(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in)),
                     Vector::Zero(static_cast<Eigen::Index>(fan_out))};
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = uniform(engine);
    }
    layers_.push_back(std::move(layer));
    fan_in = fan_out;
  };
  for (auto w : hidden_) add_layer(w);
  add_layer(1);
  for (const auto& layer : layers_) grads_.push_back(zeros_like(layer));
}

Vector MlpModel::run(const Matrix& features, bool train_mode, Engine* rng, Cache* cache) const {
  if (static_cast<std::size_t>(features.cols()) != input_dim_) {
    throw ShapeMismatch("model expects " + std::to_string(input_dim_) + " features, got " +
                        std::to_string(features.cols()));
  }
  const bool drop = train_mode && dropout_ > 0.0;
  const double keep = 1.0 - dropout_;
  std::bernoulli_distribution keep_unit(keep);

  if (cache) {
    cache->input = features;
    cache->pre.clear();
    cache->mask.clear();
    cache->act.clear();
  }
  Matrix a = features;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    Matrix z = (a * layer.weight.transpose()).rowwise() + layer.bias.transpose();
    a = z.cwiseMax(0.0);
    Matrix mask;
    if (drop) {
      mask.resize(a.rows(), a.cols());
      for (Eigen::Index r = 0; r < mask.rows(); ++r) {
        for (Eigen::Index c = 0; c < mask.cols(); ++c) mask(r, c) = keep_unit(*rng) ? 1.0 / keep : 0.0;
      }
      a = a.cwiseProduct(mask);
    }
    if (cache) {
      cache->pre.push_back(std::move(z));
      cache->mask.push_back(std::move(mask));
      cache->act.push_back(a);
    }
  }
  const auto& out_layer = layers_.back();
  Vector logits = a * out_layer.weight.row(0).transpose();
  logits.array() += out_layer.bias(0);
  Vector p = logits.unaryExpr([](double z) { return logistic(z); });
  if (cache) {
    cache->output = p;
    cache->valid = true;
  }
  return p;
}

Vector MlpModel::forward(const Matrix& features, bool train_mode, Engine& rng) {
  return run(features, train_mode, &rng, &cache_);
}

Vector MlpModel::forward(const Matrix& features) { return run(features, false, nullptr, &cache_); }

Vector MlpModel::predict(const Matrix& features) const {
  return run(features, false, nullptr, nullptr);
}

void MlpModel::backward(std::span<const double> loss_grad) {
  if (!cache_.valid) throw ShapeMismatch("backward called without a cached forward pass");
  if (static_cast<Eigen::Index>(loss_grad.size()) != cache_.output.size()) {
    throw ShapeMismatch("stale forward cache: " + std::to_string(cache_.output.size()) +
                        " cached rows, " + std::to_string(loss_grad.size()) + " gradients");
  }
  const Eigen::Map<const Vector> g(loss_grad.data(), static_cast<Eigen::Index>(loss_grad.size()));
  const Vector& p = cache_.output;
  const Vector dz = g.array() * p.array() * (1.0 - p.array());

  const std::size_t last = layers_.size() - 1;
  const Matrix& below = last == 0 ? cache_.input : cache_.act[last - 1];
  grads_[last].weight.row(0) += dz.transpose() * below;
  grads_[last].bias(0) += dz.sum();
  Matrix da = dz * layers_[last].weight;  // n x width

  for (std::size_t l = last; l-- > 0;) {
    if (cache_.mask[l].size() != 0) da = da.cwiseProduct(cache_.mask[l]);
    const Matrix dpre = (da.array() * (cache_.pre[l].array() > 0.0).cast<double>()).matrix();
    const Matrix& in = l == 0 ? cache_.input : cache_.act[l - 1];
    grads_[l].weight += dpre.transpose() * in;
    grads_[l].bias += dpre.colwise().sum().transpose();
    if (l > 0) da = dpre * layers_[l].weight;
  }
}

void MlpModel::zero_grad() {
  for (auto& g : grads_) {
    g.weight.setZero();
    g.bias.setZero();
  }
}

std::size_t MlpModel::parameter_count() const noexcept {
  std::size_t total = 0;
  for (const auto& l : layers_) total += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return total;
}

std::pair<std::size_t, std::size_t> MlpModel::locate(std::size_t index) const {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto n = static_cast<std::size_t>(layers_[l].weight.size() + layers_[l].bias.size());
    if (index < n) return {l, index};
    index -= n;
  }
  throw InvalidArgument("parameter index out of range");
}

double MlpModel::parameter(std::size_t index) const {
  const auto [l, i] = locate(index);
  const auto& layer = layers_[l];
  const auto w = static_cast<std::size_t>(layer.weight.size());
  return i < w ? layer.weight.data()[i] : layer.bias(static_cast<Eigen::Index>(i - w));
}

void MlpModel::set_parameter(std::size_t index, double value) {
  const auto [l, i] = locate(index);
  auto& layer = layers_[l];
  const auto w = static_cast<std::size_t>(layer.weight.size());
  if (i < w) {
    layer.weight.data()[i] = value;
  } else {
    layer.bias(static_cast<Eigen::Index>(i - w)) = value;
  }
  cache_.valid = false;
}

double MlpModel::gradient(std::size_t index) const {
  const auto [l, i] = locate(index);
  const auto& g = grads_[l];
  const auto w = static_cast<std::size_t>(g.weight.size());
  return i < w ? g.weight.data()[i] : g.bias(static_cast<Eigen::Index>(i - w));
}

bool MlpModel::all_finite() const {
  for (const auto& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

void save_checkpoint(const MlpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  binary::write_magic(out, kCheckpointMagic);
  binary::write_u32(out, kCheckpointVersion);
  binary::write_f64(out, model.dropout());
  binary::write_u64(out, model.input_dim());
  binary::write_u64(out, model.layers().size());
  for (const auto& layer : model.layers()) {
    binary::write_u64(out, static_cast<std::uint64_t>(layer.weight.rows()));
    binary::write_u64(out, static_cast<std::uint64_t>(layer.weight.cols()));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) binary::write_f64(out, layer.weight(r, c));
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) binary::write_f64(out, layer.bias(r));
  }
  if (!out) throw DataError("failed writing " + path.string());
}

MlpModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  binary::expect_magic(in, kCheckpointMagic, "model checkpoint");
  const std::uint32_t version = binary::read_u32(in);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  const double dropout = binary::read_f64(in);
  const std::uint64_t input_dim = binary::read_u64(in);
  const std::uint64_t count = binary::read_u64(in);
  if (count < 1 || count > 64) throw DataError("implausible layer count in checkpoint");

  std::vector<DenseLayer> layers;
  std::uint64_t expected_cols = input_dim;
  for (std::uint64_t l = 0; l < count; ++l) {
    const std::uint64_t rows = binary::read_u64(in);
    const std::uint64_t cols = binary::read_u64(in);
    if (cols != expected_cols || rows < 1 || rows > (1u << 20)) {
      throw DataError("inconsistent layer shapes in checkpoint");
    }
    DenseLayer layer{Matrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)),
                     Vector(static_cast<Eigen::Index>(rows))};
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = binary::read_f64(in);
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = binary::read_f64(in);
    layers.push_back(std::move(layer));
    expected_cols = rows;
  }
  if (layers.back().weight.rows() != 1) throw DataError("checkpoint output layer must have one unit");

  std::vector<std::size_t> hidden;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    hidden.push_back(static_cast<std::size_t>(layers[l].weight.rows()));
  }
  MlpModel model(input_dim, hidden, dropout, 0);
  model.layers() = std::move(layers);
  if (!model.all_finite()) throw DataError("checkpoint contains non-finite parameters");
  return model;
}

}  // namespace metricopt

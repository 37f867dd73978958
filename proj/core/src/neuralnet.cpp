#include "ivuq/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "ivuq/errors.hpp"
#include "ivuq/rng.hpp"
#include "ivuq/synthdata.hpp"

namespace ivuq {

namespace {

constexpr std::uint64_t kStreamInit = 0x696e6974ULL;
constexpr std::uint64_t kStreamShuffle = 0x73687566ULL;
constexpr std::size_t kEvalChunk = 4096;

void apply_elu(const Matrix& z, Matrix& a) {
  a.resize(z.rows(), z.cols());
  const Eigen::Index n = z.size();
  const double* zp = z.data();
  double* ap = a.data();
  for (Eigen::Index i = 0; i < n; ++i) ap[i] = elu(zp[i]);
}

}  // namespace

DenseNetwork::DenseNetwork(std::vector<std::size_t> layer_sizes, std::vector<double> params)
    : sizes_(std::move(layer_sizes)), params_(params.begin(), params.end()) {
  if (sizes_.size() < 2) throw InvalidArgument("network needs at least an input and an output layer");
  for (std::size_t s : sizes_)
    if (s == 0) throw InvalidArgument("layer sizes must be positive");
  if (params_.size() != parameter_count(sizes_)) {
    std::ostringstream msg;
    msg << "parameter vector has " << params_.size() << " entries, topology needs " << parameter_count(sizes_);
    throw InvalidArgument(msg.str());
  }
  offsets_.resize(num_affine());
  std::size_t off = 0;
  for (std::size_t l = 0; l < num_affine(); ++l) {
    offsets_[l] = off;
    off += sizes_[l + 1] * sizes_[l] + sizes_[l + 1];
  }
}

std::size_t DenseNetwork::parameter_count(std::span<const std::size_t> sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) n += sizes[l + 1] * sizes[l] + sizes[l + 1];
  return n;
}

Eigen::Map<const Matrix> DenseNetwork::weight(std::size_t l) const {
  return {params_.data() + offsets_[l], static_cast<Eigen::Index>(sizes_[l + 1]),
          static_cast<Eigen::Index>(sizes_[l])};
}

Eigen::Map<const Vector> DenseNetwork::bias(std::size_t l) const {
  return {params_.data() + offsets_[l] + sizes_[l + 1] * sizes_[l], static_cast<Eigen::Index>(sizes_[l + 1])};
}

bool DenseNetwork::all_finite() const {
  return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

std::vector<std::size_t> ivim_layer_sizes(std::size_t n_inputs, std::size_t n_outputs, std::size_t hidden) {
  return {n_inputs, hidden, hidden, n_outputs};
}

DenseNetwork init_network(std::vector<std::size_t> layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() != 4) throw InvalidArgument("network must have exactly two hidden layers");
  std::vector<double> params(DenseNetwork::parameter_count(layer_sizes), 0.0);
  Rng rng = make_rng(seed, kStreamInit);
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const std::size_t fan_in = layer_sizes[l];
    const std::size_t n_w = layer_sizes[l + 1] * fan_in;
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (std::size_t i = 0; i < n_w; ++i) params[off + i] = u(rng);
    off += n_w + layer_sizes[l + 1];  // biases stay zero
  }
  return DenseNetwork(std::move(layer_sizes), std::move(params));
}

void forward(const DenseNetwork& net, const Eigen::Ref<const Matrix>& x, ForwardCache& cache) {
  if (static_cast<std::size_t>(x.rows()) != net.input_size()) {
    std::ostringstream msg;
    msg << "input has " << x.rows() << " features, network expects " << net.input_size();
    throw InvalidArgument(msg.str());
  }
  const std::size_t n_affine = net.num_affine();
  cache.activations.resize(n_affine);
  cache.pre.resize(n_affine - 1);
  cache.activations[0] = x;
  for (std::size_t l = 0; l < n_affine; ++l) {
    Matrix& z = (l + 1 < n_affine) ? cache.pre[l] : cache.output;
    z.noalias() = net.weight(l) * cache.activations[l];
    z.colwise() += net.bias(l);
    if (l + 1 < n_affine) apply_elu(z, cache.activations[l + 1]);
  }
}

Matrix forward(const DenseNetwork& net, const Eigen::Ref<const Matrix>& x) {
  ForwardCache cache;
  forward(net, x, cache);
  return std::move(cache.output);
}

Vector forward(const DenseNetwork& net, std::span<const double> x) {
  Eigen::Map<const Matrix> xm(x.data(), static_cast<Eigen::Index>(x.size()), 1);
  return forward(net, Matrix(xm)).col(0);
}

void backward(const DenseNetwork& net, const ForwardCache& cache, const Eigen::Ref<const Matrix>& upstream,
              std::span<double> grad) {
  if (grad.size() != net.params().size()) throw InvalidArgument("gradient buffer size mismatch");
  const auto& sizes = net.layer_sizes();
  Matrix delta = upstream;
  for (std::size_t l = net.num_affine(); l-- > 0;) {
    const auto rows = static_cast<Eigen::Index>(sizes[l + 1]);
    const auto cols = static_cast<Eigen::Index>(sizes[l]);
    Eigen::Map<Matrix> gw(grad.data() + net.weight_offset(l), rows, cols);
    Eigen::Map<Vector> gb(grad.data() + net.weight_offset(l) + sizes[l + 1] * sizes[l], rows);
    gw.noalias() = delta * cache.activations[l].transpose();
    gb = delta.rowwise().sum();
    if (l == 0) break;
    Matrix back = net.weight(l).transpose() * delta;
    const Matrix& z = cache.pre[l - 1];
    const Matrix& a = cache.activations[l];
    // ELU'(z) = 1 for z > 0, ELU(z) + 1 otherwise.
    delta = (z.array() > 0.0).select(back.array(), back.array() * (a.array() + 1.0));
  }
}

std::vector<double> backward(const DenseNetwork& net, std::span<const double> x,
                             std::span<const double> upstream) {
  ForwardCache cache;
  Eigen::Map<const Matrix> xm(x.data(), static_cast<Eigen::Index>(x.size()), 1);
  forward(net, xm, cache);
  if (upstream.size() != net.output_size()) throw InvalidArgument("upstream gradient size mismatch");
  Eigen::Map<const Matrix> up(upstream.data(), static_cast<Eigen::Index>(upstream.size()), 1);
  std::vector<double> grad(net.params().size());
  backward(net, cache, up, grad);
  return grad;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw InvalidArgument("learning rate must be >= 0");
  if (batch_size == 0) throw InvalidArgument("batch size must be positive");
  if (epochs == 0) throw InvalidArgument("epochs must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw InvalidArgument("Adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw InvalidArgument("Adam epsilon must be positive");
}

Adam::Adam(std::size_t n_params, const TrainConfig& cfg)
    : lr_(cfg.learning_rate), beta1_(cfg.beta1), beta2_(cfg.beta2), eps_(cfg.epsilon),
      m_(n_params, 0.0), v_(n_params, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

Matrix input_matrix(const TrainingSet& set, std::span<const std::size_t> indices) {
  const auto nb = static_cast<Eigen::Index>(set.n_b());
  Matrix x(nb, static_cast<Eigen::Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) {
    auto s = set.signal(indices[c]);
    std::copy(s.begin(), s.end(), x.col(static_cast<Eigen::Index>(c)).data());
  }
  return x;
}

Matrix label_matrix(const TrainingSet& set, std::span<const std::size_t> indices) {
  Matrix y(static_cast<Eigen::Index>(kNumParams), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) {
    const Triple& t = set.labels_normalized[indices[c]];
    for (std::size_t k = 0; k < kNumParams; ++k) y(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = t[k];
  }
  return y;
}

double evaluate_loss(const DenseNetwork& net, const BatchLoss& loss, const TrainingSet& set) {
  if (set.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < set.size(); start += kEvalChunk) {
    const std::size_t end = std::min(set.size(), start + kEvalChunk);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    const Matrix raw = forward(net, input_matrix(set, idx));
    total += loss(raw, label_matrix(set, idx), nullptr) * static_cast<double>(end - start);
  }
  return total / static_cast<double>(set.size());
}

TrainResult train(DenseNetwork net, const BatchLoss& loss, const TrainingSet& train_set,
                  const TrainingSet* validation, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.size() == 0) throw InvalidArgument("training set is empty");
  if (train_set.n_b() != net.input_size()) throw InvalidArgument("training signals do not match network input size");

  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng = make_rng(cfg.seed, kStreamShuffle);

  Adam adam(net.params().size(), cfg);
  AlignedVector grad(net.params().size());
  ForwardCache cache;
  Matrix raw_grad;
  TrainResult result;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      std::span<const std::size_t> idx(order.data() + start, end - start);
      forward(net, input_matrix(train_set, idx), cache);
      const double batch_loss = loss(cache.output, label_matrix(train_set, idx), &raw_grad);
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "non-finite training loss at epoch " << epoch << ", batch " << batch_index;
        throw NumericalFailure(msg.str());
      }
      epoch_loss += batch_loss * static_cast<double>(idx.size());
      backward(net, cache, raw_grad, grad);
      adam.step(net.params(), grad);
    }
    epoch_loss /= static_cast<double>(n);
    const double val_loss = validation && validation->size() > 0
                                ? evaluate_loss(net, loss, *validation)
                                : std::numeric_limits<double>::quiet_NaN();
    result.history.train.push_back(epoch_loss);
    result.history.validation.push_back(val_loss);
    if (on_epoch) on_epoch(epoch, epoch_loss, val_loss);
  }
  if (!net.all_finite()) throw NumericalFailure("network parameters became non-finite during training");
  result.net = std::move(net);
  return result;
}

}  // namespace ivuq

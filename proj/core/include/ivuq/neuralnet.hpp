#pragma once

// Dense feed-forward engine: affine -> ELU -> affine -> ELU -> affine, with
// reverse-mode gradients and an Adam training loop. All arithmetic is double.

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace ivuq {

struct TrainingSet;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Storage with Eigen's maximum alignment, so vectorized kernels peel
/// identically on every run and results are bit-reproducible.
using AlignedVector = std::vector<double, Eigen::aligned_allocator<double>>;

inline constexpr std::size_t kDefaultHidden = 64;

inline double elu(double z) { return z > 0.0 ? z : std::expm1(z); }
inline double elu_derivative(double z) { return z > 0.0 ? 1.0 : std::exp(z); }

/// Fully connected network with ELU on every hidden layer and a linear output.
/// Parameters live in one flat vector; per affine layer l the (out x in)
/// weight matrix is stored column-major, followed by its bias vector.
class DenseNetwork {
 public:
  DenseNetwork() = default;
  DenseNetwork(std::vector<std::size_t> layer_sizes, std::vector<double> params);

  static std::size_t parameter_count(std::span<const std::size_t> layer_sizes);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t num_affine() const { return sizes_.size() - 1; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }

  std::span<const double> params() const { return params_; }
  std::span<double> params() { return params_; }

  Eigen::Map<const Matrix> weight(std::size_t layer) const;
  Eigen::Map<const Vector> bias(std::size_t layer) const;
  /// Offset of layer `layer`'s weight block inside the flat parameter vector.
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }

  bool all_finite() const;
  bool operator==(const DenseNetwork& other) const { return sizes_ == other.sizes_ && params_ == other.params_; }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  AlignedVector params_;
};

/// [n_inputs, hidden, hidden, n_outputs]
std::vector<std::size_t> ivim_layer_sizes(std::size_t n_inputs, std::size_t n_outputs,
                                          std::size_t hidden = kDefaultHidden);

/// He-style uniform initialization: W ~ U(-sqrt(6/fan_in), +sqrt(6/fan_in)),
/// biases zero. Requires exactly two hidden layers.
DenseNetwork init_network(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

/// Intermediates of a batched forward pass (one sample per column).
struct ForwardCache {
  std::vector<Matrix> activations;  // input to each affine layer
  std::vector<Matrix> pre;          // pre-activation of each hidden layer
  Matrix output;
};

/// Raw network outputs for a batch `x` (n_inputs x batch).
Matrix forward(const DenseNetwork& net, const Eigen::Ref<const Matrix>& x);
Vector forward(const DenseNetwork& net, std::span<const double> x);
void forward(const DenseNetwork& net, const Eigen::Ref<const Matrix>& x, ForwardCache& cache);

/// Gradient of sum_{batch} <upstream, output> with respect to every parameter,
/// written into `grad` (same layout as params()).
void backward(const DenseNetwork& net, const ForwardCache& cache, const Eigen::Ref<const Matrix>& upstream,
              std::span<double> grad);
std::vector<double> backward(const DenseNetwork& net, std::span<const double> x,
                             std::span<const double> upstream);

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 128;
  std::size_t epochs = 1000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Mean loss over the batch columns. When `grad` is non-null it receives the
/// gradient of that mean with respect to `raw` (same shape).
using BatchLoss = std::function<double(const Matrix& raw, const Matrix& labels, Matrix* grad)>;

struct LossHistory {
  std::vector<double> train;
  std::vector<double> validation;
};

struct TrainResult {
  DenseNetwork net;
  LossHistory history;
};

/// Called after every epoch with (epoch, train loss, validation loss or NaN).
using EpochCallback = std::function<void(std::size_t, double, double)>;

class Adam {
 public:
  Adam(std::size_t n_params, const TrainConfig& cfg);
  void step(std::span<double> params, std::span<const double> grad);
  std::size_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<double> m_, v_;
};

/// Packs normalized signals (n_b x count) and normalized labels (3 x count).
Matrix input_matrix(const TrainingSet& set, std::span<const std::size_t> indices);
Matrix label_matrix(const TrainingSet& set, std::span<const std::size_t> indices);

/// Mean loss of `net` over a whole set (no gradient).
double evaluate_loss(const DenseNetwork& net, const BatchLoss& loss, const TrainingSet& set);

/// Mini-batch Adam over `train` for cfg.epochs epochs, reshuffling each epoch
/// with a generator derived from cfg.seed; the final short batch is kept.
/// Throws NumericalFailure (with epoch and batch index) on a non-finite loss.
TrainResult train(DenseNetwork net, const BatchLoss& loss, const TrainingSet& train_set,
                  const TrainingSet* validation, const TrainConfig& cfg, const EpochCallback& on_epoch = {});

}  // namespace ivuq

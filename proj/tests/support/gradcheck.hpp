#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ivuq/neuralnet.hpp"
#include "ivuq/prob_heads.hpp"

namespace ivuq::test {

/// Mean head loss of `net` over the columns of (x, y), with optional gradient
/// with respect to every network parameter.
inline double network_loss(const DenseNetwork& net, const HeadSpec& spec, const Matrix& x, const Matrix& y,
                           std::vector<double>* grad = nullptr) {
  const BatchLoss loss = make_batch_loss(spec);
  ForwardCache cache;
  forward(net, x, cache);
  if (!grad) return loss(cache.output, y, nullptr);
  Matrix g;
  const double value = loss(cache.output, y, &g);
  grad->assign(net.params().size(), 0.0);
  backward(net, cache, g, *grad);
  return value;
}

/// Denominator floor of the relative error, per unit of loss. Central
/// differences carry about eps * |L| / h absolute rounding noise, so
/// components below kGradientFloor * max(1, |L|) are compared on that
/// absolute scale instead.
inline constexpr double kGradientFloor = 1e-4;

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
};

inline GradientCheck check_gradient(DenseNetwork net, const HeadSpec& spec, const Matrix& x, const Matrix& y,
                                    double h = 1e-5) {
  std::vector<double> analytic;
  const double loss = network_loss(net, spec, x, y, &analytic);
  const double floor = kGradientFloor * std::max(1.0, std::abs(loss));
  GradientCheck out;
  auto params = net.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = network_loss(net, spec, x, y);
    params[i] = saved - h;
    const double down = network_loss(net, spec, x, y);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    const double rel = std::abs(analytic[i] - numeric) / denom;
    if (rel > out.max_relative_error) {
      out.max_relative_error = rel;
      out.worst_index = i;
    }
  }
  return out;
}

}  // namespace ivuq::test

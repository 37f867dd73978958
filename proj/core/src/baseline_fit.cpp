#include "ivuq/baseline_fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "ivuq/errors.hpp"

namespace ivuq {

namespace {

constexpr std::size_t kGridPoints = 64;

double clamp_to(const Range& r, double v) { return std::clamp(v, r.min, r.max); }

double sse(std::span<const double> b, std::span<const double> s, const IvimParams& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double model = p.f * std::exp(-b[i] * p.d_star) + (1.0 - p.f) * std::exp(-b[i] * p.d);
    acc += (model - s[i]) * (model - s[i]);
  }
  return acc;
}

IvimParams project(const FitBounds& bounds, IvimParams p) {
  return {clamp_to(bounds.d, p.d), clamp_to(bounds.f, p.f), clamp_to(bounds.d_star, p.d_star)};
}

// Bounded Levenberg-Marquardt with Marquardt diagonal scaling; steps are
// projected back onto the box.
std::size_t refine_lm(std::span<const double> b, std::span<const double> s, const FitOptions& opt,
                      IvimParams& p, double& cost) {
  double lambda = 1e-3;
  std::size_t it = 0;
  for (; it < opt.max_refine_iterations; ++it) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double ed = std::exp(-b[i] * p.d);
      const double es = std::exp(-b[i] * p.d_star);
      const double r = p.f * es + (1.0 - p.f) * ed - s[i];
      const Eigen::Vector3d g(-(1.0 - p.f) * b[i] * ed, es - ed, -p.f * b[i] * es);
      jtj.noalias() += g * g.transpose();
      jtr.noalias() += g * r;
    }
    bool improved = false;
    for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
      Eigen::Matrix3d a = jtj;
      for (int k = 0; k < 3; ++k) a(k, k) += lambda * (jtj(k, k) + 1e-30);
      const Eigen::Vector3d step = a.ldlt().solve(-jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const IvimParams trial = project(opt.bounds, {p.d + step[0], p.f + step[1], p.d_star + step[2]});
      const double trial_cost = sse(b, s, trial);
      if (trial_cost < cost) {
        const double gain = cost - trial_cost;
        p = trial;
        cost = trial_cost;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        if (gain <= 1e-15 * cost || cost < 1e-30) return it + 1;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) break;
  }
  return it;
}

}  // namespace

FitResult fit_segmented(std::span<const double> b, std::span<const double> s, const FitOptions& opt) {
  if (b.size() != s.size()) throw InvalidArgument("b-values and signal lengths differ");
  std::size_t n_high = 0;
  for (double v : b) n_high += v > opt.b_threshold ? 1 : 0;
  if (n_high < 3 || b.size() - n_high < 2)
    throw InvalidArgument("segmented fit needs >= 3 b-values above and >= 2 at or below the threshold");

  FitResult res;

  // Stage 1: ln s = ln(1 - f) - b D over the high-b samples.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!(b[i] > opt.b_threshold)) continue;
    if (!(s[i] > 0.0) || !std::isfinite(s[i])) continue;
    const double y = std::log(s[i]);
    sx += b[i];
    sy += y;
    sxx += b[i] * b[i];
    sxy += b[i] * y;
    ++used;
  }
  if (used < 2) {
    res.params = {opt.bounds.d.min, opt.bounds.f.min, opt.bounds.d_star.min};
    res.residual = sse(b, s, res.params);
    return res;
  }
  const double nu = static_cast<double>(used);
  const double slope = (nu * sxy - sx * sy) / (nu * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / nu;
  res.params.d = clamp_to(opt.bounds.d, -slope);
  res.params.f = clamp_to(opt.bounds.f, 1.0 - std::exp(intercept));
  res.params.d_star = opt.bounds.d_star.min;
  if (used < n_high) {
    res.residual = sse(b, s, res.params);
    return res;
  }

  // Stage 2: D* with D and f frozen. A log-spaced scan brackets the minimum, Brent refines it.
  const double lo = std::max({res.params.d, opt.bounds.d_star.min, 1e-6});
  const double hi = opt.bounds.d_star.max;
  IvimParams trial = res.params;
  auto cost_at = [&](double ds) {
    trial.d_star = ds;
    return sse(b, s, trial);
  };
  std::vector<double> grid(kGridPoints);
  std::size_t best = 0;
  double best_cost = 0.0;
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(kGridPoints - 1));
    const double c = cost_at(grid[i]);
    if (i == 0 || c < best_cost) {
      best = i;
      best_cost = c;
    }
  }
  const double a = grid[best == 0 ? 0 : best - 1];
  const double c = grid[std::min(best + 1, kGridPoints - 1)];
  std::uintmax_t brent_iters = 100;
  const auto [d_star, cost] = boost::math::tools::brent_find_minima(cost_at, a, c, 40, brent_iters);
  res.params.d_star = clamp_to(opt.bounds.d_star, d_star);
  res.residual = sse(b, s, res.params);
  res.iterations = static_cast<std::size_t>(brent_iters);
  res.converged = std::isfinite(cost);

  if (opt.refine) {
    IvimParams p = res.params;
    double refined = res.residual;
    res.iterations += refine_lm(b, s, opt, p, refined);
    if (refined < res.residual) {
      res.params = p;
      res.residual = refined;
    }
  }
  return res;
}

FitResult fit_segmented(const SignalRecord& record, const FitOptions& options) {
  return fit_segmented(record.schedule.values(), record.s, options);
}

}  // namespace ivuq

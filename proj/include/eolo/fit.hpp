#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "eolo/losses.hpp"
#include "eolo/rng.hpp"

namespace eolo {

struct FitDivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Gradient-descent settings for fitting prediction maps against a target.
/// Probability maps are parameterized through a logistic squashing; the size
/// map is fitted directly. Optional seeded Gaussian noise on the initial
/// parameters models an imperfectly trained predictor (all zero by default).
struct FitConfig {
  int steps = 500;
  double lr = 0.5;
  double center_init_sigma = 0.0;
  double size_init_sigma = 0.0;
  double seg_init_sigma = 0.0;
  std::uint64_t init_seed = 0;
};

template <typename Scalar>
struct FitResult {
  PredictionMaps<Scalar> maps;
  std::vector<LossReport> trace;  // steps + 1 rows: initial state, then one per step
};

namespace detail {

template <typename Scalar>
void add_noise(GridMap<Scalar>& m, double sigma, Rng& rng) {
  if (sigma <= 0.0) return;
  for (Index i = 0; i < m.size(); ++i) {
    m.values()[i] += static_cast<Scalar>(sigma * rng.normal());
  }
}

template <typename Scalar>
GridMap<Scalar> sigmoid(const GridMap<Scalar>& z) {
  GridMap<Scalar> p(z.channels(), z.height(), z.width());
  p.values() = Scalar(1) / (Scalar(1) + (-z.values()).exp());
  return p;
}

}  // namespace detail

/// Fits free per-pixel prediction maps to an encoded target by plain
/// gradient descent on the weighted total loss. Throws FitDivergedError if
/// the loss becomes non-finite.
template <typename Scalar>
FitResult<Scalar> fit_maps(const TargetSet<Scalar>& target, const LossConfig& loss_cfg,
                           const FitConfig& fit_cfg) {
  if (fit_cfg.steps < 1) throw std::invalid_argument("fit_maps: steps must be >= 1");
  if (fit_cfg.lr <= 0.0) throw std::invalid_argument("fit_maps: lr must be > 0");

  const Index c = target.classes(), h = target.height(), w = target.width();
  GridMap<Scalar> z_center(c, h, w);
  GridMap<Scalar> z_size(4, h, w);
  GridMap<Scalar> z_seg(c, h, w);
  Rng rng(fit_cfg.init_seed);
  detail::add_noise(z_center, fit_cfg.center_init_sigma, rng);
  detail::add_noise(z_size, fit_cfg.size_init_sigma, rng);
  detail::add_noise(z_seg, fit_cfg.seg_init_sigma, rng);

  FitResult<Scalar> out;
  out.trace.reserve(fit_cfg.steps + 1);
  const Scalar lr = static_cast<Scalar>(fit_cfg.lr);

  for (int step = 0; step <= fit_cfg.steps; ++step) {
    PredictionMaps<Scalar> preds{detail::sigmoid(z_center), z_size, detail::sigmoid(z_seg)};
    TotalLoss<Scalar> tl = total_loss(preds, target, loss_cfg);
    if (!std::isfinite(tl.report.total)) {
      throw FitDivergedError("fit_maps: diverged; reduce lr");
    }
    out.trace.push_back(tl.report);
    if (step == fit_cfg.steps) {
      out.maps = std::move(preds);
      break;
    }
    // Chain the probability-map gradients through the logistic squashing.
    z_center.values() -=
        lr * tl.grad.center.values() * preds.center.values() * (Scalar(1) - preds.center.values());
    z_size.values() -= lr * tl.grad.size.values();
    z_seg.values() -=
        lr * tl.grad.seg.values() * preds.seg.values() * (Scalar(1) - preds.seg.values());
  }
  return out;
}

}  // namespace eolo

#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "eolo/encoder.hpp"
#include "eolo/grid_map.hpp"

namespace eolo {

struct LossConfig {
  double alpha = 2.0;
  double beta = 4.0;
  double eps = 1e-6;  // probability clamp before logs
  double w_center = 1.0;
  double w_size = 1.0;
  double w_boundary = 1.0;
  double w_seg = 1.0;

  /// Normalization of the per-pixel terms. kCenterCount divides the summed
  /// error by the number of centers N; kElementCount divides by the number
  /// of contributing pixels (valid pixels for the boundary term, positive
  /// pixels for the segmentation term).
  enum class Norm { kCenterCount, kElementCount };
  Norm boundary_norm = Norm::kCenterCount;
  Norm seg_norm = Norm::kCenterCount;
};

struct LossReport {
  double l_center = 0.0;
  double l_size = 0.0;
  double l_boundary = 0.0;
  double l_seg = 0.0;
  double total = 0.0;
  std::int64_t n_centers = 0;
  std::int64_t n_boundary_pixels = 0;

  std::string to_json_line() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"l_center\":" << l_center << ",\"l_size\":" << l_size
       << ",\"l_boundary\":" << l_boundary << ",\"l_seg\":" << l_seg
       << ",\"total\":" << total << ",\"n_centers\":" << n_centers
       << ",\"n_boundary_pixels\":" << n_boundary_pixels << "}";
    return os.str();
  }
};

/// Scalar loss with its exact partial derivative per prediction cell.
template <typename Scalar>
struct LossGrad {
  double value = 0.0;
  GridMap<Scalar> grad;
};

namespace detail {

inline double pow_fast(double x, double e) {
  if (e == 2.0) return x * x;
  if (e == 4.0) {
    const double x2 = x * x;
    return x2 * x2;
  }
  if (e == 1.0) return x;
  if (e == 3.0) return x * x * x;
  if (e == 0.0) return 1.0;
  return std::pow(x, e);
}

struct FocalTerm {
  double loss;
  double dloss;  // d loss / d p
};

// -(1-p)^a * log(p) and its derivative.
inline FocalTerm focal_positive(double p, double a) {
  const double q = 1.0 - p;
  const double lg = std::log(p);
  return {-pow_fast(q, a) * lg, a * pow_fast(q, a - 1.0) * lg - pow_fast(q, a) / p};
}

// -w * p^a * log(1-p) and its derivative (w = (1-Y)^beta weight).
inline FocalTerm focal_negative(double p, double a, double w) {
  const double lg = std::log1p(-p);
  return {-w * pow_fast(p, a) * lg, -w * (a * pow_fast(p, a - 1.0) * lg - pow_fast(p, a) / (1.0 - p))};
}

}  // namespace detail

inline std::int64_t center_count(const std::vector<CenterPoint>& centers) {
  return std::max<std::int64_t>(static_cast<std::int64_t>(centers.size()), 1);
}

/// Focal classification loss on the center heatmap. Cells whose target is
/// exactly 1 are positives; all other cells are negatives down-weighted by
/// (1 - target)^beta. Predictions are clamped to [eps, 1-eps] before logs;
/// the gradient is zero where the clamp is active.
template <typename Scalar>
LossGrad<Scalar> center_loss(const GridMap<Scalar>& pred, const TargetSet<Scalar>& target,
                             const LossConfig& cfg = {}) {
  const GridMap<Scalar>& tgt = target.center_heatmap;
  if (!pred.same_shape(tgt)) throw std::invalid_argument("center_loss: shape mismatch");
  const double n = static_cast<double>(center_count(target.centers));
  LossGrad<Scalar> out{0.0, GridMap<Scalar>(pred.channels(), pred.height(), pred.width())};
  double loss = 0.0;
  for (Index i = 0; i < pred.size(); ++i) {
    const double raw = static_cast<double>(pred.values()[i]);
    const double p = std::clamp(raw, cfg.eps, 1.0 - cfg.eps);
    const double y = static_cast<double>(tgt.values()[i]);
    const detail::FocalTerm t =
        (y == 1.0) ? detail::focal_positive(p, cfg.alpha)
                   : detail::focal_negative(p, cfg.alpha, detail::pow_fast(1.0 - y, cfg.beta));
    loss += t.loss;
    out.grad.values()[i] = static_cast<Scalar>((raw == p) ? t.dloss / n : 0.0);
  }
  out.value = loss / n;
  return out;
}

/// Squared-error size loss at the rounded center cells only, averaged over
/// the number of centers.
template <typename Scalar>
LossGrad<Scalar> size_loss(const GridMap<Scalar>& pred, const TargetSet<Scalar>& target) {
  if (!pred.same_shape(target.size_map)) throw std::invalid_argument("size_loss: shape mismatch");
  const double n = static_cast<double>(center_count(target.centers));
  LossGrad<Scalar> out{0.0, GridMap<Scalar>(4, pred.height(), pred.width())};
  double loss = 0.0;
  for (const CenterPoint& c : target.centers) {
    for (Index ch = 0; ch < 4; ++ch) {
      const double e = static_cast<double>(pred(ch, c.cell_y, c.cell_x)) -
                       static_cast<double>(target.size_map(ch, c.cell_y, c.cell_x));
      loss += e * e;
      out.grad(ch, c.cell_y, c.cell_x) += static_cast<Scalar>(2.0 * e / n);
    }
  }
  out.value = loss / n;
  return out;
}

/// Squared-error loss on the per-pixel size encoding over all valid
/// (foreground) pixels. The summed error is divided by the center count N
/// by default; cfg.boundary_norm selects a per-pixel mean instead.
template <typename Scalar>
LossGrad<Scalar> boundary_loss(const GridMap<Scalar>& pred, const TargetSet<Scalar>& target,
                               const LossConfig& cfg = {}) {
  if (!pred.same_shape(target.size_map)) {
    throw std::invalid_argument("boundary_loss: shape mismatch");
  }
  const std::int64_t n_pixels = mask_area(target.size_valid);
  const double norm = cfg.boundary_norm == LossConfig::Norm::kCenterCount
                          ? static_cast<double>(center_count(target.centers))
                          : static_cast<double>(std::max<std::int64_t>(n_pixels, 1));
  LossGrad<Scalar> out{0.0, GridMap<Scalar>(4, pred.height(), pred.width())};
  double loss = 0.0;
  for (Index y = 0; y < pred.height(); ++y) {
    for (Index x = 0; x < pred.width(); ++x) {
      if (!target.size_valid(y, x)) continue;
      for (Index ch = 0; ch < 4; ++ch) {
        const double e = static_cast<double>(pred(ch, y, x)) -
                         static_cast<double>(target.size_map(ch, y, x));
        loss += e * e;
        out.grad(ch, y, x) = static_cast<Scalar>(2.0 * e / norm);
      }
    }
  }
  out.value = loss / norm;
  return out;
}

/// Per-class binary focal loss on the segmentation map. Channels are
/// independent, so there is no cross-class competition. Normalized by the
/// center count N by default (cfg.seg_norm selects the positive-pixel count).
template <typename Scalar>
LossGrad<Scalar> seg_loss(const GridMap<Scalar>& pred, const TargetSet<Scalar>& target,
                          const LossConfig& cfg = {}) {
  const GridMap<Scalar>& tgt = target.seg_map;
  if (!pred.same_shape(tgt)) throw std::invalid_argument("seg_loss: shape mismatch");
  double norm;
  if (cfg.seg_norm == LossConfig::Norm::kCenterCount) {
    norm = static_cast<double>(center_count(target.centers));
  } else {
    norm = static_cast<double>(std::max<Index>((tgt.values() == Scalar(1)).count(), 1));
  }
  LossGrad<Scalar> out{0.0, GridMap<Scalar>(pred.channels(), pred.height(), pred.width())};
  double loss = 0.0;
  for (Index i = 0; i < pred.size(); ++i) {
    const double raw = static_cast<double>(pred.values()[i]);
    const double p = std::clamp(raw, cfg.eps, 1.0 - cfg.eps);
    const detail::FocalTerm t = (tgt.values()[i] == Scalar(1))
                                    ? detail::focal_positive(p, cfg.alpha)
                                    : detail::focal_negative(p, cfg.alpha, 1.0);
    loss += t.loss;
    out.grad.values()[i] = static_cast<Scalar>((raw == p) ? t.dloss / norm : 0.0);
  }
  out.value = loss / norm;
  return out;
}

template <typename Scalar>
struct PredictionMaps {
  GridMap<Scalar> center;  // C x H x W probabilities
  GridMap<Scalar> size;    // 4 x H x W distances
  GridMap<Scalar> seg;     // C x H x W probabilities
};

template <typename Scalar>
struct TotalLoss {
  LossReport report;
  PredictionMaps<Scalar> grad;  // gradients of the weighted total per map
};

template <typename Scalar>
TotalLoss<Scalar> total_loss(const PredictionMaps<Scalar>& preds, const TargetSet<Scalar>& target,
                             const LossConfig& cfg = {}) {
  auto lc = center_loss(preds.center, target, cfg);
  auto ls = size_loss(preds.size, target);
  auto lb = boundary_loss(preds.size, target, cfg);
  auto lg = seg_loss(preds.seg, target, cfg);

  TotalLoss<Scalar> out;
  out.report.l_center = lc.value;
  out.report.l_size = ls.value;
  out.report.l_boundary = lb.value;
  out.report.l_seg = lg.value;
  out.report.total = cfg.w_center * lc.value + cfg.w_size * ls.value +
                     cfg.w_boundary * lb.value + cfg.w_seg * lg.value;
  out.report.n_centers = static_cast<std::int64_t>(target.centers.size());
  out.report.n_boundary_pixels = mask_area(target.size_valid);

  out.grad.center = std::move(lc.grad);
  out.grad.center.values() *= static_cast<Scalar>(cfg.w_center);
  out.grad.size = std::move(ls.grad);
  out.grad.size.values() =
      out.grad.size.values() * static_cast<Scalar>(cfg.w_size) +
      lb.grad.values() * static_cast<Scalar>(cfg.w_boundary);
  out.grad.seg = std::move(lg.grad);
  out.grad.seg.values() *= static_cast<Scalar>(cfg.w_seg);
  return out;
}

}  // namespace eolo

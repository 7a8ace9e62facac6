#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "eolo/annotation.hpp"
#include "eolo/grid_map.hpp"

namespace eolo {

enum class KernelKind {
  kCircleFixed,     // isotropic, fixed radius
  kCircleGaussian,  // isotropic, radius = mean of the four edge distances
  kEllipseGaussian  // per-side radii from the four edge distances
};

struct KernelConfig {
  double sigma = 1.0;
  KernelKind kind = KernelKind::kEllipseGaussian;
  double fixed_radius = 2.0;  // only used by kCircleFixed
};

/// Which instance claims the size target of a pixel covered by several masks.
enum class OverlapPolicy {
  kSmallerBoxWins,  // instance with the smaller bbox area (tie: lower index)
  kLowerIndexWins
};

struct EncodeConfig {
  KernelConfig kernel;
  OverlapPolicy overlap = OverlapPolicy::kSmallerBoxWins;
};

struct CenterPoint {
  int class_id = 0;
  Index cell_x = 0;  // rounded center cell
  Index cell_y = 0;
  Point exact;  // center of gravity before rounding
};

/// Encoded training targets for one image.
template <typename Scalar>
struct TargetSet {
  GridMap<Scalar> center_heatmap;  // C x H x W in [0,1], 1.0 at center cells
  GridMap<Scalar> size_map;        // 4 x H x W edge distances (l,t,r,b)
  GridMap<Scalar> seg_map;         // C x H x W binary
  Mask size_valid;                 // H x W union of instance foregrounds
  std::vector<CenterPoint> centers;

  Index classes() const { return center_heatmap.channels(); }
  Index height() const { return center_heatmap.height(); }
  Index width() const { return center_heatmap.width(); }
};

using TargetSetF = TargetSet<float>;
using TargetSetD = TargetSet<double>;

inline Index round_cell(double v) { return static_cast<Index>(std::lround(v)); }

/// Splats an anisotropic Gaussian around `center` into one heatmap channel.
/// The per-axis radius switches between the left/right (resp. top/bottom)
/// edge distance depending on which side of the center a cell lies on;
/// radii are clamped to >= 1 cell. Existing values merge by elementwise max
/// and the rounded center cell is set to exactly 1.
template <typename Scalar>
void ellipse_gaussian_splat(typename GridMap<Scalar>::PlaneRef channel, const Point& center,
                            const Box4D& radii, const KernelConfig& cfg) {
  const Index h = channel.rows(), w = channel.cols();
  const Index cx = round_cell(center.x), cy = round_cell(center.y);
  if (cx < 0 || cx >= w || cy < 0 || cy >= h) {
    throw std::invalid_argument("ellipse_gaussian_splat: center out of bounds");
  }

  double r_left = std::max(radii.left, 1.0);
  double r_top = std::max(radii.top, 1.0);
  double r_right = std::max(radii.right, 1.0);
  double r_bottom = std::max(radii.bottom, 1.0);
  switch (cfg.kind) {
    case KernelKind::kCircleFixed:
      r_left = r_top = r_right = r_bottom = std::max(cfg.fixed_radius, 1.0);
      break;
    case KernelKind::kCircleGaussian: {
      const double r = (r_left + r_top + r_right + r_bottom) / 4.0;
      r_left = r_top = r_right = r_bottom = r;
      break;
    }
    case KernelKind::kEllipseGaussian:
      break;
  }

  const double inv_two_sigma_sq = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
  for (Index y = 0; y < h; ++y) {
    const double dy = static_cast<double>(y) - center.y;
    const double ry = dy < 0.0 ? r_top : r_bottom;
    const double ny = dy / ry;
    for (Index x = 0; x < w; ++x) {
      const double dx = static_cast<double>(x) - center.x;
      const double rx = dx < 0.0 ? r_left : r_right;
      const double nx = dx / rx;
      const double v = std::exp(-(nx * nx + ny * ny) * inv_two_sigma_sq);
      channel(y, x) = std::max(channel(y, x), static_cast<Scalar>(v));
    }
  }
  channel(cy, cx) = Scalar(1);
}

/// Builds the three training targets from instance annotations.
///
/// * center heatmap: one splat per instance in its class channel.
/// * size map: at every foreground pixel, the edge distances from that pixel
///   to the owning instance's bbox. Pixels covered by several instances are
///   claimed per `cfg.overlap`. The rounded center cell carries the same
///   per-pixel encoding, so measuring a box from any foreground pixel of a
///   non-overlapped instance reproduces its bbox exactly.
/// * seg map: per-class union of instance masks.
template <typename Scalar>
TargetSet<Scalar> encode_targets(const std::vector<InstanceAnnotation>& annotations,
                                 Index classes, Index height, Index width,
                                 const EncodeConfig& cfg = {}) {
  TargetSet<Scalar> t;
  t.center_heatmap = GridMap<Scalar>(classes, height, width);
  t.size_map = GridMap<Scalar>(4, height, width);
  t.seg_map = GridMap<Scalar>(classes, height, width);
  t.size_valid = Mask::Zero(height, width);

  for (const auto& a : annotations) {
    if (a.mask.rows() != height || a.mask.cols() != width) {
      throw std::invalid_argument("encode_targets: mask shape mismatch");
    }
    if (a.class_id < 0 || a.class_id >= classes) {
      throw std::invalid_argument("encode_targets: class id out of range");
    }
  }

  // Claim order: the winning instance writes a pixel first.
  std::vector<size_t> order(annotations.size());
  std::iota(order.begin(), order.end(), size_t{0});
  if (cfg.overlap == OverlapPolicy::kSmallerBoxWins) {
    std::stable_sort(order.begin(), order.end(), [&](size_t i, size_t j) {
      return annotations[i].bbox.area() < annotations[j].bbox.area();
    });
  }

  Mask claimed = Mask::Zero(height, width);
  for (size_t idx : order) {
    const auto& a = annotations[idx];
    for (Index y = 0; y < height; ++y) {
      for (Index x = 0; x < width; ++x) {
        if (!a.mask(y, x) || claimed(y, x)) continue;
        claimed(y, x) = 1;
        const Box4D d = distances_to(Point{static_cast<double>(x), static_cast<double>(y)}, a.bbox);
        t.size_map(0, y, x) = static_cast<Scalar>(d.left);
        t.size_map(1, y, x) = static_cast<Scalar>(d.top);
        t.size_map(2, y, x) = static_cast<Scalar>(d.right);
        t.size_map(3, y, x) = static_cast<Scalar>(d.bottom);
      }
    }
  }
  t.size_valid = claimed;

  for (const auto& a : annotations) {
    auto seg = t.seg_map.channel(a.class_id);
    seg = (a.mask != 0).select(GridMap<Scalar>::Plane::Constant(height, width, Scalar(1)), seg);

    const Box4D radii = distances_to(a.center, a.bbox);
    ellipse_gaussian_splat<Scalar>(t.center_heatmap.channel(a.class_id), a.center, radii,
                                   cfg.kernel);
    t.centers.push_back(
        CenterPoint{a.class_id, round_cell(a.center.x), round_cell(a.center.y), a.center});
  }
  return t;
}

/// Reduces a mask from input resolution to output stride: an output pixel is
/// foreground iff at least half of its R x R block is foreground.
inline Mask downsample_annotation(const Mask& in, int stride) {
  if (stride < 1) throw std::invalid_argument("downsample_annotation: stride must be >= 1");
  if (in.rows() % stride != 0 || in.cols() % stride != 0) {
    throw std::invalid_argument("downsample_annotation: shape not divisible by stride");
  }
  if (stride == 1) return in;
  const Index h = in.rows() / stride, w = in.cols() / stride;
  Mask out(h, w);
  const int block = stride * stride;
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      const int count = static_cast<int>(
          (in.block(y * stride, x * stride, stride, stride) != 0).count());
      out(y, x) = (2 * count >= block) ? 1 : 0;
    }
  }
  return out;
}

}  // namespace eolo

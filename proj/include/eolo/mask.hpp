#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>

#include "eolo/geometry.hpp"

namespace eolo {

/// Binary H x W mask (0 = background, nonzero = foreground).
using Mask = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::int64_t mask_area(const Mask& m) {
  return (m != 0).count();
}

/// Center of gravity: arithmetic mean of foreground pixel centers.
inline Point centroid(const Mask& m) {
  double sx = 0.0, sy = 0.0;
  std::int64_t n = 0;
  for (Eigen::Index y = 0; y < m.rows(); ++y) {
    for (Eigen::Index x = 0; x < m.cols(); ++x) {
      if (m(y, x)) {
        sx += static_cast<double>(x);
        sy += static_cast<double>(y);
        ++n;
      }
    }
  }
  if (n == 0) throw std::invalid_argument("centroid: empty instance");
  return Point{sx / static_cast<double>(n), sy / static_cast<double>(n)};
}

/// Tight bounding box of a mask in pixel-extent coordinates: pixel (x, y)
/// spans [x-0.5, x+0.5] x [y-0.5, y+0.5].
inline BoundingBox tight_bbox(const Mask& m) {
  Eigen::Index min_x = m.cols(), max_x = -1, min_y = m.rows(), max_y = -1;
  for (Eigen::Index y = 0; y < m.rows(); ++y) {
    for (Eigen::Index x = 0; x < m.cols(); ++x) {
      if (m(y, x)) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
      }
    }
  }
  if (max_x < 0) throw std::invalid_argument("tight_bbox: empty instance");
  return BoundingBox{static_cast<double>(min_x) - 0.5, static_cast<double>(min_y) - 0.5,
                     static_cast<double>(max_x) + 0.5, static_cast<double>(max_y) + 0.5};
}

/// |a & b| / |a | b|; 0 when both masks are empty.
inline double mask_iou(const Mask& a, const Mask& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("mask_iou: shape mismatch");
  }
  const auto fa = (a != 0);
  const auto fb = (b != 0);
  const std::int64_t inter = (fa && fb).count();
  const std::int64_t uni = (fa || fb).count();
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

inline std::int64_t mask_intersection(const Mask& a, const Mask& b) {
  return ((a != 0) && (b != 0)).count();
}

}  // namespace eolo

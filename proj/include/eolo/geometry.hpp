#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eolo {

/// Continuous location in feature-map units (x = column, y = row). Pixel
/// (x, y) is centered at (x, y) and spans [x-0.5, x+0.5] x [y-0.5, y+0.5].
struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Per-pixel distances from an anchor to the four box edges, all >= 0.
struct Box4D {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  bool valid() const {
    return left >= 0.0 && top >= 0.0 && right >= 0.0 && bottom >= 0.0 &&
           std::isfinite(left) && std::isfinite(top) && std::isfinite(right) &&
           std::isfinite(bottom);
  }
};

struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
  bool valid() const {
    return x1 <= x2 && y1 <= y2 && std::isfinite(x1) && std::isfinite(y1) &&
           std::isfinite(x2) && std::isfinite(y2);
  }
  bool operator==(const BoundingBox& o) const {
    return x1 == o.x1 && y1 == o.y1 && x2 == o.x2 && y2 == o.y2;
  }
};

/// Box induced by an anchor point and its four edge distances.
inline BoundingBox box_from_4d(const Point& anchor, const Box4D& d) {
  return BoundingBox{anchor.x - d.left, anchor.y - d.top, anchor.x + d.right,
                     anchor.y + d.bottom};
}

/// Edge distances from a point to a box. Inverse of box_from_4d; values are
/// negative when the point lies outside the box.
inline Box4D distances_to(const Point& p, const BoundingBox& b) {
  return Box4D{p.x - b.x1, p.y - b.y1, b.x2 - p.x, b.y2 - p.y};
}

/// Intersection over union. Zero for disjoint boxes and, by convention, when
/// both boxes are degenerate.
inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = std::max(0.0, iw) * std::max(0.0, ih);
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

}  // namespace eolo

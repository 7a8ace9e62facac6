#pragma once

#include <utility>

#include "eolo/geometry.hpp"
#include "eolo/mask.hpp"

namespace eolo {

/// One instance at output stride: class id, binary mask, and the derived
/// center of gravity and tight bounding box.
struct InstanceAnnotation {
  int class_id = 0;
  Mask mask;
  Point center;
  BoundingBox bbox;

  static InstanceAnnotation from_mask(int class_id, Mask mask) {
    InstanceAnnotation a;
    a.class_id = class_id;
    a.center = centroid(mask);
    a.bbox = tight_bbox(mask);
    a.mask = std::move(mask);
    return a;
  }
};

}  // namespace eolo

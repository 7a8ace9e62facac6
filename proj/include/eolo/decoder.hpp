#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "eolo/geometry.hpp"
#include "eolo/grid_map.hpp"
#include "eolo/image_ops.hpp"
#include "eolo/mask.hpp"

namespace eolo {

struct Detection {
  int class_id = 0;
  Point center;  // cell coordinates
  double score = 0.0;
  BoundingBox box;
};

struct InstanceResult {
  Detection detection;
  Mask mask;
};

struct DecodeConfig {
  int top_k = 100;
  double score_threshold = 0.3;
  double seg_threshold = 0.5;       // useful range 0.5 - 0.8
  double iou_assign_threshold = 0.0;
  std::optional<double> nms_iou;    // unset = NMS off
};

struct DecodeStats {
  std::int64_t unassigned_positive_pixels = 0;
};

/// Local maxima of the center heatmap: a cell is a peak iff its value equals
/// the 3x3 neighborhood maximum and clears the score threshold. Peaks are
/// sorted by score descending (ties by class, y, x) and truncated to top_k.
template <typename Scalar>
std::vector<Detection> extract_peaks(const GridMap<Scalar>& center_map,
                                     const DecodeConfig& cfg = {}) {
  GridMap<Scalar> pooled = maxpool3x3(center_map);
  std::vector<Detection> peaks;
  for (Index c = 0; c < center_map.channels(); ++c) {
    for (Index y = 0; y < center_map.height(); ++y) {
      for (Index x = 0; x < center_map.width(); ++x) {
        const Scalar v = center_map(c, y, x);
        if (static_cast<double>(v) < cfg.score_threshold) continue;
        if (v != pooled(c, y, x)) continue;
        peaks.push_back(Detection{static_cast<int>(c),
                                  Point{static_cast<double>(x), static_cast<double>(y)},
                                  static_cast<double>(v),
                                  BoundingBox{}});
      }
    }
  }
  auto before = [](const Detection& a, const Detection& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.class_id != b.class_id) return a.class_id < b.class_id;
    if (a.center.y != b.center.y) return a.center.y < b.center.y;
    return a.center.x < b.center.x;
  };
  const size_t keep = std::min<size_t>(peaks.size(), static_cast<size_t>(cfg.top_k));
  std::partial_sort(peaks.begin(), peaks.begin() + keep, peaks.end(), before);
  peaks.resize(keep);
  return peaks;
}

/// Fills each detection's box from the 4D size map at its center cell.
/// Negative predicted distances are clamped to zero.
template <typename Scalar>
std::vector<Detection> attach_boxes(std::vector<Detection> peaks,
                                    const GridMap<Scalar>& size_map) {
  if (size_map.channels() != 4) throw std::invalid_argument("attach_boxes: size map needs 4 channels");
  for (Detection& d : peaks) {
    const Index x = static_cast<Index>(d.center.x);
    const Index y = static_cast<Index>(d.center.y);
    const Box4D dist{std::max(0.0, static_cast<double>(size_map(0, y, x))),
                     std::max(0.0, static_cast<double>(size_map(1, y, x))),
                     std::max(0.0, static_cast<double>(size_map(2, y, x))),
                     std::max(0.0, static_cast<double>(size_map(3, y, x)))};
    d.box = box_from_4d(d.center, dist);
  }
  return peaks;
}

/// Greedy class-wise suppression on a score-sorted list: a detection is
/// dropped when its IoU with an already kept detection of the same class
/// exceeds the threshold. Survivors keep their input order.
inline std::vector<Detection> nms(const std::vector<Detection>& sorted, double nms_iou) {
  std::vector<Detection> kept;
  kept.reserve(sorted.size());
  for (const Detection& d : sorted) {
    bool suppressed = false;
    for (const Detection& k : kept) {
      if (k.class_id == d.class_id && iou(k.box, d.box) > nms_iou) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

namespace detail {

inline bool dilated_contains(const BoundingBox& b, Index x, Index y) {
  const double px = static_cast<double>(x), py = static_cast<double>(y);
  return px >= b.x1 - 1.0 && px <= b.x2 + 1.0 && py >= b.y1 - 1.0 && py <= b.y2 + 1.0;
}

}  // namespace detail

/// Assigns semantic-foreground pixels to detections. A pixel of class c with
/// seg probability above the threshold is gated to the detections of class c
/// whose 1-cell dilated box contains it. A sole candidate takes the pixel
/// outright; with several, the pixel's own regressed box (from the size map
/// at the pixel) is compared by IoU against each candidate box and the best
/// match above cfg.iou_assign_threshold wins, ties going to the
/// higher-scored (earlier) detection. Detections whose mask ends up empty
/// are dropped; unassigned positive pixels are tallied in `stats`.
template <typename Scalar>
std::vector<InstanceResult> assign_pixels(const std::vector<Detection>& detections,
                                          const GridMap<Scalar>& seg_map,
                                          const GridMap<Scalar>& size_map,
                                          const DecodeConfig& cfg = {},
                                          DecodeStats* stats = nullptr) {
  if (seg_map.height() != size_map.height() || seg_map.width() != size_map.width()) {
    throw std::invalid_argument("assign_pixels: seg/size map shape mismatch");
  }
  const Index h = seg_map.height(), w = seg_map.width();

  std::vector<std::vector<size_t>> by_class(seg_map.channels());
  for (size_t i = 0; i < detections.size(); ++i) {
    const int c = detections[i].class_id;
    if (c >= 0 && c < seg_map.channels()) by_class[c].push_back(i);
  }

  std::vector<Mask> masks(detections.size());
  std::vector<std::int64_t> areas(detections.size(), 0);
  for (auto& m : masks) m = Mask::Zero(h, w);

  std::int64_t unassigned = 0;
  std::vector<size_t> candidates;
  for (Index c = 0; c < seg_map.channels(); ++c) {
    const auto& dets = by_class[c];
    auto seg = seg_map.channel(c);
    for (Index y = 0; y < h; ++y) {
      for (Index x = 0; x < w; ++x) {
        if (static_cast<double>(seg(y, x)) < cfg.seg_threshold) continue;
        candidates.clear();
        for (size_t i : dets) {
          if (detail::dilated_contains(detections[i].box, x, y)) candidates.push_back(i);
        }
        if (candidates.empty()) {
          ++unassigned;
          continue;
        }
        size_t chosen = candidates.front();
        if (candidates.size() > 1) {
          const Box4D dist{std::max(0.0, static_cast<double>(size_map(0, y, x))),
                           std::max(0.0, static_cast<double>(size_map(1, y, x))),
                           std::max(0.0, static_cast<double>(size_map(2, y, x))),
                           std::max(0.0, static_cast<double>(size_map(3, y, x)))};
          const BoundingBox pixel_box =
              box_from_4d(Point{static_cast<double>(x), static_cast<double>(y)}, dist);
          double best = cfg.iou_assign_threshold;
          bool found = false;
          for (size_t i : candidates) {
            const double v = iou(pixel_box, detections[i].box);
            if (v > best) {
              best = v;
              chosen = i;
              found = true;
            }
          }
          if (!found) {
            ++unassigned;
            continue;
          }
        }
        masks[chosen](y, x) = 1;
        ++areas[chosen];
      }
    }
  }
  if (stats) stats->unassigned_positive_pixels += unassigned;

  std::vector<InstanceResult> results;
  for (size_t i = 0; i < detections.size(); ++i) {
    if (areas[i] == 0) continue;
    results.push_back(InstanceResult{detections[i], std::move(masks[i])});
  }
  return results;
}

/// Sharpens an instance mask against a higher-resolution segmentation map
/// whose shape is an integer multiple of the base shape: the mask is
/// upsampled bilinearly, multiplied by the hi-res class probability and
/// re-thresholded. Without a hi-res map this is the identity.
template <typename Scalar>
InstanceResult refine_mask(InstanceResult result, const GridMap<Scalar>* hi_res_seg,
                           const DecodeConfig& cfg = {}) {
  if (hi_res_seg == nullptr) return result;
  const Index bh = result.mask.rows(), bw = result.mask.cols();
  const Index hh = hi_res_seg->height(), hw = hi_res_seg->width();
  if (hh % bh != 0 || hw % bw != 0) {
    throw std::invalid_argument("refine_mask: hi-res shape is not a multiple of the base shape");
  }
  if (result.detection.class_id < 0 || result.detection.class_id >= hi_res_seg->channels()) {
    throw std::invalid_argument("refine_mask: class channel missing from hi-res map");
  }

  GridMap<Scalar> soft(1, bh, bw);
  for (Index y = 0; y < bh; ++y) {
    for (Index x = 0; x < bw; ++x) {
      soft(0, y, x) = result.mask(y, x) ? Scalar(1) : Scalar(0);
    }
  }
  GridMap<Scalar> up = bilinear_resize(soft, hh, hw);
  auto prob = hi_res_seg->channel(result.detection.class_id);
  Mask refined(hh, hw);
  for (Index y = 0; y < hh; ++y) {
    for (Index x = 0; x < hw; ++x) {
      const double v = static_cast<double>(up(0, y, x)) * static_cast<double>(prob(y, x));
      refined(y, x) = v >= cfg.seg_threshold ? 1 : 0;
    }
  }
  result.mask = std::move(refined);
  return result;
}

/// Predicted head maps for one image. `seg_hires` optionally holds finer
/// segmentation maps (shapes must be integer multiples of the base shape);
/// the finest one is used for mask refinement.
template <typename Scalar>
struct HeadMaps {
  GridMap<Scalar> center;  // C x H x W
  GridMap<Scalar> size;    // 4 x H x W
  GridMap<Scalar> seg;     // C x H x W
  std::vector<GridMap<Scalar>> seg_hires;
};

/// Full decode pipeline: peak extraction, box attachment, optional NMS,
/// pixel assignment and optional mask refinement. Pure function of its
/// inputs; the result is sorted by (class, score desc, y, x).
template <typename Scalar>
std::vector<InstanceResult> decode(const HeadMaps<Scalar>& maps, const DecodeConfig& cfg = {},
                                   DecodeStats* stats = nullptr) {
  if (maps.size.channels() != 4 || !maps.center.same_shape(maps.seg) ||
      maps.center.height() != maps.size.height() || maps.center.width() != maps.size.width()) {
    throw std::invalid_argument("decode: inconsistent map shapes");
  }
  std::vector<Detection> dets = attach_boxes(extract_peaks(maps.center, cfg), maps.size);
  if (cfg.nms_iou.has_value()) dets = nms(dets, *cfg.nms_iou);
  std::vector<InstanceResult> results = assign_pixels(dets, maps.seg, maps.size, cfg, stats);

  const GridMap<Scalar>* finest = nullptr;
  for (const auto& m : maps.seg_hires) {
    if (finest == nullptr || m.height() > finest->height()) finest = &m;
  }
  if (finest != nullptr) {
    for (auto& r : results) r = refine_mask(std::move(r), finest, cfg);
  }

  std::sort(results.begin(), results.end(), [](const InstanceResult& a, const InstanceResult& b) {
    const Detection& da = a.detection;
    const Detection& db = b.detection;
    if (da.class_id != db.class_id) return da.class_id < db.class_id;
    if (da.score != db.score) return da.score > db.score;
    if (da.center.y != db.center.y) return da.center.y < db.center.y;
    return da.center.x < db.center.x;
  });
  return results;
}

}  // namespace eolo

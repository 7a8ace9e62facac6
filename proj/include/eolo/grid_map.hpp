#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <utility>

namespace eolo {

using Index = Eigen::Index;

/// Dense C x H x W scalar map stored flat in row-major (channel, row, column)
/// order. Carrier for center heatmaps, 4D size maps and segmentation maps.
/// Probability-valued maps hold values in [0,1], distance-valued maps hold
/// nonnegative values; those range contracts are enforced by the operations
/// that rely on them, not by the container.
template <typename Scalar>
class GridMap {
 public:
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using PlaneRef = Eigen::Map<Plane>;
  using ConstPlaneRef = Eigen::Map<const Plane>;

  GridMap() = default;

  GridMap(Index channels, Index height, Index width) {
    if (channels < 1 || height < 1 || width < 1) {
      throw std::invalid_argument("GridMap: dimensions must all be >= 1");
    }
    channels_ = channels;
    height_ = height;
    width_ = width;
    values_ = Values::Zero(channels * height * width);
  }

  static GridMap constant(Index channels, Index height, Index width, Scalar v) {
    GridMap m(channels, height, width);
    m.values_.setConstant(v);
    return m;
  }

  Index channels() const { return channels_; }
  Index height() const { return height_; }
  Index width() const { return width_; }
  Index size() const { return values_.size(); }
  bool empty() const { return values_.size() == 0; }

  bool same_shape(const GridMap& o) const {
    return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
  }

  Scalar& operator()(Index c, Index y, Index x) {
    return values_[(c * height_ + y) * width_ + x];
  }
  Scalar operator()(Index c, Index y, Index x) const {
    return values_[(c * height_ + y) * width_ + x];
  }

  /// H x W view of one channel; writes through to the underlying storage.
  PlaneRef channel(Index c) {
    return PlaneRef(values_.data() + c * height_ * width_, height_, width_);
  }
  ConstPlaneRef channel(Index c) const {
    return ConstPlaneRef(values_.data() + c * height_ * width_, height_, width_);
  }

  Values& values() { return values_; }
  const Values& values() const { return values_; }

  template <typename Other>
  GridMap<Other> cast() const {
    GridMap<Other> out(channels_, height_, width_);
    out.values() = values_.template cast<Other>();
    return out;
  }

  bool contains(Index c, Index y, Index x) const {
    return c >= 0 && c < channels_ && y >= 0 && y < height_ && x >= 0 && x < width_;
  }

 private:
  Index channels_ = 0;
  Index height_ = 0;
  Index width_ = 0;
  Values values_;
};

using GridMapF = GridMap<float>;
using GridMapD = GridMap<double>;

}  // namespace eolo

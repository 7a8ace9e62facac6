#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eolo/grid_map.hpp"

namespace eolo {

/// Per-channel 3x3 neighborhood maximum. Border cells use the in-bounds
/// subset of the window, so the output shape equals the input shape.
template <typename Scalar>
GridMap<Scalar> maxpool3x3(const GridMap<Scalar>& in) {
  const Index c = in.channels(), h = in.height(), w = in.width();
  GridMap<Scalar> rowmax(c, h, w);
  GridMap<Scalar> out(c, h, w);
  // Separable: horizontal max pass then vertical max pass.
  for (Index ch = 0; ch < c; ++ch) {
    auto src = in.channel(ch);
    auto tmp = rowmax.channel(ch);
    for (Index y = 0; y < h; ++y) {
      for (Index x = 0; x < w; ++x) {
        Scalar m = src(y, x);
        if (x > 0) m = std::max(m, src(y, x - 1));
        if (x + 1 < w) m = std::max(m, src(y, x + 1));
        tmp(y, x) = m;
      }
    }
    auto dst = out.channel(ch);
    for (Index y = 0; y < h; ++y) {
      for (Index x = 0; x < w; ++x) {
        Scalar m = tmp(y, x);
        if (y > 0) m = std::max(m, tmp(y - 1, x));
        if (y + 1 < h) m = std::max(m, tmp(y + 1, x));
        dst(y, x) = m;
      }
    }
  }
  return out;
}

namespace detail {
// a + t*(b - a): exact for a == b and for t == 0, which keeps resizing
// bit-exact on constant inputs and on identity resizes.
template <typename Scalar>
inline Scalar lerp_exact(Scalar a, Scalar b, Scalar t) {
  return a + t * (b - a);
}
}  // namespace detail

/// Bilinear interpolation with the align-corners=false convention
/// (source coordinate = (dst + 0.5) * in/out - 0.5, edge-clamped).
template <typename Scalar>
GridMap<Scalar> bilinear_resize(const GridMap<Scalar>& in, Index new_h, Index new_w) {
  if (new_h < 1 || new_w < 1) {
    throw std::invalid_argument("bilinear_resize: target dimensions must be >= 1");
  }
  const Index c = in.channels(), h = in.height(), w = in.width();
  if (new_h == h && new_w == w) return in;

  GridMap<Scalar> out(c, new_h, new_w);
  const double sy = static_cast<double>(h) / static_cast<double>(new_h);
  const double sx = static_cast<double>(w) / static_cast<double>(new_w);
  for (Index ch = 0; ch < c; ++ch) {
    auto src = in.channel(ch);
    auto dst = out.channel(ch);
    for (Index y = 0; y < new_h; ++y) {
      const double fy = (static_cast<double>(y) + 0.5) * sy - 0.5;
      Index y0 = static_cast<Index>(std::floor(fy));
      const Scalar ty = static_cast<Scalar>(fy - static_cast<double>(y0));
      const Index y0c = std::clamp<Index>(y0, 0, h - 1);
      const Index y1c = std::clamp<Index>(y0 + 1, 0, h - 1);
      for (Index x = 0; x < new_w; ++x) {
        const double fx = (static_cast<double>(x) + 0.5) * sx - 0.5;
        Index x0 = static_cast<Index>(std::floor(fx));
        const Scalar tx = static_cast<Scalar>(fx - static_cast<double>(x0));
        const Index x0c = std::clamp<Index>(x0, 0, w - 1);
        const Index x1c = std::clamp<Index>(x0 + 1, 0, w - 1);
        const Scalar top = detail::lerp_exact(src(y0c, x0c), src(y0c, x1c), tx);
        const Scalar bot = detail::lerp_exact(src(y1c, x0c), src(y1c, x1c), tx);
        dst(y, x) = detail::lerp_exact(top, bot, ty);
      }
    }
  }
  return out;
}

}  // namespace eolo

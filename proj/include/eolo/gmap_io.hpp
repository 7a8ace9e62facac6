#pragma once

#include <string>

#include "eolo/grid_map.hpp"

namespace eolo {

/// GMAP v1 container: ASCII magic "EOLOGMAP", newline, one JSON header line
/// {"v":1,"dtype":"f32le","shape":[C,H,W]}, newline, then C*H*W raw
/// little-endian 32-bit floats in row-major (c, y, x) order.
/// Write -> read round-trips are bit-exact.
void save_gmap(const std::string& path, const GridMapF& map);
GridMapF load_gmap(const std::string& path);

template <typename Scalar>
void save_gmap(const std::string& path, const GridMap<Scalar>& map) {
  save_gmap(path, map.template cast<float>());
}

template <typename Scalar>
GridMap<Scalar> load_gmap_as(const std::string& path) {
  return load_gmap(path).cast<Scalar>();
}

}  // namespace eolo

#include "eolo/gmap_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace eolo {

static_assert(std::endian::native == std::endian::little,
              "GMAP raw payload is little-endian");

namespace {
constexpr char kMagic[] = "EOLOGMAP";
}

void save_gmap(const std::string& path, const GridMapF& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_gmap: cannot open " + path);
  out << kMagic << '\n';
  out << "{\"v\":1,\"dtype\":\"f32le\",\"shape\":[" << map.channels() << ','
      << map.height() << ',' << map.width() << "]}\n";
  out.write(reinterpret_cast<const char*>(map.values().data()),
            static_cast<std::streamsize>(map.size() * sizeof(float)));
  if (!out) throw std::runtime_error("save_gmap: write failed for " + path);
}

GridMapF load_gmap(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_gmap: cannot open " + path);
  std::string magic, header;
  if (!std::getline(in, magic) || magic != kMagic) {
    throw std::runtime_error("load_gmap: bad magic in " + path);
  }
  if (!std::getline(in, header)) {
    throw std::runtime_error("load_gmap: missing header in " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_gmap: bad header JSON in " + path + ": " + e.what());
  }
  if (j.value("v", 0) != 1) throw std::runtime_error("load_gmap: unsupported version in " + path);
  if (j.value("dtype", "") != "f32le") {
    throw std::runtime_error("load_gmap: unsupported dtype in " + path);
  }
  const auto shape = j.at("shape");
  if (!shape.is_array() || shape.size() != 3) {
    throw std::runtime_error("load_gmap: bad shape in " + path);
  }
  const Index c = shape[0].get<Index>();
  const Index h = shape[1].get<Index>();
  const Index w = shape[2].get<Index>();
  if (c < 1 || h < 1 || w < 1) throw std::runtime_error("load_gmap: bad shape in " + path);

  GridMapF map(c, h, w);
  in.read(reinterpret_cast<char*>(map.values().data()),
          static_cast<std::streamsize>(map.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(map.size() * sizeof(float))) {
    throw std::runtime_error("load_gmap: truncated payload in " + path);
  }
  return map;
}

}  // namespace eolo

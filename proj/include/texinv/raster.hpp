#pragma once

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "texinv/picture.hpp"

namespace texinv {

/// 8-bit grayscale, row-major, top-left origin.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> luminance;

  std::uint8_t at(int x, int y) const { return luminance[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

/// Samples each pixel once at its center. Pixels inside a segment's clip
/// polygon take their band's luminance; others keep the background. On a
/// shared boundary the lower segment id wins.
inline RasterImage rasterize(const SequenceState& state) {
  const GenConfig& c = state.config;
  RasterImage img;
  img.width = c.width;
  img.height = c.height;
  img.luminance.assign(static_cast<std::size_t>(c.width) * c.height,
                       static_cast<std::uint8_t>(c.background_luminance));
  std::vector<bool> painted(img.luminance.size(), false);

  for (const auto& seg : state.segments) {
    const auto& poly = seg.clip_polygon;
    double x0 = poly[0].x, x1 = poly[0].x, y0 = poly[0].y, y1 = poly[0].y;
    for (const auto& p : poly.vertices()) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    const int px0 = std::max(0, static_cast<int>(std::floor(x0 - 0.5)));
    const int px1 = std::min(c.width - 1, static_cast<int>(std::ceil(x1 - 0.5)));
    const int py0 = std::max(0, static_cast<int>(std::floor(y0 - 0.5)));
    const int py1 = std::min(c.height - 1, static_cast<int>(std::ceil(y1 - 0.5)));
    const Point2 origin = band_frame(seg.roles).origin();
    for (int y = py0; y <= py1; ++y) {
      for (int x = px0; x <= px1; ++x) {
        const std::size_t idx = static_cast<std::size_t>(y) * c.width + x;
        if (painted[idx]) continue;
        const Point2 p{x + 0.5, y + 0.5};
        if (!poly.contains(p)) continue;
        img.luminance[idx] = band_luminance(band_index(p, seg.band_lines, origin), seg.order);
        painted[idx] = true;
      }
    }
  }
  return img;
}

/// Binary portable graymap (P5).
inline std::string encode_pgm(const RasterImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.luminance.data()), img.luminance.size());
  return out;
}

namespace detail {

inline void put_be32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>(v >> 16));
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v));
}

inline void put_chunk(std::string& out, const char* type, const std::string& data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  const std::string body = std::string(type, 4) + data;
  out += body;
  put_be32(out, static_cast<std::uint32_t>(crc32(0L, reinterpret_cast<const Bytef*>(body.data()),
                                                 static_cast<uInt>(body.size()))));
}

}  // namespace detail

/// 8-bit grayscale PNG, no filtering, zlib level 6.
inline std::string encode_png(const RasterImage& img) {
  std::string raw;
  raw.reserve(static_cast<std::size_t>(img.height) * (img.width + 1));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back('\0');
    raw.append(reinterpret_cast<const char*>(img.luminance.data()) + static_cast<std::size_t>(y) * img.width,
               static_cast<std::size_t>(img.width));
  }
  uLongf packed_len = compressBound(static_cast<uLong>(raw.size()));
  std::string packed(packed_len, '\0');
  if (compress2(reinterpret_cast<Bytef*>(packed.data()), &packed_len, reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw Error(ErrorCode::InvalidArgument, "png compression failed");
  packed.resize(packed_len);

  std::string out = "\x89PNG\r\n\x1a\n";
  std::string ihdr;
  detail::put_be32(ihdr, static_cast<std::uint32_t>(img.width));
  detail::put_be32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr += std::string("\x08\x00\x00\x00\x00", 5);  // depth 8, grayscale, deflate, no filter, no interlace
  detail::put_chunk(out, "IHDR", ihdr);
  detail::put_chunk(out, "IDAT", packed);
  detail::put_chunk(out, "IEND", "");
  return out;
}

}  // namespace texinv

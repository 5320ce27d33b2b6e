// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal 8-bit RGB raster support for the real-image tiling path: PPM
// (P6) files, cropping, and bilinear rescaling. The per-tile detector is
// pluggable, so this is all the pixel plumbing the pipeline needs.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbox {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  bool empty() const { return width == 0 || height == 0; }
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
            static_cast<std::size_t>(x)) *
           3;
  }
  const std::uint8_t* pixel(int x, int y) const { return rgb.data() + index(x, y); }
  std::uint8_t* pixel(int x, int y) { return rgb.data() + index(x, y); }
};

inline Image make_image(int width, int height, std::uint8_t r = 0, std::uint8_t g = 0,
                        std::uint8_t b = 0) {
  if (width < 1 || height < 1) throw std::invalid_argument("make_image: size must be >= 1");
  Image img;
  img.width = width;
  img.height = height;
  img.rgb.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
  for (std::size_t i = 0; i + 2 < img.rgb.size(); i += 3) {
    img.rgb[i] = r;
    img.rgb[i + 1] = g;
    img.rgb[i + 2] = b;
  }
  return img;
}

namespace detail {

inline int read_ppm_token(std::istream& in, const std::string& source) {
  // skips whitespace and '#' comment lines between header fields
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = 0;
  if (!(in >> value)) throw std::runtime_error(source + ": malformed PPM header");
  return value;
}

}  // namespace detail

inline Image read_ppm(std::istream& in, const std::string& source) {
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (!in || magic != "P6") throw std::runtime_error(source + ": not a binary PPM (P6) file");
  Image img;
  img.width = detail::read_ppm_token(in, source);
  img.height = detail::read_ppm_token(in, source);
  const int maxval = detail::read_ppm_token(in, source);
  if (img.width < 1 || img.height < 1) throw std::runtime_error(source + ": bad PPM dimensions");
  if (maxval != 255) throw std::runtime_error(source + ": only 8-bit PPM (maxval 255) supported");
  in.get();  // single whitespace after maxval
  img.rgb.resize(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height) * 3);
  in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.rgb.size()) {
    throw std::runtime_error(source + ": truncated PPM pixel data");
  }
  return img;
}

inline Image read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_ppm(in, path.string());
}

inline void write_ppm(std::ostream& out, const Image& img) {
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()),
            static_cast<std::streamsize>(img.rgb.size()));
}

inline void write_ppm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_ppm(out, img);
}

inline Image crop(const Image& img, int x, int y, int w, int h) {
  if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > img.width || y + h > img.height) {
    throw std::out_of_range("crop: region outside image bounds");
  }
  Image out;
  out.width = w;
  out.height = h;
  out.rgb.resize(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
  for (int row = 0; row < h; ++row) {
    const auto* src = img.pixel(x, y + row);
    std::copy(src, src + static_cast<std::size_t>(w) * 3, out.pixel(0, row));
  }
  return out;
}

/// Bilinear rescale to the exact target size (the tiling plan's per-scale
/// dimensions).
inline Image rescale_bilinear(const Image& img, int new_w, int new_h) {
  if (new_w < 1 || new_h < 1) throw std::invalid_argument("rescale: target size must be >= 1");
  if (new_w == img.width && new_h == img.height) return img;
  Image out;
  out.width = new_w;
  out.height = new_h;
  out.rgb.resize(static_cast<std::size_t>(new_w) * static_cast<std::size_t>(new_h) * 3);
  const double sx = static_cast<double>(img.width) / new_w;
  const double sy = static_cast<double>(img.height) / new_h;
  for (int y = 0; y < new_h; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < new_w; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < 3; ++c) {
        const double top = img.pixel(x0, y0)[c] * (1.0 - wx) + img.pixel(x1, y0)[c] * wx;
        const double bot = img.pixel(x0, y1)[c] * (1.0 - wx) + img.pixel(x1, y1)[c] * wx;
        out.pixel(x, y)[c] = static_cast<std::uint8_t>(std::lround(top * (1.0 - wy) + bot * wy));
      }
    }
  }
  return out;
}

}  // namespace rbox

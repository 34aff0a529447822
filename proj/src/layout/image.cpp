#include "tilt/layout/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "tilt/check.hpp"

namespace tilt {

void ImageGray::fill_rect(int x0, int y0, int x1, int y1, float value) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, width);
  y1 = std::min(y1, height);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) at(x, y) = value;
}

namespace {

int read_pnm_int(std::istream& in) {
  // skips whitespace and '#' comments per the PNM grammar
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  TILT_VALIDATE(c != EOF && std::isdigit(c), "malformed PNM header");
  int v = 0;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    c = in.get();
  }
  return v;
}

}  // namespace

ImageGray load_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  TILT_VALIDATE(in.good(), "cannot open image " << path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  TILT_VALIDATE(m0 == 'P' && (m1 == '5' || m1 == '6'), path << ": not a P5/P6 PNM file");
  const bool color = m1 == '6';
  const int w = read_pnm_int(in);
  const int h = read_pnm_int(in);
  const int maxval = read_pnm_int(in);
  TILT_VALIDATE(w > 0 && h > 0, path << ": bad dimensions " << w << "x" << h);
  TILT_VALIDATE(maxval == 255, path << ": only 8-bit PNM supported, maxval " << maxval);
  const size_t n = static_cast<size_t>(w) * h * (color ? 3 : 1);
  std::vector<uint8_t> raw(n);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
  TILT_VALIDATE(static_cast<size_t>(in.gcount()) == n, path << ": truncated pixel data");
  ImageGray img(w, h);
  if (color) {
    for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i) {
      const float lum =
          0.299f * raw[3 * i] + 0.587f * raw[3 * i + 1] + 0.114f * raw[3 * i + 2];
      img.pix[i] = lum / 255.0f;
    }
  } else {
    for (size_t i = 0; i < n; ++i) img.pix[i] = raw[i] / 255.0f;
  }
  return img;
}

void save_pgm(const ImageGray& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  TILT_VALIDATE(out.good(), "cannot write image " << path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<uint8_t> raw(img.pix.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    const float v = std::clamp(img.pix[i], 0.0f, 1.0f);
    raw[i] = static_cast<uint8_t>(std::lround(v * 255.0f));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  TILT_VALIDATE(out.good(), "short write to " << path);
}

ImageGray resize_bilinear(const ImageGray& img, int new_w, int new_h) {
  TILT_CHECK(new_w > 0 && new_h > 0, "resize target must be positive");
  if (img.width == new_w && img.height == new_h) return img;
  ImageGray out(new_w, new_h);
  const double sx = static_cast<double>(img.width) / new_w;
  const double sy = static_cast<double>(img.height) / new_h;
  for (int y = 0; y < new_h; ++y) {
    const double fy = (y + 0.5) * sy - 0.5;
    const int y0 = std::clamp(static_cast<int>(std::floor(fy)), 0, img.height - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wy = std::clamp(fy - y0, 0.0, 1.0);
    for (int x = 0; x < new_w; ++x) {
      const double fx = (x + 0.5) * sx - 0.5;
      const int x0 = std::clamp(static_cast<int>(std::floor(fx)), 0, img.width - 1);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double wx = std::clamp(fx - x0, 0.0, 1.0);
      const double top = (1 - wx) * img.at(x0, y0) + wx * img.at(x1, y0);
      const double bot = (1 - wx) * img.at(x0, y1) + wx * img.at(x1, y1);
      out.at(x, y) = static_cast<float>((1 - wy) * top + wy * bot);
    }
  }
  return out;
}

}  // namespace tilt

#pragma once

#include <string>
#include <vector>

namespace tilt {

// 8-bit grayscale raster held as floats in [0, 1]; 1.0 is paper white.
struct ImageGray {
  int width = 0, height = 0;
  std::vector<float> pix;  // row-major, height * width

  ImageGray() = default;
  ImageGray(int w, int h, float fill = 1.0f)
      : width(w), height(h), pix(static_cast<size_t>(w) * h, fill) {}

  float at(int x, int y) const { return pix[static_cast<size_t>(y) * width + x]; }
  float& at(int x, int y) { return pix[static_cast<size_t>(y) * width + x]; }
  bool empty() const { return pix.empty(); }
  bool operator==(const ImageGray&) const = default;

  // Fills the integer pixel rectangle [x0, x1) x [y0, y1), clamped to bounds.
  void fill_rect(int x0, int y0, int x1, int y1, float value);
};

// P5 (grayscale) reader/writer; P6 is converted to grayscale by luminance.
ImageGray load_pnm(const std::string& path);
void save_pgm(const ImageGray& img, const std::string& path);

ImageGray resize_bilinear(const ImageGray& img, int new_w, int new_h);

}  // namespace tilt

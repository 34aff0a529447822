#pragma once

#include <algorithm>

namespace tilt {

// Axis-aligned box in page pixel units. x0 <= x1 and y0 <= y1 once validated.
struct BBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double cx() const { return (x0 + x1) / 2; }
  double cy() const { return (y0 + y1) / 2; }
  bool valid() const { return x0 <= x1 && y0 <= y1; }

  BBox clamped(double w, double h) const {
    return {std::clamp(x0, 0.0, w), std::clamp(y0, 0.0, h), std::clamp(x1, 0.0, w),
            std::clamp(y1, 0.0, h)};
  }
  static BBox merge(const BBox& a, const BBox& b) {
    return {std::min(a.x0, b.x0), std::min(a.y0, b.y0), std::max(a.x1, b.x1),
            std::max(a.y1, b.y1)};
  }
  bool operator==(const BBox&) const = default;
};

struct GridCell {
  int x = 0, y = 0;
  bool operator==(const GridCell&) const = default;
};

// 2D affine map: (x, y) -> (a x + b y + tx, c x + d y + ty).
struct Affine2D {
  double a = 1, b = 0, c = 0, d = 1, tx = 0, ty = 0;

  void apply(double x, double y, double& ox, double& oy) const {
    ox = a * x + b * y + tx;
    oy = c * x + d * y + ty;
  }
  Affine2D then(const Affine2D& o) const {  // o after this
    return {o.a * a + o.b * c,      o.a * b + o.b * d,      o.c * a + o.d * c,
            o.c * b + o.d * d,      o.a * tx + o.b * ty + o.tx, o.c * tx + o.d * ty + o.ty};
  }
  bool is_identity() const {
    return a == 1 && b == 0 && c == 0 && d == 1 && tx == 0 && ty == 0;
  }
  double det() const { return a * d - b * c; }
  Affine2D inverse() const;
};

}  // namespace tilt

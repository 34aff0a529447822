#include "tilt/vision/augment.hpp"

#include <cmath>

#include "tilt/check.hpp"

namespace tilt {

namespace {
constexpr double kDegToRad = 0.017453292519943295;
}

Affine2D Affine2D::inverse() const {
  const double dt = det();
  TILT_CHECK(std::abs(dt) > 1e-12, "affine map is singular");
  const double ia = d / dt, ib = -b / dt, ic = -c / dt, id = a / dt;
  return {ia, ib, ic, id, -(ia * tx + ib * ty), -(ic * tx + id * ty)};
}

AffineParams sample_affine_params(const AffineBounds& bounds, Rng& rng) {
  AffineParams p;
  p.rot_deg = rng.uniform(-bounds.rot_deg, bounds.rot_deg);
  p.tx_frac = rng.uniform(-bounds.trans_frac, bounds.trans_frac);
  p.ty_frac = rng.uniform(-bounds.trans_frac, bounds.trans_frac);
  p.scale = rng.uniform(bounds.scale_lo, bounds.scale_hi);
  p.shear_deg = rng.uniform(-bounds.shear_deg, bounds.shear_deg);
  return p;
}

Affine2D affine_matrix(const AffineParams& p, int page_w, int page_h) {
  const double cx = page_w / 2.0, cy = page_h / 2.0;
  const Affine2D to_origin{1, 0, 0, 1, -cx, -cy};
  const Affine2D scale{p.scale, 0, 0, p.scale, 0, 0};
  const Affine2D shear{1, std::tan(p.shear_deg * kDegToRad), 0, 1, 0, 0};
  const double th = p.rot_deg * kDegToRad;
  const Affine2D rot{std::cos(th), -std::sin(th), std::sin(th), std::cos(th), 0, 0};
  const Affine2D back{1, 0, 0, 1, cx + p.tx_frac * page_w, cy + p.ty_frac * page_h};
  return to_origin.then(scale).then(shear).then(rot).then(back);
}

ImageGray warp_image(const ImageGray& img, const Affine2D& m) {
  if (m.is_identity()) return img;
  const Affine2D inv = m.inverse();
  ImageGray out(img.width, img.height, 1.0f);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double sx, sy;
      inv.apply(x, y, sx, sy);
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      if (x0 < -1 || y0 < -1 || x0 > img.width - 1 || y0 > img.height - 1) continue;
      const double fx = sx - x0, fy = sy - y0;
      auto sample = [&](int px, int py) -> double {
        if (px < 0 || py < 0 || px >= img.width || py >= img.height) return 1.0;  // white
        return img.at(px, py);
      };
      const double top = (1 - fx) * sample(x0, y0) + fx * sample(x0 + 1, y0);
      const double bot = (1 - fx) * sample(x0, y0 + 1) + fx * sample(x0 + 1, y0 + 1);
      out.at(x, y) = static_cast<float>((1 - fy) * top + fy * bot);
    }
  }
  return out;
}

BBox transform_bbox(const BBox& b, const Affine2D& m, int page_w, int page_h) {
  const double xs[4] = {b.x0, b.x1, b.x0, b.x1};
  const double ys[4] = {b.y0, b.y0, b.y1, b.y1};
  BBox env;
  for (int k = 0; k < 4; ++k) {
    double ox, oy;
    m.apply(xs[k], ys[k], ox, oy);
    if (k == 0) {
      env = BBox{ox, oy, ox, oy};
    } else {
      env.x0 = std::min(env.x0, ox);
      env.y0 = std::min(env.y0, oy);
      env.x1 = std::max(env.x1, ox);
      env.y1 = std::max(env.y1, oy);
    }
  }
  return env.clamped(page_w, page_h);
}

bool affine_augment(Document& doc, const AffineBounds& bounds, double p, Rng& rng) {
  if (!doc.page.image) return false;
  if (!rng.bernoulli(p)) return false;
  const AffineParams params = sample_affine_params(bounds, rng);
  const Affine2D m = affine_matrix(params, doc.page.width, doc.page.height);
  *doc.page.image = warp_image(*doc.page.image, m);
  for (Token& t : doc.tokens) {
    t.bbox = transform_bbox(t.bbox, m, doc.page.width, doc.page.height);
  }
  return true;
}

int mask_image_regions(ImageGray& img, std::span<const BBox> regions, double p, Rng& rng) {
  int masked = 0;
  for (const BBox& r : regions) {
    if (!rng.bernoulli(p)) continue;
    img.fill_rect(static_cast<int>(std::floor(r.x0)), static_cast<int>(std::floor(r.y0)),
                  static_cast<int>(std::ceil(r.x1)), static_cast<int>(std::ceil(r.y1)), 1.0f);
    ++masked;
  }
  return masked;
}

}  // namespace tilt

#pragma once

#include <span>

#include "tilt/layout/document.hpp"
#include "tilt/rng.hpp"

namespace tilt {

// Uniform sampling bounds for the affine vision augmentation.
struct AffineBounds {
  double rot_deg = 5.0;     // +/- degrees
  double trans_frac = 0.05; // +/- fraction of page size
  double scale_lo = 0.9, scale_hi = 1.1;
  double shear_deg = 5.0;   // +/- degrees
};

struct AffineParams {
  double rot_deg = 0, tx_frac = 0, ty_frac = 0, scale = 1, shear_deg = 0;
  bool is_identity() const {
    return rot_deg == 0 && tx_frac == 0 && ty_frac == 0 && scale == 1 && shear_deg == 0;
  }
};

AffineParams sample_affine_params(const AffineBounds& bounds, Rng& rng);

// Rotation/scale/shear about the page centre plus translation in page
// fractions. Parallel lines stay parallel for any params.
Affine2D affine_matrix(const AffineParams& p, int page_w, int page_h);

// Inverse-mapped bilinear warp, white background. Identity params are an
// exact no-op.
ImageGray warp_image(const ImageGray& img, const Affine2D& m);

// Corners mapped, replaced by their axis-aligned envelope, clamped to page.
BBox transform_bbox(const BBox& b, const Affine2D& m, int page_w, int page_h);

// With probability p, samples params and applies them to the page raster and
// every token bbox. Returns whether the transform was applied.
bool affine_augment(Document& doc, const AffineBounds& bounds, double p, Rng& rng);

// Blanks each region to background independently with probability p.
// Returns the number of regions masked.
int mask_image_regions(ImageGray& img, std::span<const BBox> regions, double p, Rng& rng);

}  // namespace tilt

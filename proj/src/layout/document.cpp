#include "tilt/layout/document.hpp"

#include <cmath>
#include <limits>

#include "tilt/check.hpp"

namespace tilt {

std::string Document::text() const {
  std::string out;
  for (const Token& t : tokens) {
    if (t.kind != TokenKind::word) continue;
    if (!out.empty()) out.push_back(' ');
    out += t.text;
  }
  return out;
}

void validate_document(Document& doc) {
  TILT_VALIDATE(doc.page.width > 0 && doc.page.height > 0,
                "doc '" << doc.id << "': non-positive page size");
  if (doc.page.image) {
    TILT_VALIDATE(doc.page.image->width == doc.page.width &&
                      doc.page.image->height == doc.page.height,
                  "doc '" << doc.id << "': raster " << doc.page.image->width << "x"
                          << doc.page.image->height << " does not match declared page "
                          << doc.page.width << "x" << doc.page.height);
  }
  for (size_t i = 0; i < doc.tokens.size(); ++i) {
    Token& t = doc.tokens[i];
    TILT_VALIDATE(t.bbox.valid(), "doc '" << doc.id << "' token " << i << " ('" << t.text
                                          << "'): inverted bbox");
    t.bbox = t.bbox.clamped(doc.page.width, doc.page.height);
    if (t.kind == TokenKind::word) {
      TILT_VALIDATE(!t.text.empty(), "doc '" << doc.id << "' token " << i << ": empty word text");
    } else {
      TILT_VALIDATE(t.text.empty(),
                    "doc '" << doc.id << "' token " << i << ": anchor with text");
    }
  }
}

Document canonicalize(const Document& doc, int w, int h) {
  TILT_CHECK(w > 0 && h > 0, "canonical size must be positive");
  Document out = doc;
  if (doc.page.width == w && doc.page.height == h) return out;
  const double fx = static_cast<double>(w) / doc.page.width;
  const double fy = static_cast<double>(h) / doc.page.height;
  for (Token& t : out.tokens) {
    t.bbox = BBox{t.bbox.x0 * fx, t.bbox.y0 * fy, t.bbox.x1 * fx, t.bbox.y1 * fy}.clamped(w, h);
  }
  if (out.page.image) *out.page.image = resize_bilinear(*out.page.image, w, h);
  out.page.width = w;
  out.page.height = h;
  return out;
}

std::vector<Token> image_anchor_tokens(const Page& page, int count) {
  TILT_CHECK(count > 0, "anchor count must be positive");
  TILT_CHECK(page.width > 0 && page.height > 0, "anchors need a sized page");
  // pick the factorization whose grid aspect best matches the page
  const double target = std::log(static_cast<double>(page.width) / page.height);
  int best_gw = 1;
  double best_err = std::numeric_limits<double>::infinity();
  for (int gw = 1; gw <= count; ++gw) {
    if (count % gw != 0) continue;
    const int gh = count / gw;
    const double err = std::abs(std::log(static_cast<double>(gw) / gh) - target);
    if (err < best_err) {
      best_err = err;
      best_gw = gw;
    }
  }
  const int gw = best_gw, gh = count / best_gw;
  std::vector<Token> anchors;
  anchors.reserve(static_cast<size_t>(count));
  for (int gy = 0; gy < gh; ++gy) {
    for (int gx = 0; gx < gw; ++gx) {
      // shared boundaries so tiles partition the page exactly
      const double x0 = static_cast<double>(page.width) * gx / gw;
      const double x1 = static_cast<double>(page.width) * (gx + 1) / gw;
      const double y0 = static_cast<double>(page.height) * gy / gh;
      const double y1 = static_cast<double>(page.height) * (gy + 1) / gh;
      anchors.push_back(Token{"", BBox{x0, y0, x1, y1}, TokenKind::image_anchor});
    }
  }
  return anchors;
}

std::vector<GridCell> quantize_centers(std::span<const BBox> boxes, double page_w, double page_h,
                                       int grid_w, int grid_h) {
  TILT_CHECK(page_w > 0 && page_h > 0 && grid_w > 0 && grid_h > 0,
             "quantize_centers: bad dimensions");
  std::vector<GridCell> cells;
  cells.reserve(boxes.size());
  for (const BBox& b : boxes) {
    const int cx = static_cast<int>(std::floor(b.cx() / page_w * grid_w));
    const int cy = static_cast<int>(std::floor(b.cy() / page_h * grid_h));
    cells.push_back({std::clamp(cx, 0, grid_w - 1), std::clamp(cy, 0, grid_h - 1)});
  }
  return cells;
}

std::vector<GridCell> quantize_centers(const Document& doc, int grid_w, int grid_h) {
  std::vector<BBox> boxes;
  boxes.reserve(doc.tokens.size());
  for (const Token& t : doc.tokens) boxes.push_back(t.bbox);
  return quantize_centers(boxes, doc.page.width, doc.page.height, grid_w, grid_h);
}

}  // namespace tilt

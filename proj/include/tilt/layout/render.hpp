#pragma once

#include <string>

#include "tilt/layout/document.hpp"

namespace tilt {

struct RenderResult {
  Document doc;
  bool hard_wrapped = false;  // some word exceeded a full line and was split
};

// Lays plain text onto a monospace grid: words flow left-to-right,
// top-to-bottom; each word's bbox is its character cells. Deterministic.
// Words longer than a line are hard-wrapped into multiple tokens and the
// result is flagged. Throws if the text does not fit the page.
RenderResult render_plaintext(const std::string& text, int page_w, int page_h, int font_w,
                              int font_h);

// Draws every word token as filled rectangles, one per glyph cell, onto a
// fresh white raster attached to the page. `bold_token` (index, or -1) is
// drawn heavier. Glyph cell size is inferred from each token's bbox.
void rasterize_tokens(Document& doc, int bold_token = -1);

}  // namespace tilt

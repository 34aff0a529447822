#include "tilt/layout/render.hpp"

#include <cmath>
#include <sstream>

#include "tilt/check.hpp"

namespace tilt {

RenderResult render_plaintext(const std::string& text, int page_w, int page_h, int font_w,
                              int font_h) {
  TILT_CHECK(page_w > 0 && page_h > 0 && font_w > 0 && font_h > 0,
             "render_plaintext: dimensions must be positive");
  const int cols = page_w / font_w;
  const int rows = page_h / font_h;
  TILT_CHECK(cols >= 1 && rows >= 1, "render_plaintext: font does not fit page");

  RenderResult res;
  res.doc.page.width = page_w;
  res.doc.page.height = page_h;

  std::istringstream words(text);
  std::string word;
  int row = 0, col = 0;
  auto emit = [&](const std::string& w) {
    TILT_CHECK(row < rows, "render_plaintext: text does not fit page");
    const int len = static_cast<int>(w.size());
    Token t;
    t.text = w;
    t.bbox = BBox{static_cast<double>(col) * font_w, static_cast<double>(row) * font_h,
                  static_cast<double>(col + len) * font_w, static_cast<double>(row + 1) * font_h};
    res.doc.tokens.push_back(std::move(t));
    col += len + 1;  // one blank cell between words
  };
  while (words >> word) {
    int len = static_cast<int>(word.size());
    if (col > 0 && col + len > cols) {
      row += 1;
      col = 0;
    }
    while (len > cols) {  // hard wrap oversized words
      res.hard_wrapped = true;
      emit(word.substr(0, static_cast<size_t>(cols)));
      word = word.substr(static_cast<size_t>(cols));
      len = static_cast<int>(word.size());
      row += 1;
      col = 0;
    }
    emit(word);
  }
  return res;
}

void rasterize_tokens(Document& doc, int bold_token) {
  doc.page.image = ImageGray(doc.page.width, doc.page.height, 1.0f);
  ImageGray& img = *doc.page.image;
  for (size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& t = doc.tokens[i];
    if (t.kind != TokenKind::word || t.text.empty()) continue;
    const bool bold = static_cast<int>(i) == bold_token;
    const int len = static_cast<int>(t.text.size());
    const double cell_w = t.bbox.width() / len;
    for (int k = 0; k < len; ++k) {
      const int x0 = static_cast<int>(std::lround(t.bbox.x0 + k * cell_w));
      const int x1 = static_cast<int>(std::lround(t.bbox.x0 + (k + 1) * cell_w));
      const int y0 = static_cast<int>(std::lround(t.bbox.y0));
      const int y1 = static_cast<int>(std::lround(t.bbox.y1));
      if (bold) {
        img.fill_rect(x0, y0, x1, y1, 0.05f);
      } else {
        // light inset strokes, reads as regular weight
        img.fill_rect(x0 + 1, y0 + 2, x1 - 1, y1 - 2, 0.55f);
      }
    }
  }
}

}  // namespace tilt

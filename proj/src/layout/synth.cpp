#include "tilt/layout/synth.hpp"

#include <algorithm>
#include <cstring>
#include <set>

#include "tilt/check.hpp"
#include "tilt/layout/render.hpp"
#include "tilt/rng.hpp"

namespace tilt {

namespace {

struct Placed {
  std::string text;
  int row = 0, col = 0;
  bool bold = false;
};

class GridPlacer {
 public:
  GridPlacer(int rows, int cols) : rows_(rows), cols_(cols), used_(static_cast<size_t>(rows) * cols, false) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool free_span(int row, int col, int len) const {
    if (row < 0 || row >= rows_ || col < 0 || col + len > cols_) return false;
    // one guard cell each side so neighbours never touch
    for (int c = std::max(0, col - 1); c < std::min(cols_, col + len + 1); ++c) {
      if (used_[static_cast<size_t>(row) * cols_ + c]) return false;
    }
    return true;
  }

  void mark(int row, int col, int len) {
    for (int c = col; c < col + len; ++c) used_[static_cast<size_t>(row) * cols_ + c] = true;
  }

 private:
  int rows_, cols_;
  std::vector<bool> used_;
};

std::string random_word(Rng& rng, int len, bool upper, std::set<std::string>& taken) {
  static const char* kUpper = "ABCDEFGHJKLMNPQRSTUVWXYZ";
  static const char* kLower = "abcdefghjkmnpqrstuvwxyz0123456789";
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::string w;
    for (int i = 0; i < len; ++i) {
      const char* alpha = upper ? kUpper : kLower;
      w.push_back(alpha[rng.uniform_int(0, static_cast<int>(std::strlen(alpha)) - 1)]);
    }
    if (taken.insert(w).second) return w;
  }
  throw CheckError("random_word: alphabet exhausted");
}

}  // namespace

Document synth_form(uint64_t seed, const FormSpec& spec) {
  Rng rng(seed);
  const int cols = spec.page_w / spec.font_w;
  const int rows = spec.page_h / spec.font_h;
  TILT_CHECK(cols >= 4 && rows >= 3, "synth_form: page too small for font");
  GridPlacer grid(rows, cols);
  std::vector<Placed> placed;
  Document doc;
  doc.id = "synth" + std::to_string(seed);
  doc.page.width = spec.page_w;
  doc.page.height = spec.page_h;

  auto try_place = [&](const std::string& text, int row, int col, bool bold = false) {
    if (!grid.free_span(row, col, static_cast<int>(text.size()))) return false;
    grid.mark(row, col, static_cast<int>(text.size()));
    placed.push_back({text, row, col, bold});
    return true;
  };
  auto place_random = [&](const std::string& text, int max_row) {
    for (int attempt = 0; attempt < 400; ++attempt) {
      const int row = rng.uniform_int(0, max_row);
      const int col = rng.uniform_int(0, std::max(0, cols - static_cast<int>(text.size())));
      if (try_place(text, row, col)) return std::pair<int, int>{row, col};
    }
    throw CheckError("synth_form: overfull page placing '" + text + "'");
  };

  // key/value pairs
  for (const FormField& f : spec.fields) {
    const bool below = spec.below_only || rng.bernoulli(0.5);
    const int klen = static_cast<int>(f.key.size());
    const int vlen = static_cast<int>(f.value.size());
    bool ok = false;
    for (int attempt = 0; attempt < 400 && !ok; ++attempt) {
      if (below) {
        const int row = rng.uniform_int(0, rows - 2);
        const int col = rng.uniform_int(0, std::max(0, cols - std::max(klen, vlen)));
        if (grid.free_span(row, col, klen) && grid.free_span(row + 1, col, vlen)) {
          grid.mark(row, col, klen);
          grid.mark(row + 1, col, vlen);
          placed.push_back({f.key, row, col});
          placed.push_back({f.value, row + 1, col});
          ok = true;
        }
      } else {
        const int row = rng.uniform_int(0, rows - 1);
        const int col = rng.uniform_int(0, std::max(0, cols - (klen + 1 + vlen)));
        if (grid.free_span(row, col, klen) && grid.free_span(row, col + klen + 1, vlen)) {
          grid.mark(row, col, klen);
          grid.mark(row, col + klen + 1, vlen);
          placed.push_back({f.key, row, col});
          placed.push_back({f.value, row, col + klen + 1});
          ok = true;
        }
      }
    }
    TILT_CHECK(ok, "synth_form: overfull page placing field '" << f.key << "'");
    doc.annotations.push_back(TaskInstance{
        TaskKind::qa, below ? "what is below " + f.key + "?" : "what is right of " + f.key + "?",
        {f.value}});
  }

  // unlabeled distractor values
  std::set<std::string> taken;
  for (const FormField& f : spec.fields) {
    taken.insert(f.key);
    taken.insert(f.value);
  }
  for (int i = 0; i < spec.distractor_values; ++i) {
    place_random(random_word(rng, 4, false, taken), rows - 1);
  }

  // table block: headers with rows of cells directly beneath
  if (!spec.table_headers.empty()) {
    const int ncols = static_cast<int>(spec.table_headers.size());
    int width = 0;
    std::vector<int> col_w(static_cast<size_t>(ncols), 0);
    for (int c = 0; c < ncols; ++c) {
      col_w[c] = static_cast<int>(spec.table_headers[c].size());
      for (const auto& row : spec.table_rows)
        col_w[c] = std::max(col_w[c], static_cast<int>(row[c].size()));
      width += col_w[c] + 2;
    }
    const int nrows = 1 + static_cast<int>(spec.table_rows.size());
    bool ok = false;
    for (int attempt = 0; attempt < 400 && !ok; ++attempt) {
      const int r0 = rng.uniform_int(0, rows - nrows);
      const int c0 = rng.uniform_int(0, std::max(0, cols - width));
      bool fits = true;
      for (int r = 0; r < nrows && fits; ++r) {
        int c = c0;
        for (int j = 0; j < ncols && fits; ++j) {
          const std::string& cell = r == 0 ? spec.table_headers[j] : spec.table_rows[r - 1][j];
          fits = grid.free_span(r0 + r, c, static_cast<int>(cell.size()));
          c += col_w[j] + 2;
        }
      }
      if (!fits) continue;
      for (int r = 0; r < nrows; ++r) {
        int c = c0;
        for (int j = 0; j < ncols; ++j) {
          const std::string& cell = r == 0 ? spec.table_headers[j] : spec.table_rows[r - 1][j];
          grid.mark(r0 + r, c, static_cast<int>(cell.size()));
          placed.push_back({cell, r0 + r, c});
          c += col_w[j] + 2;
        }
      }
      ok = true;
    }
    TILT_CHECK(ok, "synth_form: overfull page placing table");
    if (!spec.table_rows.empty()) {
      for (int j = 0; j < ncols; ++j) {
        doc.annotations.push_back(TaskInstance{
            TaskKind::qa, "what is below " + spec.table_headers[j] + "?", {spec.table_rows[0][j]}});
      }
    }
  }

  // bold-word task: the cue is purely visual
  if (spec.style_candidates > 0) {
    const int bold_pick = rng.uniform_int(0, spec.style_candidates - 1);
    std::string bold_text;
    for (int i = 0; i < spec.style_candidates; ++i) {
      std::string w = random_word(rng, 5, false, taken);
      auto [row, col] = place_random(w, rows - 1);
      (void)row;
      (void)col;
      if (i == bold_pick) {
        placed.back().bold = true;
        bold_text = w;
      }
    }
    doc.annotations.push_back(TaskInstance{TaskKind::qa, "which word is bold?", {bold_text}});
  }

  // reading order: row-major over the grid
  std::sort(placed.begin(), placed.end(), [](const Placed& a, const Placed& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  int bold_index = -1;
  for (const Placed& p : placed) {
    Token t;
    t.text = p.text;
    t.bbox = BBox{static_cast<double>(p.col) * spec.font_w, static_cast<double>(p.row) * spec.font_h,
                  static_cast<double>(p.col + static_cast<int>(p.text.size())) * spec.font_w,
                  static_cast<double>(p.row + 1) * spec.font_h};
    if (p.bold) bold_index = static_cast<int>(doc.tokens.size());
    doc.tokens.push_back(std::move(t));
  }
  if (spec.with_image) rasterize_tokens(doc, bold_index);
  validate_document(doc);
  return doc;
}

SynthKind synth_kind_from_name(const std::string& name) {
  if (name == "kv") return SynthKind::kv;
  if (name == "kv-below") return SynthKind::kv_below;
  if (name == "table") return SynthKind::table;
  if (name == "fontstyle") return SynthKind::fontstyle;
  if (name == "mixed") return SynthKind::mixed;
  throw ValidationError("unknown synth kind '" + name + "'");
}

std::vector<Document> synth_corpus(uint64_t seed, int count, SynthKind kind, int page_w,
                                   int page_h, bool with_image) {
  Rng base(seed);
  std::vector<Document> docs;
  docs.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng = base.derive(static_cast<uint64_t>(i));
    FormSpec spec;
    spec.page_w = page_w;
    spec.page_h = page_h;
    spec.with_image = with_image;
    SynthKind k = kind;
    if (kind == SynthKind::mixed) {
      const int pick = rng.uniform_int(0, 2);
      k = pick == 0 ? SynthKind::kv : pick == 1 ? SynthKind::table : SynthKind::fontstyle;
    }
    std::set<std::string> taken;
    switch (k) {
      case SynthKind::kv:
      case SynthKind::kv_below: {
        spec.below_only = k == SynthKind::kv_below;
        const int nfields = rng.uniform_int(2, 4);
        for (int f = 0; f < nfields; ++f) {
          spec.fields.push_back(
              {random_word(rng, 4, true, taken), random_word(rng, 4, false, taken)});
        }
        spec.distractor_values = spec.below_only ? rng.uniform_int(2, 4) : 0;
        break;
      }
      case SynthKind::table: {
        const int ncols = rng.uniform_int(2, 3);
        const int nrows = rng.uniform_int(1, 2);
        for (int c = 0; c < ncols; ++c) spec.table_headers.push_back(random_word(rng, 4, true, taken));
        for (int r = 0; r < nrows; ++r) {
          std::vector<std::string> row;
          for (int c = 0; c < ncols; ++c) row.push_back(random_word(rng, 4, false, taken));
          spec.table_rows.push_back(std::move(row));
        }
        break;
      }
      case SynthKind::fontstyle:
        spec.style_candidates = 4;
        break;
      case SynthKind::mixed:
        break;
    }
    Document doc = synth_form(rng.bits(), spec);
    doc.id = "synth-" + std::to_string(seed) + "-" + std::to_string(i);
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace tilt

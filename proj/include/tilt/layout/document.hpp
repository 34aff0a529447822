#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tilt/layout/geometry.hpp"
#include "tilt/layout/image.hpp"

namespace tilt {

enum class TokenKind { word, image_anchor };

struct Token {
  std::string text;  // empty iff image_anchor
  BBox bbox;
  TokenKind kind = TokenKind::word;
  bool operator==(const Token&) const = default;
};

struct Page {
  int width = 0, height = 0;
  std::optional<ImageGray> image;
  bool operator==(const Page&) const = default;
};

enum class TaskKind { qa, kie, classify };

struct TaskInstance {
  TaskKind task = TaskKind::qa;
  std::string prompt;                // question / property name / classify prompt
  std::vector<std::string> answers;  // may be empty for KIE (mapped to "None")
  bool operator==(const TaskInstance&) const = default;
};

struct Document {
  std::string id;
  Page page;
  std::vector<Token> tokens;  // OCR reading order
  std::vector<TaskInstance> annotations;
  bool operator==(const Document&) const = default;

  // Space-joined word texts in reading order (anchors contribute nothing).
  std::string text() const;
};

// Validates invariants in place: positive page, bboxes clamped to the page,
// word/anchor text rules. Throws ValidationError naming the offender.
void validate_document(Document& doc);

// Resizes the page raster to (w, h) and rescales all bboxes proportionally.
Document canonicalize(const Document& doc, int w, int h);

// `count` anchor tokens tiling the page exactly; grid chosen to match the
// page aspect among factorizations of count.
std::vector<Token> image_anchor_tokens(const Page& page, int count = 16);

// Token bbox centers snapped to an integer grid; clamped, scale-invariant.
std::vector<GridCell> quantize_centers(std::span<const BBox> boxes, double page_w, double page_h,
                                       int grid_w = 64, int grid_h = 48);
std::vector<GridCell> quantize_centers(const Document& doc, int grid_w = 64, int grid_h = 48);

}  // namespace tilt

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tilt/layout/document.hpp"

namespace tilt {

struct FormField {
  std::string key, value;
};

// Recipe for one synthetic page. Keys/values land at random free grid slots;
// every question's answer is fixed by geometry (below / right-of), not by
// reading order.
struct FormSpec {
  int page_w = 256, page_h = 192;
  int font_w = 8, font_h = 16;
  std::vector<FormField> fields;
  bool below_only = false;      // force vertical key/value placement
  int distractor_values = 0;    // unlabeled value-like tokens
  std::vector<std::string> table_headers;
  std::vector<std::vector<std::string>> table_rows;
  int style_candidates = 0;     // >0: add a "which word is bold?" instance
  bool with_image = true;
};

// Deterministic in (seed, spec). Throws CheckError when the page is overfull.
Document synth_form(uint64_t seed, const FormSpec& spec);

enum class SynthKind { kv, kv_below, table, fontstyle, mixed };
SynthKind synth_kind_from_name(const std::string& name);

// Corpus of `count` documents with per-document derived seeds.
std::vector<Document> synth_corpus(uint64_t seed, int count, SynthKind kind, int page_w = 256,
                                   int page_h = 192, bool with_image = true);

}  // namespace tilt

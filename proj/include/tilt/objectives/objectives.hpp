#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tilt/layout/document.hpp"
#include "tilt/rng.hpp"

namespace tilt {

// One source-side entry before byte expansion: a document word, a sentinel
// standing in for a masked span, an image-anchor slot, or a prompt word
// (prompt words sit on a reserved row above the page; quantization clamps
// their centers to grid row 0).
struct SrcWord {
  std::string text;
  int sentinel = -1;  // >= 0: masked-span placeholder
  bool anchor = false;
  BBox bbox;
  bool operator==(const SrcWord&) const = default;
};

struct Seq2SeqExample {
  std::string doc_id;
  std::vector<SrcWord> src_words;
  std::vector<int> target_ids;  // byte/sentinel ids, no bos/eos
  int page_w = 0, page_h = 0;
  std::optional<ImageGray> image;
};

// Disjoint, sorted token-index spans chosen for masking.
struct Span {
  int start = 0, len = 0;
  bool operator==(const Span&) const = default;
};

// Surface heuristic for entity-like runs: ALL-CAPS words, digit-bearing
// tokens, and capitalized words that are not sentence-initial; maximal runs
// of adjacent hits form candidate spans.
std::vector<Span> salient_candidate_spans(const Document& doc);

// Candidates trimmed/shuffled to a ~15% token budget; if they fall short the
// remainder is drawn uniformly at random (mean span length 3).
std::vector<Span> salient_spans(const Document& doc, Rng& rng);

// T5-style corruption: each span collapses to one sentinel in the source
// (bbox = union of the span), target = sentinel_i + span text, closed by a
// final sentinel. Masked token regions are blanked in the raster with
// probability image_mask_p each.
Seq2SeqExample span_corrupt(const Document& doc, const std::vector<Span>& spans, Rng& rng,
                            double image_mask_p = 0.8);

enum class CaseMode { identity, lower, upper };

// Case-transforms source texts and target bytes together. Layout, image and
// token counts are untouched.
Seq2SeqExample case_augment(const Seq2SeqExample& ex, CaseMode mode);

// Supervised task formatting: prompt words first (reserved row), then a
// separator, then the document. KIE with no value yields target "None";
// textless pages gain image anchor tokens.
Seq2SeqExample to_seq2seq(const Document& doc, const TaskInstance& task);

// Reconstruction oracle for corruption round-trips: source sentinels
// interleaved with target spans. Returns the recovered document text.
std::string reconstruct_text(const Seq2SeqExample& ex);

}  // namespace tilt

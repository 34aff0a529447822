#include "tilt/objectives/objectives.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <utility>

#include "tilt/check.hpp"
#include "tilt/model/vocab.hpp"
#include "tilt/vision/augment.hpp"

namespace tilt {

namespace {

bool has_digit(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool all_caps(const std::string& s) {
  int letters = 0;
  for (unsigned char c : s) {
    if (std::islower(c)) return false;
    if (std::isupper(c)) ++letters;
  }
  return letters >= 2;
}

bool capitalized(const std::string& s) {
  for (unsigned char c : s) {
    if (std::isalpha(c)) return std::isupper(c);
  }
  return false;
}

bool ends_sentence(const std::string& s) {
  return !s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?');
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}
std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) words.push_back(std::exchange(cur, {}));
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

}  // namespace

std::vector<Span> salient_candidate_spans(const Document& doc) {
  const auto& toks = doc.tokens;
  std::vector<bool> salient(toks.size(), false);
  bool sentence_start = true;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].kind != TokenKind::word) {
      sentence_start = false;
      continue;
    }
    const std::string& w = toks[i].text;
    // sentence-initial capitalization alone is not an entity signal
    salient[i] = has_digit(w) || all_caps(w) || (capitalized(w) && !sentence_start);
    sentence_start = ends_sentence(w);
  }
  std::vector<Span> spans;
  for (size_t i = 0; i < toks.size();) {
    if (!salient[i]) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < toks.size() && salient[j]) ++j;
    spans.push_back({static_cast<int>(i), static_cast<int>(j - i)});
    i = j;
  }
  return spans;
}

std::vector<Span> salient_spans(const Document& doc, Rng& rng) {
  const int n = static_cast<int>(doc.tokens.size());
  if (n == 0) return {};
  const int budget = std::min(std::max(1, static_cast<int>(std::lround(0.15 * n))), n / 2);
  if (budget == 0) return {};

  std::vector<Span> candidates = salient_candidate_spans(doc);
  rng.shuffle(candidates);
  std::vector<bool> used(static_cast<size_t>(n), false);
  std::vector<Span> picked;
  int taken = 0;
  const int max_spans = vocab::kNumSentinels - 1;  // final sentinel needs an id too
  auto take = [&](Span s) {
    for (int k = s.start; k < s.start + s.len; ++k) used[static_cast<size_t>(k)] = true;
    picked.push_back(s);
    taken += s.len;
  };
  for (const Span& s : candidates) {
    if (taken >= budget || static_cast<int>(picked.size()) >= max_spans) break;
    Span trimmed = s;
    trimmed.len = std::min(trimmed.len, budget - taken);
    take(trimmed);
  }
  // fallback: random spans fill out the budget
  for (int attempt = 0; attempt < 200 && taken < budget &&
                        static_cast<int>(picked.size()) < max_spans;
       ++attempt) {
    const int len = std::min(rng.uniform_int(1, 5), budget - taken);
    const int start = rng.uniform_int(0, n - len);
    bool free = true;
    for (int k = start; k < start + len && free; ++k) free = !used[static_cast<size_t>(k)];
    if (free) take({start, len});
  }
  std::sort(picked.begin(), picked.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  return picked;
}

Seq2SeqExample span_corrupt(const Document& doc, const std::vector<Span>& spans, Rng& rng,
                            double image_mask_p) {
  const int n = static_cast<int>(doc.tokens.size());
  int prev_end = 0;
  for (const Span& s : spans) {
    TILT_CHECK(s.start >= prev_end && s.len > 0 && s.start + s.len <= n,
               "span_corrupt: spans must be sorted, disjoint and in range");
    prev_end = s.start + s.len;
  }
  TILT_CHECK(static_cast<int>(spans.size()) < vocab::kNumSentinels,
             "span_corrupt: too many spans for the sentinel inventory");

  Seq2SeqExample ex;
  ex.doc_id = doc.id;
  ex.page_w = doc.page.width;
  ex.page_h = doc.page.height;
  ex.image = doc.page.image;

  std::vector<BBox> masked_regions;
  size_t span_idx = 0;
  for (int i = 0; i < n;) {
    if (span_idx < spans.size() && spans[span_idx].start == i) {
      const Span s = spans[span_idx];
      BBox merged = doc.tokens[static_cast<size_t>(i)].bbox;
      std::string text;
      for (int k = i; k < i + s.len; ++k) {
        merged = BBox::merge(merged, doc.tokens[static_cast<size_t>(k)].bbox);
        if (!text.empty()) text.push_back(' ');
        text += doc.tokens[static_cast<size_t>(k)].text;
        masked_regions.push_back(doc.tokens[static_cast<size_t>(k)].bbox);
      }
      SrcWord w;
      w.sentinel = static_cast<int>(span_idx);
      w.bbox = merged;
      ex.src_words.push_back(std::move(w));
      ex.target_ids.push_back(vocab::sentinel(static_cast<int>(span_idx)));
      for (int b : vocab::encode_text(text)) ex.target_ids.push_back(b);
      i += s.len;
      ++span_idx;
    } else {
      const Token& tok = doc.tokens[static_cast<size_t>(i)];
      SrcWord w;
      w.text = tok.text;
      w.anchor = tok.kind == TokenKind::image_anchor;
      w.bbox = tok.bbox;
      ex.src_words.push_back(std::move(w));
      ++i;
    }
  }
  ex.target_ids.push_back(vocab::sentinel(static_cast<int>(spans.size())));
  if (ex.image && !masked_regions.empty()) {
    mask_image_regions(*ex.image, masked_regions, image_mask_p, rng);
  }
  return ex;
}

Seq2SeqExample case_augment(const Seq2SeqExample& ex, CaseMode mode) {
  if (mode == CaseMode::identity) return ex;
  Seq2SeqExample out = ex;
  for (SrcWord& w : out.src_words) {
    w.text = mode == CaseMode::lower ? lower(w.text) : upper(w.text);
  }
  for (int& id : out.target_ids) {
    if (!vocab::is_byte(id)) continue;
    id = mode == CaseMode::lower ? std::tolower(id) : std::toupper(id);
  }
  return out;
}

Seq2SeqExample to_seq2seq(const Document& doc, const TaskInstance& task) {
  TILT_CHECK(!task.prompt.empty(), "to_seq2seq: missing prompt");
  Seq2SeqExample ex;
  ex.doc_id = doc.id;
  ex.page_w = doc.page.width;
  ex.page_h = doc.page.height;
  ex.image = doc.page.image;

  // prompt words on a reserved row above the page, proportional slots
  const std::vector<std::string> prompt_words = split_words(task.prompt);
  const int slots = static_cast<int>(prompt_words.size()) + 1;  // + separator
  const double slot_w = static_cast<double>(doc.page.width) / slots;
  const double row_h = std::max(1.0, doc.page.height / 64.0);
  for (size_t i = 0; i < prompt_words.size(); ++i) {
    SrcWord w;
    w.text = prompt_words[i];
    w.bbox = BBox{slot_w * static_cast<double>(i), -row_h, slot_w * static_cast<double>(i + 1), 0};
    ex.src_words.push_back(std::move(w));
  }
  SrcWord sep;
  sep.text = "\n";
  sep.bbox = BBox{slot_w * static_cast<double>(prompt_words.size()), -row_h,
                  static_cast<double>(doc.page.width), 0};
  ex.src_words.push_back(std::move(sep));

  bool has_words = false;
  for (const Token& tok : doc.tokens) {
    SrcWord w;
    w.text = tok.text;
    w.anchor = tok.kind == TokenKind::image_anchor;
    w.bbox = tok.bbox;
    has_words = has_words || !w.anchor;
    ex.src_words.push_back(std::move(w));
  }
  if (!has_words) {
    for (const Token& anchor : image_anchor_tokens(doc.page)) {
      SrcWord w;
      w.anchor = true;
      w.bbox = anchor.bbox;
      ex.src_words.push_back(std::move(w));
    }
  }

  std::string target;
  if (!task.answers.empty()) {
    target = task.answers.front();
  } else {
    TILT_CHECK(task.task == TaskKind::kie, "to_seq2seq: empty answers for a non-KIE instance");
    target = "None";  // missing entity
  }
  ex.target_ids = vocab::encode_text(target);
  return ex;
}

std::string reconstruct_text(const Seq2SeqExample& ex) {
  // split target at sentinel markers
  std::vector<std::string> span_text(vocab::kNumSentinels);
  int cur = -1;
  for (int id : ex.target_ids) {
    if (vocab::is_sentinel(id)) {
      cur = id - vocab::kSentinel0;
    } else if (cur >= 0 && vocab::is_byte(id)) {
      span_text[static_cast<size_t>(cur)].push_back(static_cast<char>(id));
    }
  }
  std::string out;
  auto append = [&](const std::string& s) {
    if (s.empty()) return;
    if (!out.empty()) out.push_back(' ');
    out += s;
  };
  for (const SrcWord& w : ex.src_words) {
    if (w.anchor) continue;
    if (w.sentinel >= 0) {
      append(span_text[static_cast<size_t>(w.sentinel)]);
    } else {
      append(w.text);
    }
  }
  return out;
}

}  // namespace tilt

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tilt {

// Unit-cost edit distance (insert / delete / substitute).
int levenshtein(std::string_view a, std::string_view b);

// Trim, collapse internal whitespace, lowercase. Applied before every metric.
std::string normalize_answer(std::string_view s);

// Per-question score: max over golds of 1 - NL, zeroed where NL > tau,
// NL = levenshtein / max(len). Strings are normalized first.
double anls_score(const std::string& pred, const std::vector<std::string>& golds,
                  double tau = 0.5);

struct F1Counts {
  int tp = 0, fp = 0, fn = 0;
  double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn); }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r == 0 ? 0.0 : 2 * p * r / (p + r);
  }
  F1Counts& operator+=(const F1Counts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
};

// Exact-match credit per (field, value) pair; a "None"/empty prediction is an
// abstention, never a spurious answer.
F1Counts entity_f1(const std::map<std::string, std::optional<std::string>>& preds,
                   const std::map<std::string, std::string>& golds);

// Mean normalized-string equality over aligned lists.
double exact_match_accuracy(const std::vector<std::string>& preds,
                            const std::vector<std::string>& golds);

struct EvalRecord {
  std::string id, prompt, prediction;
  std::vector<std::string> golds;
  double score = 0;
  int tp = 0, fp = 0, fn = 0;  // populated by the f1 metric only
};

struct EvalReport {
  std::string metric;
  double value = 0;
  std::vector<EvalRecord> records;

  std::string to_json_string() const;
};

}  // namespace tilt

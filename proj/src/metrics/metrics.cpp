#include "tilt/metrics/metrics.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "tilt/check.hpp"

namespace tilt {

int levenshtein(std::string_view a, std::string_view b) {
  const size_t n = a.size(), m = b.size();
  if (n == 0) return static_cast<int>(m);
  if (m == 0) return static_cast<int>(n);
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      const int subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::string normalize_answer(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

double anls_score(const std::string& pred, const std::vector<std::string>& golds, double tau) {
  TILT_CHECK(!golds.empty(), "anls: empty gold list");
  const std::string p = normalize_answer(pred);
  double best = 0.0;
  for (const std::string& gold : golds) {
    const std::string g = normalize_answer(gold);
    const size_t denom = std::max(p.size(), g.size());
    const double nl = denom == 0 ? 0.0 : static_cast<double>(levenshtein(p, g)) / denom;
    if (nl <= tau) best = std::max(best, 1.0 - nl);
  }
  return best;
}

F1Counts entity_f1(const std::map<std::string, std::optional<std::string>>& preds,
                   const std::map<std::string, std::string>& golds) {
  F1Counts c;
  auto abstains = [](const std::optional<std::string>& v) {
    return !v.has_value() || normalize_answer(*v).empty() || normalize_answer(*v) == "none";
  };
  for (const auto& [field, pred] : preds) {
    if (abstains(pred)) continue;
    const auto it = golds.find(field);
    if (it != golds.end() && normalize_answer(*pred) == normalize_answer(it->second)) {
      c.tp += 1;
    } else {
      c.fp += 1;
    }
  }
  for (const auto& [field, gold] : golds) {
    const auto it = preds.find(field);
    const bool hit = it != preds.end() && !abstains(it->second) &&
                     normalize_answer(*it->second) == normalize_answer(gold);
    if (!hit) c.fn += 1;
  }
  return c;
}

double exact_match_accuracy(const std::vector<std::string>& preds,
                            const std::vector<std::string>& golds) {
  TILT_CHECK(preds.size() == golds.size(),
             "exact_match_accuracy: " << preds.size() << " preds vs " << golds.size() << " golds");
  if (preds.empty()) return 0.0;
  int hits = 0;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (normalize_answer(preds[i]) == normalize_answer(golds[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

std::string EvalReport::to_json_string() const {
  nlohmann::json j;
  j["metric"] = metric;
  j["value"] = value;
  j["records"] = nlohmann::json::array();
  for (const EvalRecord& r : records) {
    nlohmann::json rj = {{"id", r.id},
                         {"prompt", r.prompt},
                         {"prediction", r.prediction},
                         {"golds", r.golds},
                         {"score", r.score}};
    if (metric == "f1") {
      rj["tp"] = r.tp;
      rj["fp"] = r.fp;
      rj["fn"] = r.fn;
    }
    j["records"].push_back(std::move(rj));
  }
  return j.dump();
}

}  // namespace tilt

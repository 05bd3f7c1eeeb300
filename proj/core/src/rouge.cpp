#include "subsum/rouge.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <vector>

namespace subsum::rouge {

namespace {

// n-grams keyed as folded tokens joined with an unprintable separator
std::unordered_map<std::string, long> ngram_counts(std::span<const std::string> tokens,
                                                   std::size_t n) {
  std::unordered_map<std::string, long> counts;
  if (n == 0 || tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (std::size_t j = 0; j < n; ++j) {
      if (j > 0) key += '\x1f';
      key += fold_token(tokens[i + j]);
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

double f_measure(double precision, double recall) {
  double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

std::string fold_token(std::string_view token) {
  std::string out(token);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

RougeScore rouge_n(std::span<const std::string> candidate,
                   std::span<const std::string> reference, std::size_t n) {
  auto cand_counts = ngram_counts(candidate, n);
  auto ref_counts = ngram_counts(reference, n);

  long cand_total = 0;
  for (const auto& [key, count] : cand_counts) cand_total += count;
  long ref_total = 0;
  for (const auto& [key, count] : ref_counts) ref_total += count;

  long matches = 0;
  for (const auto& [key, count] : cand_counts) {
    auto it = ref_counts.find(key);
    if (it != ref_counts.end()) matches += std::min(count, it->second);
  }

  RougeScore score;
  score.precision = cand_total > 0 ? static_cast<double>(matches) / cand_total : 0.0;
  score.recall = ref_total > 0 ? static_cast<double>(matches) / ref_total : 0.0;
  score.f1 = f_measure(score.precision, score.recall);
  return score;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;

  std::vector<std::string> fa(a.size()), fb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = fold_token(a[i]);
  for (std::size_t j = 0; j < b.size(); ++j) fb[j] = fold_token(b[j]);

  // two-row DP
  std::vector<std::size_t> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (fa[i - 1] == fb[j - 1])
        curr[j] = prev[j - 1] + 1;
      else
        curr[j] = std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::span<const std::string> candidate,
                   std::span<const std::string> reference) {
  std::size_t lcs = lcs_length(candidate, reference);
  RougeScore score;
  score.precision = candidate.empty() ? 0.0 : static_cast<double>(lcs) / candidate.size();
  score.recall = reference.empty() ? 0.0 : static_cast<double>(lcs) / reference.size();
  score.f1 = f_measure(score.precision, score.recall);
  return score;
}

RougeScore score(Metric metric, std::span<const std::string> candidate,
                 std::span<const std::string> reference) {
  switch (metric) {
    case Metric::Rouge1: return rouge_n(candidate, reference, 1);
    case Metric::Rouge2: return rouge_n(candidate, reference, 2);
    case Metric::RougeL: return rouge_l(candidate, reference);
  }
  return {};
}

std::optional<Metric> metric_from_name(std::string_view name) {
  std::string folded = fold_token(name);
  if (folded == "rouge1-f1" || folded == "rouge-1" || folded == "rouge1") return Metric::Rouge1;
  if (folded == "rouge2-f1" || folded == "rouge-2" || folded == "rouge2") return Metric::Rouge2;
  if (folded == "rougel-f1" || folded == "rouge-l" || folded == "rougel") return Metric::RougeL;
  return std::nullopt;
}

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::Rouge1: return "rouge1-f1";
    case Metric::Rouge2: return "rouge2-f1";
    case Metric::RougeL: return "rougel-f1";
  }
  return "unknown";
}

}  // namespace subsum::rouge

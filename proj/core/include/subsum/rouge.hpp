#ifndef SUBSUM_ROUGE_HPP
#define SUBSUM_ROUGE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace subsum::rouge {

/// Precision/recall/F1 triple for one metric variant, each in [0,1].
struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

enum class Metric { Rouge1, Rouge2, RougeL };

/// β=1 F-measure; 0 when both sides are 0.
double f_measure(double precision, double recall);

/// Tokens are case-folded (ASCII) before any matching. No stemming, no
/// stopword removal, so scores are comparable only within this toolkit.
std::string fold_token(std::string_view token);

/// ROUGE-N with clipped multiset n-gram matching. Empty n-gram sets yield 0
/// for the corresponding ratio.
RougeScore rouge_n(std::span<const std::string> candidate,
                   std::span<const std::string> reference, std::size_t n);

/// Longest common subsequence length (dynamic programming, case-folded).
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// ROUGE-L: P = LCS/|candidate|, R = LCS/|reference|.
RougeScore rouge_l(std::span<const std::string> candidate,
                   std::span<const std::string> reference);

RougeScore score(Metric metric, std::span<const std::string> candidate,
                 std::span<const std::string> reference);

/// "rouge1-f1", "rouge2-f1", "rougel-f1" (case-insensitive); nullopt otherwise.
std::optional<Metric> metric_from_name(std::string_view name);
std::string_view metric_name(Metric metric);

}  // namespace subsum::rouge

#endif

#include "subsum/oracle.hpp"

#include <algorithm>
#include <bit>

namespace subsum::oracle {

namespace {

// selected units concatenated in document order, never selection order
std::vector<std::string> concat_selected(const std::vector<std::vector<std::string>>& units,
                                         const std::vector<std::uint8_t>& selected) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < units.size(); ++i)
    if (selected[i]) out.insert(out.end(), units[i].begin(), units[i].end());
  return out;
}

}  // namespace

OracleResult greedy_oracle(const std::vector<std::vector<std::string>>& units,
                           const std::vector<std::string>& reference,
                           const OracleOptions& options) {
  OracleResult result;
  result.labels.assign(units.size(), 0);

  double current = 0.0;
  std::size_t chosen = 0;
  const std::size_t cap = options.max_units.value_or(units.size());

  while (chosen < units.size() && chosen < cap) {
    double best = current;
    std::size_t best_index = units.size();
    for (std::size_t i = 0; i < units.size(); ++i) {
      if (result.labels[i]) continue;
      result.labels[i] = 1;
      double f1 = rouge::score(options.metric, concat_selected(units, result.labels), reference).f1;
      result.labels[i] = 0;
      if (f1 > best) {  // strict improvement; scan order breaks ties to the smallest index
        best = f1;
        best_index = i;
      }
    }
    if (best_index == units.size()) break;
    result.labels[best_index] = 1;
    result.order.push_back(best_index);
    result.trajectory.push_back(best);
    current = best;
    ++chosen;
  }

  result.final_score = rouge::score(options.metric, concat_selected(units, result.labels), reference);
  return result;
}

OracleResult exhaustive_oracle(const std::vector<std::vector<std::string>>& units,
                               const std::vector<std::string>& reference,
                               rouge::Metric metric) {
  if (units.size() > 20) throw ExhaustiveCapError(units.size());

  const std::size_t n = units.size();
  std::uint32_t best_mask = 0;
  double best_score = 0.0;

  auto indices_of = [n](std::uint32_t mask) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) out.push_back(i);
    return out;
  };

  std::vector<std::uint8_t> selected(n, 0);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) selected[i] = (mask & (1u << i)) ? 1 : 0;
    double f1 = rouge::score(metric, concat_selected(units, selected), reference).f1;

    bool better = f1 > best_score;
    if (!better && f1 == best_score && best_mask != 0) {
      int bits = std::popcount(mask), best_bits = std::popcount(best_mask);
      better = bits < best_bits ||
               (bits == best_bits && indices_of(mask) < indices_of(best_mask));
    }
    if (better && f1 > 0.0) {
      best_mask = mask;
      best_score = f1;
    }
  }

  OracleResult result;
  result.labels.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    if (best_mask & (1u << i)) {
      result.labels[i] = 1;
      result.order.push_back(i);
    }
  if (best_mask != 0) result.trajectory.push_back(best_score);
  result.final_score = rouge::score(metric, concat_selected(units, result.labels), reference);
  return result;
}

}  // namespace subsum::oracle

#include "subsum/selection.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "subsum/rouge.hpp"

namespace subsum::selection {
namespace {

std::vector<scorers::ScoredUnit> by_descending_score(std::vector<scorers::ScoredUnit> scored,
                                                     std::size_t unit_count) {
  for (const auto& s : scored)
    if (s.unit_index >= unit_count) throw std::out_of_range("scored unit index out of range");
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.unit_index < b.unit_index;
  });
  return scored;
}

std::vector<std::string> unit_trigrams(const std::vector<std::string>& tokens) {
  std::vector<std::string> grams;
  if (tokens.size() < 3) return grams;
  for (std::size_t i = 0; i + 3 <= tokens.size(); ++i)
    grams.push_back(rouge::fold_token(tokens[i]) + '\x1f' + rouge::fold_token(tokens[i + 1]) +
                    '\x1f' + rouge::fold_token(tokens[i + 2]));
  return grams;
}

Summary finish(const std::vector<Chunk>& units, std::vector<std::size_t> picked) {
  std::sort(picked.begin(), picked.end(), [&units](std::size_t a, std::size_t b) {
    const Chunk& ca = units[a];
    const Chunk& cb = units[b];
    if (ca.sentence_index != cb.sentence_index) return ca.sentence_index < cb.sentence_index;
    return ca.span.begin < cb.span.begin;
  });
  Summary summary;
  summary.indices = std::move(picked);
  for (std::size_t i : summary.indices) {
    summary.units.push_back(units[i]);
    summary.word_count += units[i].tokens.size();
  }
  summary.text = summary_text(summary.units);
  return summary;
}

// Shared greedy scan: take candidates in score order while keep_adding() says
// so, skipping trigram-blocked ones when asked.
template <class KeepAdding, class OnPick>
std::vector<std::size_t> scan(const std::vector<Chunk>& units,
                              const std::vector<scorers::ScoredUnit>& ordered, bool trigram_block,
                              KeepAdding keep_adding, OnPick on_pick) {
  std::vector<std::size_t> picked;
  std::unordered_set<std::size_t> seen;
  std::unordered_set<std::string> grams;
  for (const auto& candidate : ordered) {
    if (!keep_adding()) break;
    if (!seen.insert(candidate.unit_index).second) continue;
    const auto& tokens = units[candidate.unit_index].tokens;
    if (trigram_block) {
      const auto candidate_grams = unit_trigrams(tokens);
      const bool blocked = std::any_of(candidate_grams.begin(), candidate_grams.end(),
                                       [&grams](const auto& g) { return grams.contains(g); });
      if (blocked) continue;
      grams.insert(candidate_grams.begin(), candidate_grams.end());
    }
    picked.push_back(candidate.unit_index);
    on_pick(tokens.size());
  }
  return picked;
}

}  // namespace

Summary select_by_word_limit(const std::vector<Chunk>& units,
                             const std::vector<scorers::ScoredUnit>& scored,
                             std::size_t word_limit, bool trigram_block) {
  if (word_limit == 0) throw std::invalid_argument("word limit must be positive");
  const auto ordered = by_descending_score(scored, units.size());
  std::size_t words = 0;
  auto picked = scan(
      units, ordered, trigram_block, [&words, word_limit]() { return words < word_limit; },
      [&words](std::size_t len) { words += len; });
  return finish(units, std::move(picked));
}

Summary select_top_k(const std::vector<Chunk>& units,
                     const std::vector<scorers::ScoredUnit>& scored, std::size_t k,
                     bool trigram_block) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  const auto ordered = by_descending_score(scored, units.size());
  std::size_t taken = 0;
  auto picked = scan(
      units, ordered, trigram_block, [&taken, k]() { return taken < k; },
      [&taken](std::size_t) { ++taken; });
  return finish(units, std::move(picked));
}

std::string summary_text(const std::vector<Chunk>& units) {
  std::string text;
  for (std::size_t u = 0; u < units.size(); ++u) {
    if (u > 0) text += units[u - 1].origin == ChunkOrigin::WholeSentence ? " . " : " ; ";
    for (std::size_t t = 0; t < units[u].tokens.size(); ++t) {
      if (t > 0) text += ' ';
      text += units[u].tokens[t];
    }
  }
  return text;
}

std::vector<std::string> summary_tokens(const std::vector<Chunk>& units) {
  std::vector<std::string> tokens;
  for (const auto& unit : units) tokens.insert(tokens.end(), unit.tokens.begin(), unit.tokens.end());
  return tokens;
}

}  // namespace subsum::selection

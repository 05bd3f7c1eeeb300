#ifndef SUBSUM_SELECTION_HPP
#define SUBSUM_SELECTION_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "subsum/chunking.hpp"
#include "subsum/scorers.hpp"

namespace subsum::selection {

struct Summary {
  std::vector<std::size_t> indices;  // positions in the scored unit list
  std::vector<Chunk> units;          // the same units, document order
  std::size_t word_count = 0;
  std::string text;
};

/// Take units in descending score (ties go to the earlier document position)
/// while the running word count is below the limit; the unit that crosses the
/// limit is still included. Output is in document order. With trigram_block a
/// candidate sharing a (case-folded) trigram with the partial summary is
/// skipped instead of selected.
Summary select_by_word_limit(const std::vector<Chunk>& units,
                             const std::vector<scorers::ScoredUnit>& scored,
                             std::size_t word_limit = 60, bool trigram_block = false);

/// Top k units by score (ties by document position), output in document order.
Summary select_top_k(const std::vector<Chunk>& units,
                     const std::vector<scorers::ScoredUnit>& scored, std::size_t k = 3,
                     bool trigram_block = false);

/// Tokens joined with spaces; " . " after whole-sentence units, " ; " after
/// sub-sentential ones.
std::string summary_text(const std::vector<Chunk>& units);

/// All selected tokens in document order, for scoring the summary.
std::vector<std::string> summary_tokens(const std::vector<Chunk>& units);

}  // namespace subsum::selection

#endif

#ifndef SUBSUM_CHUNKING_HPP
#define SUBSUM_CHUNKING_HPP

#include <cstddef>
#include <string>
#include <unordered_set>
#include <vector>

#include "subsum/ptb.hpp"

namespace subsum {

/// Half-open token interval.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - begin; }
  bool contains(const Span& other) const { return begin <= other.begin && other.end <= end; }
  bool operator==(const Span&) const = default;
};

enum class ChunkOrigin { ClauseUnit, Residual, WholeSentence };

std::string_view origin_name(ChunkOrigin origin);

/// A contiguous token span within a single sentence; the atomic extraction
/// unit. Chunks of one sentence always partition [0, sentence length).
struct Chunk {
  std::size_t sentence_index = 0;
  Span span;
  std::vector<std::string> tokens;
  ChunkOrigin origin = ChunkOrigin::WholeSentence;

  bool operator==(const Chunk&) const = default;
};

using TagSet = std::unordered_set<std::string>;

/// The PTB clause tags: S, SBAR, SBARQ, SINV, SQ.
const TagSet& default_clause_tags();

/// All non-root nodes whose base label is a clause tag, in document order.
std::vector<const ptb::ParseTree*> clause_candidates(const ptb::ParseTree& root,
                                                     const TagSet& clause_tags);

/// Resolve every candidate clause to its highest non-root clause ancestor
/// (itself when no such ancestor exists). The result is a deduplicated list
/// of mutually non-nested spans in document order.
std::vector<Span> select_units(const ptb::ParseTree& root, const TagSet& clause_tags);

struct ChunkOptions {
  TagSet clause_tags = default_clause_tags();
  // when > 0, residual runs shorter than this merge into the following chunk
  std::size_t merge_residual_below = 0;
};

/// Split a sentence at the selected clause boundaries. Falls back to a single
/// whole-sentence chunk when the tree is absent or yields no units. Runs
/// inside a selected unit become clause-unit chunks, runs outside residuals.
std::vector<Chunk> chunk_sentence(std::size_t sentence_index,
                                  const std::vector<std::string>& tokens,
                                  const ptb::ParseTree* tree,
                                  const ChunkOptions& options = {});

}  // namespace subsum

#endif

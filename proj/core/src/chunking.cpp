#include "subsum/chunking.hpp"

#include <algorithm>
#include <stdexcept>

namespace subsum {

namespace {

bool is_clause(const ptb::ParseTree& node, const TagSet& clause_tags) {
  return !node.is_leaf() && clause_tags.count(std::string(ptb::base_label(node.label))) > 0;
}

void walk(const ptb::ParseTree& node, const TagSet& clause_tags,
          std::vector<const ptb::ParseTree*>& out) {
  for (const auto& child : node.children) {
    if (is_clause(child, clause_tags)) out.push_back(&child);
    walk(child, clause_tags, out);
  }
}

}  // namespace

std::string_view origin_name(ChunkOrigin origin) {
  switch (origin) {
    case ChunkOrigin::ClauseUnit: return "clause-unit";
    case ChunkOrigin::Residual: return "residual";
    case ChunkOrigin::WholeSentence: return "whole-sentence";
  }
  return "unknown";
}

const TagSet& default_clause_tags() {
  static const TagSet tags = {"S", "SBAR", "SBARQ", "SINV", "SQ"};
  return tags;
}

std::vector<const ptb::ParseTree*> clause_candidates(const ptb::ParseTree& root,
                                                     const TagSet& clause_tags) {
  std::vector<const ptb::ParseTree*> out;
  walk(root, clause_tags, out);
  return out;
}

std::vector<Span> select_units(const ptb::ParseTree& root, const TagSet& clause_tags) {
  // pre-order walk tracking the ancestor chain below the root; a candidate
  // maps to the first clause node on that chain (the highest one), or itself
  std::vector<Span> units;
  std::vector<const ptb::ParseTree*> chain;

  auto visit = [&](auto&& self, const ptb::ParseTree& node) -> void {
    for (const auto& child : node.children) {
      if (is_clause(child, clause_tags)) {
        const ptb::ParseTree* unit = &child;
        for (const ptb::ParseTree* ancestor : chain) {
          if (is_clause(*ancestor, clause_tags)) {
            unit = ancestor;
            break;
          }
        }
        Span span{unit->span_begin, unit->span_end};
        if (std::find(units.begin(), units.end(), span) == units.end()) units.push_back(span);
      }
      chain.push_back(&child);
      self(self, child);
      chain.pop_back();
    }
  };
  visit(visit, root);

  std::sort(units.begin(), units.end(),
            [](const Span& a, const Span& b) { return a.begin < b.begin; });
  return units;
}

std::vector<Chunk> chunk_sentence(std::size_t sentence_index,
                                  const std::vector<std::string>& tokens,
                                  const ptb::ParseTree* tree,
                                  const ChunkOptions& options) {
  if (tokens.empty()) throw std::invalid_argument("chunk_sentence: empty sentence");

  auto make_chunk = [&](std::size_t begin, std::size_t end, ChunkOrigin origin) {
    Chunk chunk;
    chunk.sentence_index = sentence_index;
    chunk.span = {begin, end};
    chunk.tokens.assign(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                        tokens.begin() + static_cast<std::ptrdiff_t>(end));
    chunk.origin = origin;
    return chunk;
  };

  std::vector<Span> units;
  if (tree != nullptr) units = select_units(*tree, options.clause_tags);

  if (units.empty()) return {make_chunk(0, tokens.size(), ChunkOrigin::WholeSentence)};

  std::vector<std::size_t> cuts = {0, tokens.size()};
  for (const Span& unit : units) {
    cuts.push_back(unit.begin);
    cuts.push_back(unit.end);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Chunk> chunks;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Span run{cuts[i], cuts[i + 1]};
    bool inside = std::any_of(units.begin(), units.end(),
                              [&](const Span& unit) { return unit.contains(run); });
    chunks.push_back(make_chunk(run.begin, run.end,
                                inside ? ChunkOrigin::ClauseUnit : ChunkOrigin::Residual));
  }

  if (options.merge_residual_below > 0) {
    std::vector<Chunk> merged;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      if (chunks[i].origin == ChunkOrigin::Residual &&
          chunks[i].span.length() < options.merge_residual_below && i + 1 < chunks.size()) {
        Chunk& next = chunks[i + 1];
        next = make_chunk(chunks[i].span.begin, next.span.end, next.origin);
        continue;
      }
      merged.push_back(std::move(chunks[i]));
    }
    chunks = std::move(merged);
  }
  return chunks;
}

}  // namespace subsum

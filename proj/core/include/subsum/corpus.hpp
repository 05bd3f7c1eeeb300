#ifndef SUBSUM_CORPUS_HPP
#define SUBSUM_CORPUS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subsum/chunking.hpp"

namespace subsum {

struct Sentence {
  std::vector<std::string> tokens;
  std::optional<std::string> parse;            // bracketed constituency tree
  std::optional<std::vector<Chunk>> chunks;    // partition of [0, tokens.size())
  std::optional<std::vector<std::uint8_t>> labels;  // parallel to chunks
};

/// One document: ordered sentences plus a single flattened reference summary.
struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::vector<std::string> reference;
};

using Corpus = std::vector<Document>;

struct LoadIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct LoadResult {
  Corpus documents;
  std::vector<LoadIssue> issues;
};

/// One JSON document per line. Invalid records are collected with their line
/// numbers instead of aborting the load; a missing file still throws.
LoadResult load_corpus(const std::filesystem::path& path);

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

std::string to_json_line(const Document& document);
Document document_from_json_line(const std::string& line);

/// Validate one document the way load_corpus does (alignment included).
/// Returns an error message, or nullopt when the document is well-formed.
std::optional<std::string> validate_document(const Document& document);

enum class UnitKind { Sentence, Chunk };

std::optional<UnitKind> unit_kind_from_name(std::string_view name);

class MissingChunksError : public std::runtime_error {
 public:
  explicit MissingChunksError(const std::string& id)
      : std::runtime_error("document '" + id + "' has no chunks; run the chunk step first") {}
};

/// The document's extraction units in document order: its sentences as
/// whole-sentence chunks, or its stored sub-sentential chunks.
std::vector<Chunk> document_units(const Document& document, UnitKind kind);

/// Concatenated per-sentence labels, parallel to document_units(.., Chunk).
std::vector<std::uint8_t> document_labels(const Document& document);

std::vector<std::string> flatten_tokens(const Document& document);

}  // namespace subsum

#endif

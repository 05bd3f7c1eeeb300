#ifndef SUBSUM_PTB_HPP
#define SUBSUM_PTB_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace subsum::ptb {

enum class ParseErrorKind {
  EmptyInput,
  ExpectedOpen,
  Unbalanced,
  MissingLabel,
  MissingToken,
  TrailingContent,
  TooDeep,
};

/// Structured parse failure; offset is the byte position in the input text.
class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string& message)
      : std::runtime_error(message + " (byte " + std::to_string(offset) + ")"),
        kind_(kind),
        offset_(offset) {}

  ParseErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  ParseErrorKind kind_;
  std::size_t offset_;
};

/// Leaf/token disagreement between a tree and the sentence it should cover.
class AlignError : public std::runtime_error {
 public:
  AlignError(std::size_t index, const std::string& message)
      : std::runtime_error(message), index_(index) {}

  /// Token index at which the mismatch was detected.
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// A labeled constituency node. Leaves carry the surface token (with PTB
/// bracket escapes already resolved, so a -LRB- leaf stores "("); internal
/// nodes carry the syntactic tag. Spans are half-open token intervals
/// assigned in left-to-right leaf order.
struct ParseTree {
  std::string label;                // empty on bare token leaves
  std::string token;                // nonempty iff leaf
  std::vector<ParseTree> children;
  std::size_t span_begin = 0;
  std::size_t span_end = 0;

  bool is_leaf() const { return children.empty(); }
  bool operator==(const ParseTree&) const = default;
};

/// Parse one bracketed tree. A single wrapping (TOP ...) or (ROOT ...) node
/// with exactly one child is unwrapped. Throws ParseError on malformed input;
/// never crashes on arbitrary bytes.
ParseTree parse_bracketed(std::string_view text);

/// Verify that the tree's leaves reproduce `tokens` after bracket-escape
/// normalization on both sides. Throws AlignError on count or text mismatch.
ParseTree align_leaves(ParseTree tree, const std::vector<std::string>& tokens);

/// Serialize back to bracketed form, re-escaping bracket tokens.
/// parse_bracketed(to_bracketed(t)) == t for any parsed t.
std::string to_bracketed(const ParseTree& tree);

/// Strip functional tags and indices: "S-TPC-1" -> "S", "NP=2" -> "NP".
/// Labels that start with '-' (e.g. -LRB-, -NONE-) are left untouched.
std::string_view base_label(std::string_view label);

/// PTB bracket escape table, both directions.
std::string unescape_token(std::string_view token);  // "-LRB-" -> "("
std::string escape_token(std::string_view token);    // "("     -> "-LRB-"

/// Token leaves in document order.
std::vector<const ParseTree*> leaves(const ParseTree& tree);

}  // namespace subsum::ptb

#endif

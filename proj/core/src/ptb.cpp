#include "subsum/ptb.hpp"

#include <array>
#include <utility>

namespace subsum::ptb {

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 6> kEscapes = {{
    {"-LRB-", "("},
    {"-RRB-", ")"},
    {"-LCB-", "{"},
    {"-RCB-", "}"},
    {"-LSB-", "["},
    {"-RSB-", "]"},
}};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// deep enough for any real parse, shallow enough to keep recursion off the
// stack limit when fed garbage
constexpr std::size_t kMaxDepth = 4096;

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void skip_space() {
    while (!done() && is_space(peek())) ++pos;
  }
  std::string_view take_atom() {
    std::size_t start = pos;
    while (!done() && !is_space(peek()) && peek() != '(' && peek() != ')') ++pos;
    return text.substr(start, pos - start);
  }
};

// node := '(' label item* ')' ; item := node | token
ParseTree parse_node(Cursor& cur, std::size_t& next_leaf, std::size_t depth) {
  // caller guarantees cur.peek() == '('
  const std::size_t open_pos = cur.pos;
  if (depth > kMaxDepth)
    throw ParseError(ParseErrorKind::TooDeep, open_pos, "nesting deeper than " + std::to_string(kMaxDepth));
  ++cur.pos;
  cur.skip_space();
  if (cur.done())
    throw ParseError(ParseErrorKind::Unbalanced, cur.pos, "unbalanced parentheses: node opened here is never closed");
  if (cur.peek() == '(' || cur.peek() == ')')
    throw ParseError(ParseErrorKind::MissingLabel, cur.pos, "node with no label");

  ParseTree node;
  node.label = std::string(cur.take_atom());
  node.span_begin = next_leaf;

  while (true) {
    cur.skip_space();
    if (cur.done())
      throw ParseError(ParseErrorKind::Unbalanced, open_pos, "unbalanced parentheses: node opened here is never closed");
    if (cur.peek() == ')') {
      ++cur.pos;
      break;
    }
    if (cur.peek() == '(') {
      node.children.push_back(parse_node(cur, next_leaf, depth + 1));
    } else {
      ParseTree leaf;
      leaf.token = unescape_token(cur.take_atom());
      leaf.span_begin = next_leaf;
      leaf.span_end = ++next_leaf;
      node.children.push_back(std::move(leaf));
    }
  }

  if (node.children.empty())
    throw ParseError(ParseErrorKind::MissingToken, cur.pos - 1, "leaf with no token under label '" + node.label + "'");
  node.span_end = next_leaf;
  return node;
}

void collect_leaves(const ParseTree& node, std::vector<const ParseTree*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node);
    return;
  }
  for (const auto& child : node.children) collect_leaves(child, out);
}

void write_bracketed(const ParseTree& node, std::string& out) {
  if (node.is_leaf()) {
    out += escape_token(node.token);
    return;
  }
  out += '(';
  out += node.label;
  for (const auto& child : node.children) {
    out += ' ';
    write_bracketed(child, out);
  }
  out += ')';
}

}  // namespace

std::string unescape_token(std::string_view token) {
  for (const auto& [escaped, raw] : kEscapes)
    if (token == escaped) return std::string(raw);
  return std::string(token);
}

std::string escape_token(std::string_view token) {
  for (const auto& [escaped, raw] : kEscapes)
    if (token == raw) return std::string(escaped);
  return std::string(token);
}

std::string_view base_label(std::string_view label) {
  if (label.empty() || label.front() == '-') return label;
  std::size_t cut = label.find_first_of("-=");
  return cut == std::string_view::npos ? label : label.substr(0, cut);
}

ParseTree parse_bracketed(std::string_view text) {
  Cursor cur{text};
  cur.skip_space();
  if (cur.done()) throw ParseError(ParseErrorKind::EmptyInput, 0, "empty input");
  if (cur.peek() == ')')
    throw ParseError(ParseErrorKind::Unbalanced, cur.pos, "unbalanced parentheses: ')' before any node");
  if (cur.peek() != '(')
    throw ParseError(ParseErrorKind::ExpectedOpen, cur.pos, "expected '('");

  std::size_t next_leaf = 0;
  ParseTree root = parse_node(cur, next_leaf, 0);
  cur.skip_space();
  if (!cur.done())
    throw ParseError(ParseErrorKind::TrailingContent, cur.pos, "trailing content after tree");

  // parsers differ in emitting an extra TOP/ROOT wrapper
  while (root.children.size() == 1 && !root.children.front().is_leaf() &&
         (base_label(root.label) == "TOP" || base_label(root.label) == "ROOT")) {
    ParseTree child = std::move(root.children.front());
    root = std::move(child);
  }
  return root;
}

ParseTree align_leaves(ParseTree tree, const std::vector<std::string>& tokens) {
  std::vector<const ParseTree*> tree_leaves = leaves(tree);
  if (tree_leaves.size() != tokens.size())
    throw AlignError(tree_leaves.size(),
                     "leaf count " + std::to_string(tree_leaves.size()) +
                         " does not match token count " + std::to_string(tokens.size()));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tree_leaves[i]->token != unescape_token(tokens[i]))
      throw AlignError(i, "token mismatch at index " + std::to_string(i) + ": leaf '" +
                              tree_leaves[i]->token + "' vs token '" + tokens[i] + "'");
  }
  return tree;
}

std::string to_bracketed(const ParseTree& tree) {
  std::string out;
  write_bracketed(tree, out);
  return out;
}

std::vector<const ParseTree*> leaves(const ParseTree& tree) {
  std::vector<const ParseTree*> out;
  collect_leaves(tree, out);
  return out;
}

}  // namespace subsum::ptb

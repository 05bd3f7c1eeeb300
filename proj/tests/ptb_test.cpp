#include "doctest.h"

#include <random>
#include <string>
#include <vector>

#include "subsum/ptb.hpp"
#include "test_support.hpp"

using namespace subsum;

namespace {

// every internal span must equal the concatenation of its children's spans
void check_span_invariants(const ptb::ParseTree& node) {
  if (node.is_leaf()) {
    CHECK(node.span_end == node.span_begin + 1);
    return;
  }
  CHECK(node.span_begin == node.children.front().span_begin);
  CHECK(node.span_end == node.children.back().span_end);
  for (std::size_t i = 0; i + 1 < node.children.size(); ++i)
    CHECK(node.children[i].span_end == node.children[i + 1].span_begin);
  for (const auto& child : node.children) check_span_invariants(child);
}

}  // namespace

TEST_SUITE("ptb") {

TEST_CASE("parses the cat-sat tree with spans in leaf order") {
  const auto tree = ptb::parse_bracketed("(S (NP (DT the) (NN cat)) (VP (VBD sat)))");
  CHECK(tree.label == "S");
  CHECK(tree.span_begin == 0);
  CHECK(tree.span_end == 3);
  const auto leaf_nodes = ptb::leaves(tree);
  REQUIRE(leaf_nodes.size() == 3);
  CHECK(leaf_nodes[0]->token == "the");
  CHECK(leaf_nodes[1]->token == "cat");
  CHECK(leaf_nodes[2]->token == "sat");
  check_span_invariants(tree);
}

TEST_CASE("parses simplified trees with bare tokens") {
  const auto tree = ptb::parse_bracketed("(S (NP I) (VP (VBD said) (SBAR (S he left))))");
  const auto leaf_nodes = ptb::leaves(tree);
  REQUIRE(leaf_nodes.size() == 4);
  CHECK(leaf_nodes[3]->token == "left");
  check_span_invariants(tree);
}

TEST_CASE("reports unbalanced input") {
  CHECK_THROWS_AS(ptb::parse_bracketed("(S (NP the)"), ptb::ParseError);
  try {
    ptb::parse_bracketed("(S (NP the)");
  } catch (const ptb::ParseError& e) {
    CHECK(e.kind() == ptb::ParseErrorKind::Unbalanced);
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
}

TEST_CASE("error taxonomy carries byte offsets") {
  const auto kind_of = [](std::string_view text) {
    try {
      ptb::parse_bracketed(text);
    } catch (const ptb::ParseError& e) {
      return e.kind();
    }
    FAIL("expected a parse error for: ", text);
    return ptb::ParseErrorKind::EmptyInput;
  };
  CHECK(kind_of("") == ptb::ParseErrorKind::EmptyInput);
  CHECK(kind_of("   \t ") == ptb::ParseErrorKind::EmptyInput);
  CHECK(kind_of("cat") == ptb::ParseErrorKind::ExpectedOpen);
  CHECK(kind_of(")") == ptb::ParseErrorKind::Unbalanced);
  CHECK(kind_of("()") == ptb::ParseErrorKind::MissingLabel);
  CHECK(kind_of("(NP)") == ptb::ParseErrorKind::MissingToken);
  CHECK(kind_of("(S a) (S b)") == ptb::ParseErrorKind::TrailingContent);
  CHECK(kind_of("(S a) junk") == ptb::ParseErrorKind::TrailingContent);

  try {
    ptb::parse_bracketed("(S (NP the)");
  } catch (const ptb::ParseError& e) {
    CHECK(e.kind() == ptb::ParseErrorKind::Unbalanced);
    CHECK(e.offset() == 0);  // the unclosed open paren
  }
}

TEST_CASE("escaped bracket tokens are stored unescaped") {
  const auto tree = ptb::parse_bracketed("(S (-LRB- -LRB-))");
  const auto leaf_nodes = ptb::leaves(tree);
  REQUIRE(leaf_nodes.size() == 1);
  CHECK(leaf_nodes[0]->token == "(");
}

TEST_CASE("escape table covers all six brackets both ways") {
  const std::vector<std::pair<std::string, std::string>> table = {
      {"-LRB-", "("}, {"-RRB-", ")"}, {"-LCB-", "{"},
      {"-RCB-", "}"}, {"-LSB-", "["}, {"-RSB-", "]"},
  };
  for (const auto& [escaped, raw] : table) {
    CHECK(ptb::unescape_token(escaped) == raw);
    CHECK(ptb::escape_token(raw) == escaped);
  }
  CHECK(ptb::unescape_token("cat") == "cat");
  CHECK(ptb::escape_token("cat") == "cat");
}

TEST_CASE("TOP and ROOT wrappers are unwrapped") {
  CHECK(ptb::parse_bracketed("(TOP (S (NP (DT the)) (VP (VBD ran))))").label == "S");
  CHECK(ptb::parse_bracketed("(ROOT (S (NP (DT the)) (VP (VBD ran))))").label == "S");
}

TEST_CASE("base_label strips functional tags but not escape labels") {
  CHECK(ptb::base_label("S-TPC-1") == "S");
  CHECK(ptb::base_label("NP=2") == "NP");
  CHECK(ptb::base_label("PP-LOC") == "PP");
  CHECK(ptb::base_label("S") == "S");
  CHECK(ptb::base_label("-LRB-") == "-LRB-");
  CHECK(ptb::base_label("-NONE-") == "-NONE-");
}

TEST_CASE("align_leaves accepts matches and names mismatches") {
  auto tree = ptb::parse_bracketed("(S (NP (DT the) (NN cat)) (VP (VBD sat)))");
  CHECK_NOTHROW(ptb::align_leaves(tree, {"the", "cat", "sat"}));
  CHECK_THROWS_AS(ptb::align_leaves(tree, {"the", "cat"}), ptb::AlignError);
  try {
    ptb::align_leaves(tree, {"the", "dog", "sat"});
    FAIL("expected mismatch");
  } catch (const ptb::AlignError& e) {
    CHECK(e.index() == 1);
  }
  const auto escaped = ptb::parse_bracketed("(S (-LRB- -LRB-))");
  CHECK_NOTHROW(ptb::align_leaves(escaped, {"("}));
}

TEST_CASE("serialization round-trips") {
  const std::vector<std::string> inputs = {
      "(S (NP (DT the) (NN cat)) (VP (VBD sat)))",
      "(S (-LRB- -LRB-) (NP x) (-RRB- -RRB-))",
      "(S (NP I) (VP (VBD said) (SBAR (S he left))))",
  };
  for (const auto& input : inputs) {
    const auto tree = ptb::parse_bracketed(input);
    CHECK(ptb::parse_bracketed(ptb::to_bracketed(tree)) == tree);
  }
}

TEST_CASE("random trees round-trip with valid spans") {
  std::mt19937_64 rng(4242);
  for (int i = 0; i < 200; ++i) {
    std::size_t tokens = 0;
    const std::string text = test_support::random_tree(rng, tokens);
    const auto tree = ptb::parse_bracketed(text);
    CHECK(tree.span_end == tokens);
    check_span_invariants(tree);
    CHECK(ptb::parse_bracketed(ptb::to_bracketed(tree)) == tree);
  }
}

TEST_CASE("arbitrary bytes produce errors, not crashes") {
  std::mt19937_64 rng(99);
  const std::string alphabet = "(()) SNPabc-=\t\n\xff\x01";
  for (int i = 0; i < 500; ++i) {
    std::string text;
    const std::size_t len = rng() % 40;
    for (std::size_t c = 0; c < len; ++c) text += alphabet[rng() % alphabet.size()];
    try {
      (void)ptb::parse_bracketed(text);
    } catch (const ptb::ParseError&) {
    }
  }
  CHECK(true);  // reaching here without a crash is the assertion
}

TEST_CASE("pathological nesting is refused instead of overflowing") {
  std::string deep;
  for (int i = 0; i < 100000; ++i) deep += "(A ";
  deep += "x";
  try {
    ptb::parse_bracketed(deep);
    FAIL("expected an error");
  } catch (const ptb::ParseError& e) {
    CHECK(e.kind() == ptb::ParseErrorKind::TooDeep);
  }
}

}  // TEST_SUITE

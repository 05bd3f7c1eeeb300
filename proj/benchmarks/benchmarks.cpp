// Microbenchmarks for the hot paths: rouge counting, LCS, chunk derivation,
// oracle search, graph ranking and the encoder forward pass.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "subsum/chunking.hpp"
#include "subsum/neural.hpp"
#include "subsum/oracle.hpp"
#include "subsum/ptb.hpp"
#include "subsum/rouge.hpp"
#include "subsum/scorers.hpp"

namespace {

using namespace subsum;

std::vector<std::string> make_tokens(std::mt19937_64& rng, std::size_t count, std::size_t vocab) {
  std::vector<std::string> tokens;
  tokens.reserve(count);
  for (std::size_t i = 0; i < count; ++i) tokens.push_back("w" + std::to_string(rng() % vocab));
  return tokens;
}

void bm_rouge2(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto candidate = make_tokens(rng, static_cast<std::size_t>(state.range(0)), 200);
  const auto reference = make_tokens(rng, 60, 200);
  for (auto _ : state) benchmark::DoNotOptimize(rouge::rouge_n(candidate, reference, 2));
}
BENCHMARK(bm_rouge2)->Arg(60)->Arg(400);

void bm_lcs(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto a = make_tokens(rng, static_cast<std::size_t>(state.range(0)), 50);
  const auto b = make_tokens(rng, static_cast<std::size_t>(state.range(0)), 50);
  for (auto _ : state) benchmark::DoNotOptimize(rouge::lcs_length(a, b));
}
BENCHMARK(bm_lcs)->Arg(60)->Arg(200);

void bm_parse_and_chunk(benchmark::State& state) {
  // a moderately nested sentence with two clause boundaries
  const std::string text =
      "(S (NP (DT the) (NN report)) (VP (VBD said) (SBAR (IN that) (S (NP (NN trading)) "
      "(VP (VBD slowed) (SBAR (WHADVP (WRB when)) (S (NP (NNS markets)) (VP (VBD closed)))))))))";
  const std::vector<std::string> tokens = {"the",  "report", "said",    "that", "trading",
                                           "slowed", "when",   "markets", "closed"};
  for (auto _ : state) {
    const auto tree = ptb::parse_bracketed(text);
    benchmark::DoNotOptimize(chunk_sentence(0, tokens, &tree));
  }
}
BENCHMARK(bm_parse_and_chunk);

void bm_greedy_oracle(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<std::vector<std::string>> units;
  for (int i = 0; i < state.range(0); ++i) units.push_back(make_tokens(rng, 8, 40));
  const auto reference = make_tokens(rng, 50, 40);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::greedy_oracle(units, reference));
}
BENCHMARK(bm_greedy_oracle)->Arg(10)->Arg(40);

void bm_exhaustive_oracle(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::vector<std::vector<std::string>> units;
  for (int i = 0; i < state.range(0); ++i) units.push_back(make_tokens(rng, 6, 30));
  const auto reference = make_tokens(rng, 30, 30);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::exhaustive_oracle(units, reference));
}
BENCHMARK(bm_exhaustive_oracle)->Arg(10)->Arg(14);

void bm_textrank(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::vector<std::vector<std::string>> units;
  for (int i = 0; i < state.range(0); ++i) units.push_back(make_tokens(rng, 10, 60));
  for (auto _ : state) {
    const auto graph = scorers::build_similarity_graph(units);
    benchmark::DoNotOptimize(scorers::pagerank(graph));
  }
}
BENCHMARK(bm_textrank)->Arg(20)->Arg(80);

void bm_encoder_forward(benchmark::State& state) {
  std::mt19937_64 rng(6);
  std::vector<std::vector<std::string>> units;
  for (int i = 0; i < state.range(0); ++i) units.push_back(make_tokens(rng, 8, 120));

  std::vector<std::string> vocab = {neural::kUnkToken};
  for (int v = 0; v < 120; ++v) vocab.push_back("w" + std::to_string(v));
  neural::Hyperparams hyper;  // dim 32, 4 heads, 1 layer
  const auto params = neural::init_params(vocab, hyper, 13);
  for (auto _ : state) benchmark::DoNotOptimize(neural::score_units(units, params));
}
BENCHMARK(bm_encoder_forward)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();

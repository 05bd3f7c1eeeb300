#include "subsum/scorers.hpp"

#include <cmath>
#include <unordered_set>

#include "subsum/rouge.hpp"

namespace subsum::scorers {

std::vector<ScoredUnit> score_lead(const std::vector<Chunk>& units) {
  std::vector<ScoredUnit> scored;
  scored.reserve(units.size());
  for (std::size_t i = 0; i < units.size(); ++i)
    scored.push_back({i, 1.0 / static_cast<double>(1 + i)});
  return scored;
}

SimilarityGraph build_similarity_graph(const std::vector<std::vector<std::string>>& units) {
  SimilarityGraph graph;
  graph.size = units.size();
  graph.weights.assign(graph.size * graph.size, 0.0);

  std::vector<std::unordered_set<std::string>> token_sets(units.size());
  for (std::size_t i = 0; i < units.size(); ++i)
    for (const std::string& token : units[i]) token_sets[i].insert(rouge::fold_token(token));

  for (std::size_t i = 0; i < units.size(); ++i) {
    if (units[i].size() < 2) continue;
    for (std::size_t j = i + 1; j < units.size(); ++j) {
      if (units[j].size() < 2) continue;
      std::size_t shared = 0;
      for (const std::string& token : token_sets[i])
        if (token_sets[j].count(token)) ++shared;
      if (shared == 0) continue;
      double w = static_cast<double>(shared) /
                 (std::log(static_cast<double>(units[i].size())) +
                  std::log(static_cast<double>(units[j].size())));
      graph.weights[i * graph.size + j] = w;
      graph.weights[j * graph.size + i] = w;
    }
  }
  return graph;
}

std::vector<double> pagerank(const SimilarityGraph& graph, const PagerankOptions& options) {
  const std::size_t n = graph.size;
  if (n == 0) return {};

  std::vector<double> out_weight(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out_weight[i] += graph.weight(i, j);

  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<double> scores(n, uniform), next(n, 0.0);

  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    // dangling mass is spread uniformly so scores stay a distribution
    double dangling = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (out_weight[i] == 0.0) dangling += scores[i];

    double max_delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double incoming = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (out_weight[j] > 0.0) incoming += graph.weight(j, i) / out_weight[j] * scores[j];
      next[i] = (1.0 - options.damping) * uniform +
                options.damping * (incoming + dangling * uniform);
      max_delta = std::max(max_delta, std::abs(next[i] - scores[i]));
    }
    scores.swap(next);
    if (max_delta < options.tol) return scores;
  }
  throw PagerankDivergence(options.max_iters, std::move(scores));
}

std::vector<ScoredUnit> score_textrank(const std::vector<Chunk>& units,
                                       const PagerankOptions& options) {
  std::vector<std::vector<std::string>> token_lists;
  token_lists.reserve(units.size());
  for (const Chunk& unit : units) token_lists.push_back(unit.tokens);

  std::vector<double> ranks = pagerank(build_similarity_graph(token_lists), options);
  std::vector<ScoredUnit> scored;
  scored.reserve(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) scored.push_back({i, ranks[i]});
  return scored;
}

}  // namespace subsum::scorers

#ifndef SUBSUM_SCORERS_HPP
#define SUBSUM_SCORERS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "subsum/chunking.hpp"

namespace subsum::scorers {

/// A unit index paired with its extraction score. Baseline scores are
/// nonnegative rank scores; the neural scorer emits probabilities in (0,1).
struct ScoredUnit {
  std::size_t unit_index = 0;
  double score = 0.0;
};

/// Position baseline: score 1/(1+i), strictly decreasing in document order.
std::vector<ScoredUnit> score_lead(const std::vector<Chunk>& units);

/// Symmetric unit-similarity graph. weight(i,j) =
/// |shared distinct tokens| / (ln|u_i| + ln|u_j|) for i != j when both units
/// have at least 2 tokens; 0 otherwise. Diagonal is 0.
struct SimilarityGraph {
  std::size_t size = 0;
  std::vector<double> weights;  // row-major size x size

  double weight(std::size_t i, std::size_t j) const { return weights[i * size + j]; }
};

SimilarityGraph build_similarity_graph(const std::vector<std::vector<std::string>>& units);

struct PagerankOptions {
  double damping = 0.85;
  double tol = 1e-6;
  std::size_t max_iters = 100;
};

class PagerankDivergence : public std::runtime_error {
 public:
  PagerankDivergence(std::size_t iters, std::vector<double> last)
      : std::runtime_error("pagerank did not converge within " + std::to_string(iters) +
                           " iterations"),
        last_iterate(std::move(last)) {}

  std::vector<double> last_iterate;
};

/// Weighted PageRank over the similarity graph. Scores form a probability
/// distribution; nodes without edges keep only teleport (and dangling) mass.
std::vector<double> pagerank(const SimilarityGraph& graph, const PagerankOptions& options = {});

std::vector<ScoredUnit> score_textrank(const std::vector<Chunk>& units,
                                       const PagerankOptions& options = {});

}  // namespace subsum::scorers

#endif

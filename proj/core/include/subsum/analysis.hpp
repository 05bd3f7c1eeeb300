#ifndef SUBSUM_ANALYSIS_HPP
#define SUBSUM_ANALYSIS_HPP

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "subsum/corpus.hpp"

namespace subsum::analysis {

/// Redundancy of a token sequence: 1 - #unique n-grams / #total n-grams.
/// 0 when fewer than one n-gram exists.
double ngram_overlap(std::span<const std::string> tokens, std::size_t n);

/// Pairwise variant: the maximum overlap of any two units' concatenation.
/// 0 with fewer than two units.
double max_pairwise_overlap(const std::vector<std::vector<std::string>>& units, std::size_t n);

struct SummaryStats {
  std::size_t word_count = 0;
  std::size_t unit_count = 0;
  double rouge1_precision = 0.0;
  double rouge2_precision = 0.0;
  std::map<std::size_t, double> overlap;  // n in {1,2,3}
};

/// Unnecessity (ROUGE precision vs. the reference) and redundancy (Eq.-style
/// overlap) of one summary, computed on the concatenated unit tokens.
SummaryStats summary_stats(const std::vector<std::vector<std::string>>& summary_units,
                           const std::vector<std::string>& reference);

struct CorpusStats {
  std::size_t documents = 0;
  double mean_doc_sentences = 0.0;
  double mean_doc_words = 0.0;
  double mean_doc_subsentences = 0.0;
  double mean_ref_sentences = 0.0;
  double mean_ref_words = 0.0;
};

class EmptyCorpusError : public std::runtime_error {
 public:
  EmptyCorpusError() : std::runtime_error("empty corpus") {}
};

/// Descriptive statistics. Sub-sentence counts use stored chunks when
/// present, otherwise re-derive them from the parse (whole sentence when
/// neither exists). Reference sentence counts split at . ! ? tokens.
CorpusStats corpus_stats(const Corpus& corpus);

/// Sentence count of a flattened token sequence (terminal-punctuation split).
std::size_t sentence_count(std::span<const std::string> tokens);

}  // namespace subsum::analysis

#endif

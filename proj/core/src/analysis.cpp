#include "subsum/analysis.hpp"

#include <unordered_set>

#include "subsum/rouge.hpp"

namespace subsum::analysis {

double ngram_overlap(std::span<const std::string> tokens, std::size_t n) {
  if (n == 0 || tokens.size() < n) return 0.0;

  std::unordered_set<std::string> unique;
  std::size_t total = 0;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (std::size_t j = 0; j < n; ++j) {
      if (j > 0) key += '\x1f';
      key += rouge::fold_token(tokens[i + j]);
    }
    unique.insert(std::move(key));
    ++total;
  }
  return 1.0 - static_cast<double>(unique.size()) / static_cast<double>(total);
}

double max_pairwise_overlap(const std::vector<std::vector<std::string>>& units, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    for (std::size_t j = i + 1; j < units.size(); ++j) {
      std::vector<std::string> pair = units[i];
      pair.insert(pair.end(), units[j].begin(), units[j].end());
      best = std::max(best, ngram_overlap(pair, n));
    }
  }
  return best;
}

SummaryStats summary_stats(const std::vector<std::vector<std::string>>& summary_units,
                           const std::vector<std::string>& reference) {
  std::vector<std::string> concatenated;
  for (const auto& unit : summary_units)
    concatenated.insert(concatenated.end(), unit.begin(), unit.end());

  SummaryStats stats;
  stats.word_count = concatenated.size();
  stats.unit_count = summary_units.size();
  stats.rouge1_precision = rouge::rouge_n(concatenated, reference, 1).precision;
  stats.rouge2_precision = rouge::rouge_n(concatenated, reference, 2).precision;
  for (std::size_t n : {1u, 2u, 3u}) stats.overlap[n] = ngram_overlap(concatenated, n);
  return stats;
}

std::size_t sentence_count(std::span<const std::string> tokens) {
  std::size_t count = 0;
  bool open = false;  // inside a segment with at least one token
  for (const std::string& token : tokens) {
    if (token == "." || token == "!" || token == "?") {
      if (open) ++count;
      open = false;
    } else {
      open = true;
    }
  }
  if (open) ++count;
  return count;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.empty()) throw EmptyCorpusError();

  CorpusStats stats;
  stats.documents = corpus.size();

  std::size_t sentences = 0, words = 0, subsentences = 0, ref_sentences = 0, ref_words = 0;
  for (const Document& document : corpus) {
    sentences += document.sentences.size();
    for (const Sentence& sentence : document.sentences) {
      words += sentence.tokens.size();
      if (sentence.chunks) {
        subsentences += sentence.chunks->size();
      } else if (sentence.parse) {
        auto tree = ptb::align_leaves(ptb::parse_bracketed(*sentence.parse), sentence.tokens);
        subsentences += chunk_sentence(0, sentence.tokens, &tree).size();
      } else {
        subsentences += 1;
      }
    }
    ref_sentences += sentence_count(document.reference);
    ref_words += document.reference.size();
  }

  const double n = static_cast<double>(corpus.size());
  stats.mean_doc_sentences = static_cast<double>(sentences) / n;
  stats.mean_doc_words = static_cast<double>(words) / n;
  stats.mean_doc_subsentences = static_cast<double>(subsentences) / n;
  stats.mean_ref_sentences = static_cast<double>(ref_sentences) / n;
  stats.mean_ref_words = static_cast<double>(ref_words) / n;
  return stats;
}

}  // namespace subsum::analysis

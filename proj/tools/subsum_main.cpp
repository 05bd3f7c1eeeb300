// Command-line front end: chunk / oracle / rouge / stats / summarize /
// train / sample over line-delimited corpus records.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "subsum/analysis.hpp"
#include "subsum/corpus.hpp"
#include "subsum/neural.hpp"
#include "subsum/oracle.hpp"
#include "subsum/parallel.hpp"
#include "subsum/ptb.hpp"
#include "subsum/rouge.hpp"
#include "subsum/scorers.hpp"
#include "subsum/selection.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace subsum;

Corpus load_or_throw(const std::string& path) {
  LoadResult result = load_corpus(path);
  if (!result.issues.empty()) {
    std::string message = path + " has invalid records:";
    for (const auto& issue : result.issues)
      message += "\n  line " + std::to_string(issue.line) + ": " + issue.message;
    throw std::runtime_error(message);
  }
  return std::move(result.documents);
}

void write_lines(const std::optional<std::string>& path, const std::vector<std::string>& lines) {
  if (!path) {
    for (const auto& line : lines) std::cout << line << '\n';
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + *path + " for writing");
  for (const auto& line : lines) out << line << '\n';
  if (!out) throw std::runtime_error("failed writing " + *path);
}

UnitKind parse_unit(const std::string& name) {
  const auto kind = unit_kind_from_name(name);
  if (!kind) throw std::runtime_error("unknown unit kind '" + name + "'");
  return *kind;
}

rouge::Metric parse_metric(const std::string& name) {
  const auto metric = rouge::metric_from_name(name);
  if (!metric) throw std::runtime_error("unknown metric '" + name + "'");
  return *metric;
}

std::string format_row(const std::string& label, const std::vector<rouge::RougeScore>& scores) {
  std::string row = label;
  row.resize(std::max<std::size_t>(row.size(), 6), ' ');
  char cell[32];
  for (const auto& s : scores) {
    std::snprintf(cell, sizeof(cell), "  %6.4f  %6.4f  %6.4f", s.precision, s.recall, s.f1);
    row += cell;
  }
  return row;
}

// Rebuild every sentence's chunk list from its parse; sentences without a
// parse become single whole-sentence chunks.
void chunk_document(Document& doc, const ChunkOptions& options) {
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    Sentence& sentence = doc.sentences[s];
    if (sentence.parse) {
      const ptb::ParseTree tree =
          ptb::align_leaves(ptb::parse_bracketed(*sentence.parse), sentence.tokens);
      sentence.chunks = chunk_sentence(s, sentence.tokens, &tree, options);
    } else {
      sentence.chunks = chunk_sentence(s, sentence.tokens, nullptr, options);
    }
  }
}

// ---------------------------------------------------------------------------

struct ChunkArgs {
  std::string in;
  std::optional<std::string> out;
  std::size_t merge_residual_below = 0;
};

void cmd_chunk(const ChunkArgs& args) {
  Corpus corpus = load_or_throw(args.in);
  ChunkOptions options;
  options.merge_residual_below = args.merge_residual_below;
  parallel_for_index(corpus.size(), worker_count_from_env(), [&](std::size_t i) {
    try {
      chunk_document(corpus[i], options);
    } catch (const std::exception& e) {
      throw std::runtime_error("document '" + corpus[i].id + "': " + e.what());
    }
  });
  std::vector<std::string> lines(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) lines[i] = to_json_line(corpus[i]);
  write_lines(args.out, lines);
}

struct OracleArgs {
  std::string in;
  std::optional<std::string> out;
  std::string unit;
  std::string metric = "rouge2-f1";
  std::optional<std::size_t> max_units;
  bool exhaustive = false;
};

void cmd_oracle(const OracleArgs& args) {
  Corpus corpus = load_or_throw(args.in);
  const UnitKind kind = parse_unit(args.unit);
  oracle::OracleOptions options;
  options.metric = parse_metric(args.metric);
  options.max_units = args.max_units;

  parallel_for_index(corpus.size(), worker_count_from_env(), [&](std::size_t i) {
    Document& doc = corpus[i];
    try {
      if (kind == UnitKind::Sentence)
        for (std::size_t s = 0; s < doc.sentences.size(); ++s)
          doc.sentences[s].chunks = chunk_sentence(s, doc.sentences[s].tokens, nullptr);
      const auto units = document_units(doc, UnitKind::Chunk);
      std::vector<std::vector<std::string>> unit_tokens;
      unit_tokens.reserve(units.size());
      for (const auto& u : units) unit_tokens.push_back(u.tokens);
      const oracle::OracleResult result =
          args.exhaustive ? oracle::exhaustive_oracle(unit_tokens, doc.reference, options.metric)
                          : oracle::greedy_oracle(unit_tokens, doc.reference, options);
      std::size_t offset = 0;
      for (auto& sentence : doc.sentences) {
        const std::size_t count = sentence.chunks->size();
        sentence.labels.emplace(result.labels.begin() + static_cast<std::ptrdiff_t>(offset),
                                result.labels.begin() + static_cast<std::ptrdiff_t>(offset + count));
        offset += count;
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("document '" + doc.id + "': " + e.what());
    }
  });
  std::vector<std::string> lines(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) lines[i] = to_json_line(corpus[i]);
  write_lines(args.out, lines);
}

struct RougeArgs {
  std::string candidate;
  std::string reference;
};

std::vector<std::vector<std::string>> read_token_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream stream(line);
    lines.emplace_back(std::istream_iterator<std::string>(stream),
                       std::istream_iterator<std::string>());
  }
  return lines;
}

void cmd_rouge(const RougeArgs& args) {
  const auto candidates = read_token_lines(args.candidate);
  const auto references = read_token_lines(args.reference);
  if (candidates.size() != references.size())
    throw std::runtime_error("candidate has " + std::to_string(candidates.size()) +
                             " lines but reference has " + std::to_string(references.size()));
  if (candidates.empty()) throw std::runtime_error("no summaries to score");

  std::cout << "line      r1-p    r1-r    r1-f    r2-p    r2-r    r2-f    rl-p    rl-r    rl-f\n";
  std::vector<rouge::RougeScore> mean(3);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::vector<rouge::RougeScore> scores = {
        rouge::rouge_n(candidates[i], references[i], 1),
        rouge::rouge_n(candidates[i], references[i], 2),
        rouge::rouge_l(candidates[i], references[i]),
    };
    for (std::size_t m = 0; m < 3; ++m) {
      mean[m].precision += scores[m].precision;
      mean[m].recall += scores[m].recall;
      mean[m].f1 += scores[m].f1;
    }
    std::cout << format_row(std::to_string(i + 1), scores) << '\n';
  }
  for (auto& m : mean) {
    m.precision /= static_cast<double>(candidates.size());
    m.recall /= static_cast<double>(candidates.size());
    m.f1 /= static_cast<double>(candidates.size());
  }
  std::cout << format_row("mean", mean) << '\n';
}

struct StatsArgs {
  std::string in;
  std::optional<std::string> records;
  bool pairwise = false;
};

void cmd_stats(const StatsArgs& args) {
  const Corpus corpus = load_or_throw(args.in);
  const analysis::CorpusStats cs = analysis::corpus_stats(corpus);
  char buffer[64];
  std::cout << "documents              " << cs.documents << '\n';
  const auto row = [&buffer](const char* name, double value) {
    std::snprintf(buffer, sizeof(buffer), "%-22s %.2f", name, value);
    std::cout << buffer << '\n';
  };
  row("doc_len_sentences", cs.mean_doc_sentences);
  row("doc_len_subsentences", cs.mean_doc_subsentences);
  row("doc_len_words", cs.mean_doc_words);
  row("ref_len_sentences", cs.mean_ref_sentences);
  row("ref_len_words", cs.mean_ref_words);

  std::vector<std::string> lines(corpus.size());
  parallel_for_index(corpus.size(), worker_count_from_env(), [&](std::size_t i) {
    const Document& doc = corpus[i];
    json record;
    record["id"] = doc.id;
    record["sentences"] = doc.sentences.size();
    record["words"] = flatten_tokens(doc).size();
    std::size_t subsentences = 0;
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const Sentence& sentence = doc.sentences[s];
      if (sentence.chunks) {
        subsentences += sentence.chunks->size();
      } else if (sentence.parse) {
        const auto tree = ptb::align_leaves(ptb::parse_bracketed(*sentence.parse), sentence.tokens);
        subsentences += chunk_sentence(s, sentence.tokens, &tree).size();
      } else {
        subsentences += 1;
      }
    }
    record["subsentences"] = subsentences;
    record["reference_words"] = doc.reference.size();

    const bool labeled = std::all_of(doc.sentences.begin(), doc.sentences.end(),
                                     [](const Sentence& s) { return s.chunks && s.labels; });
    if (labeled) {
      std::vector<std::vector<std::string>> selected;
      for (const auto& sentence : doc.sentences)
        for (std::size_t c = 0; c < sentence.chunks->size(); ++c)
          if ((*sentence.labels)[c]) selected.push_back((*sentence.chunks)[c].tokens);
      const analysis::SummaryStats stats = analysis::summary_stats(selected, doc.reference);
      json summary;
      summary["unit_count"] = stats.unit_count;
      summary["word_count"] = stats.word_count;
      summary["rouge1_precision"] = stats.rouge1_precision;
      summary["rouge2_precision"] = stats.rouge2_precision;
      json overlap;
      for (const auto& [n, value] : stats.overlap)
        overlap[std::to_string(n)] =
            args.pairwise ? analysis::max_pairwise_overlap(selected, n) : value;
      summary["overlap"] = std::move(overlap);
      record["summary"] = std::move(summary);
    }
    lines[i] = record.dump();
  });
  write_lines(args.records, lines);
}

struct SummarizeArgs {
  std::string in;
  std::optional<std::string> out;
  std::string scorer;
  std::string unit;
  std::string model;
  std::size_t word_limit = 60;
  std::size_t top_k = 0;  // 0: use the word limit
  bool trigram_block = false;
  std::size_t token_cap = neural::kDefaultTokenCap;
  std::optional<std::string> text_out;
  std::optional<std::string> ref_out;
};

void cmd_summarize(const SummarizeArgs& args) {
  const Corpus corpus = load_or_throw(args.in);
  const UnitKind kind = parse_unit(args.unit);
  if (args.scorer != "lead" && args.scorer != "textrank" && args.scorer != "neural")
    throw std::runtime_error("unknown scorer '" + args.scorer + "'");

  std::optional<neural::ScorerParams> model;
  if (args.scorer == "neural") {
    if (args.model.empty()) throw std::runtime_error("--scorer neural requires --model");
    model = neural::load_params(args.model);
  }

  std::vector<std::string> lines(corpus.size());
  std::vector<std::string> texts(corpus.size());
  std::vector<std::string> refs(corpus.size());
  parallel_for_index(corpus.size(), worker_count_from_env(), [&](std::size_t i) {
    const Document& doc = corpus[i];
    try {
      const auto units = document_units(doc, kind);
      std::vector<scorers::ScoredUnit> scored;
      if (args.scorer == "lead") {
        scored = scorers::score_lead(units);
      } else if (args.scorer == "textrank") {
        scored = scorers::score_textrank(units);
      } else {
        scored = neural::score_document(doc, kind, *model, args.token_cap);
      }
      const selection::Summary summary =
          args.top_k > 0
              ? selection::select_top_k(units, scored, args.top_k, args.trigram_block)
              : selection::select_by_word_limit(units, scored, args.word_limit,
                                                args.trigram_block);

      const auto tokens = selection::summary_tokens(summary.units);
      json record;
      record["id"] = doc.id;
      record["unit"] = args.unit;
      record["indices"] = summary.indices;
      json unit_spans = json::array();
      for (const auto& u : summary.units)
        unit_spans.push_back({{"sentence", u.sentence_index}, {"span", {u.span.begin, u.span.end}}});
      record["units"] = std::move(unit_spans);
      record["word_count"] = summary.word_count;
      record["text"] = summary.text;
      record["rouge1_f1"] = rouge::rouge_n(tokens, doc.reference, 1).f1;
      record["rouge2_f1"] = rouge::rouge_n(tokens, doc.reference, 2).f1;
      record["rougel_f1"] = rouge::rouge_l(tokens, doc.reference).f1;
      lines[i] = record.dump();

      texts[i] = summary.text;
      std::string ref;
      for (std::size_t t = 0; t < doc.reference.size(); ++t) {
        if (t > 0) ref += ' ';
        ref += doc.reference[t];
      }
      refs[i] = std::move(ref);
    } catch (const std::exception& e) {
      throw std::runtime_error("document '" + doc.id + "': " + e.what());
    }
  });
  write_lines(args.out, lines);
  if (args.text_out) write_lines(args.text_out, texts);
  if (args.ref_out) write_lines(args.ref_out, refs);
}

struct TrainArgs {
  std::string in;
  std::string model_out;
  int dim = 32;
  int ffn_dim = 64;
  int heads = 4;
  int layers = 1;
  std::size_t epochs = 500;
  double learning_rate = 0.05;
  std::uint64_t seed = 13;
  std::string optimizer = "gd";
  std::size_t token_cap = neural::kDefaultTokenCap;
};

void cmd_train(const TrainArgs& args) {
  const Corpus corpus = load_or_throw(args.in);
  neural::Hyperparams hyper;
  hyper.dim = args.dim;
  hyper.ffn_dim = args.ffn_dim;
  hyper.heads = args.heads;
  hyper.layers = args.layers;

  neural::TrainOptions options;
  options.epochs = args.epochs;
  options.learning_rate = args.learning_rate;
  options.token_cap = args.token_cap;
  if (args.optimizer == "adam")
    options.optimizer = neural::TrainOptions::Optimizer::Adam;
  else if (args.optimizer != "gd")
    throw std::runtime_error("unknown optimizer '" + args.optimizer + "'");

  neural::ScorerParams params = neural::init_params(neural::build_vocab(corpus), hyper, args.seed);
  const double initial = neural::corpus_loss(corpus, params, args.token_cap);
  params = neural::train(corpus, std::move(params), options);
  const double final_loss = neural::corpus_loss(corpus, params, args.token_cap);
  neural::save_params(params, args.model_out);

  char buffer[160];
  std::snprintf(buffer, sizeof(buffer),
                "trained vocab=%zu epochs=%zu initial_loss=%.6f final_loss=%.6f", params.vocab.size(),
                args.epochs, initial, final_loss);
  std::cout << buffer << '\n' << "model written to " << args.model_out << '\n';
}

struct SampleArgs {
  std::string in;
  std::optional<std::string> out;
  std::size_t n = 50;
  std::uint64_t seed = 13;
};

void cmd_sample(const SampleArgs& args) {
  const Corpus corpus = load_or_throw(args.in);
  std::vector<std::size_t> indices(corpus.size());
  std::iota(indices.begin(), indices.end(), 0);
  // partial Fisher-Yates; std::mt19937_64 output is pinned by the standard,
  // so the same seed samples the same documents on every platform
  std::mt19937_64 rng(args.seed);
  const std::size_t take = std::min(args.n, indices.size());
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (indices.size() - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(take);
  std::sort(indices.begin(), indices.end());

  std::vector<std::string> lines;
  lines.reserve(take);
  for (std::size_t i : indices) lines.push_back(to_json_line(corpus[i]));
  write_lines(args.out, lines);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extraction-granularity summarization toolkit"};
  app.require_subcommand(1);

  ChunkArgs chunk_args;
  auto* chunk = app.add_subcommand("chunk", "derive sub-sentential chunks from parses");
  chunk->add_option("--in", chunk_args.in, "input corpus (jsonl)")
      ->required()
      ->check(CLI::ExistingFile);
  chunk->add_option("--out", chunk_args.out, "output corpus (default stdout)");
  chunk->add_option("--merge-residual-below", chunk_args.merge_residual_below,
                    "merge residual chunks shorter than N tokens into the next chunk");

  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "label units with an extractive oracle");
  oracle_cmd->add_option("--in", oracle_args.in, "input corpus (jsonl)")
      ->required()
      ->check(CLI::ExistingFile);
  oracle_cmd->add_option("--out", oracle_args.out, "output corpus (default stdout)");
  oracle_cmd->add_option("--unit", oracle_args.unit, "sentence|chunk")->required();
  oracle_cmd->add_option("--metric", oracle_args.metric, "rouge1-f1|rouge2-f1|rougel-f1");
  auto* max_units_opt =
      oracle_cmd->add_option("--max-units", oracle_args.max_units, "cap on selected units");
  oracle_cmd->add_flag("--exhaustive", oracle_args.exhaustive, "exact search (<= 20 units)")
      ->excludes(max_units_opt);

  RougeArgs rouge_args;
  auto* rouge_cmd = app.add_subcommand("rouge", "score candidate summaries against references");
  rouge_cmd->add_option("--candidate", rouge_args.candidate, "one tokenized summary per line")
      ->required()
      ->check(CLI::ExistingFile);
  rouge_cmd->add_option("--reference", rouge_args.reference, "one tokenized reference per line")
      ->required()
      ->check(CLI::ExistingFile);

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "corpus statistics and per-document records");
  stats->add_option("--in", stats_args.in, "input corpus (jsonl)")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_option("--records", stats_args.records,
                    "write per-document records here (default stdout)");
  stats->add_flag("--pairwise", stats_args.pairwise,
                  "report max pairwise unit overlap instead of whole-summary overlap");

  SummarizeArgs summarize_args;
  auto* summarize = app.add_subcommand("summarize", "score units and select a summary");
  summarize->add_option("--in", summarize_args.in, "input corpus (jsonl)")
      ->required()
      ->check(CLI::ExistingFile);
  summarize->add_option("--out", summarize_args.out, "summary records (default stdout)");
  summarize->add_option("--scorer", summarize_args.scorer, "lead|textrank|neural")->required();
  summarize->add_option("--unit", summarize_args.unit, "sentence|chunk")->required();
  summarize->add_option("--model", summarize_args.model, "trained model file (neural scorer)");
  auto* word_limit_opt =
      summarize->add_option("--word-limit", summarize_args.word_limit, "word budget (default 60)");
  summarize->add_option("--top-k", summarize_args.top_k, "select k best units instead of a budget")
      ->excludes(word_limit_opt);
  summarize->add_flag("--trigram-block", summarize_args.trigram_block,
                      "skip units sharing a trigram with the partial summary");
  summarize->add_option("--token-cap", summarize_args.token_cap,
                        "neural scorer document-token cap (0 disables)");
  summarize->add_option("--text-out", summarize_args.text_out, "write summary text lines here");
  summarize->add_option("--ref-out", summarize_args.ref_out, "write reference text lines here");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "fit the unit scorer on oracle labels");
  train->add_option("--in", train_args.in, "labeled corpus (jsonl)")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--model-out", train_args.model_out, "where to write the model")->required();
  train->add_option("--dim", train_args.dim, "embedding width (default 32)");
  train->add_option("--ffn-dim", train_args.ffn_dim, "feed-forward width (default 64)");
  train->add_option("--heads", train_args.heads, "attention heads (default 4)");
  train->add_option("--layers", train_args.layers, "block count (default 1)");
  train->add_option("--epochs", train_args.epochs, "full-batch steps (default 500)");
  train->add_option("--lr", train_args.learning_rate, "learning rate (default 0.05)");
  train->add_option("--seed", train_args.seed, "init seed (default 13)");
  train->add_option("--optimizer", train_args.optimizer, "gd|adam (default gd)");
  train->add_option("--token-cap", train_args.token_cap,
                    "document-token cap during training (0 disables)");

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "deterministically sample documents for annotation");
  sample->add_option("--in", sample_args.in, "input corpus (jsonl)")
      ->required()
      ->check(CLI::ExistingFile);
  sample->add_option("--out", sample_args.out, "sampled corpus (default stdout)");
  sample->add_option("--n", sample_args.n, "sample size (default 50)");
  sample->add_option("--seed", sample_args.seed, "sampling seed (default 13)");

  chunk->callback([&]() { cmd_chunk(chunk_args); });
  oracle_cmd->callback([&]() { cmd_oracle(oracle_args); });
  rouge_cmd->callback([&]() { cmd_rouge(rouge_args); });
  stats->callback([&]() { cmd_stats(stats_args); });
  summarize->callback([&]() { cmd_summarize(summarize_args); });
  train->callback([&]() { cmd_train(train_args); });
  sample->callback([&]() { cmd_sample(sample_args); });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "subsum: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

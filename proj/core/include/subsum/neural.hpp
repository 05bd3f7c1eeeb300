#ifndef SUBSUM_NEURAL_HPP
#define SUBSUM_NEURAL_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "subsum/corpus.hpp"
#include "subsum/scorers.hpp"

namespace subsum::neural {

inline constexpr int kUnkId = 0;
inline constexpr const char* kUnkToken = "<unk>";
inline constexpr std::size_t kDefaultTokenCap = 512;

/// One residual attention/FFN block: pre-LN is not used, the layout is
/// LN(x + MultiHead(x)) followed by LN(h + FFN(h)).
struct BlockParams {
  std::vector<Eigen::MatrixXd> w_q, w_k, w_v;  // per head, d x d_h
  Eigen::MatrixXd w_m;                         // d x d
  Eigen::MatrixXd w_1;                         // d x d_f
  Eigen::VectorXd b_1;                         // d_f
  Eigen::MatrixXd w_2;                         // d_f x d
  Eigen::VectorXd b_2;                         // d
  Eigen::VectorXd ln1_gain, ln1_bias;          // d
  Eigen::VectorXd ln2_gain, ln2_bias;          // d
};

struct Hyperparams {
  int dim = 32;
  int ffn_dim = 64;
  int heads = 4;
  int layers = 1;
  double ln_epsilon = 1e-5;

  int head_dim() const { return dim / heads; }
};

/// All learnable state of the unit scorer plus the vocabulary that maps
/// surface tokens (case-folded) to embedding rows. Row 0 is <unk>.
struct ScorerParams {
  Hyperparams hyper;
  std::vector<std::string> id_to_token;
  std::unordered_map<std::string, int> vocab;
  Eigen::MatrixXd embedding;  // V x d
  std::vector<BlockParams> blocks;
  Eigen::VectorXd w_o;  // d
  double b_o = 0.0;

  int token_id(const std::string& token) const;
};

/// Case-folded sorted token set of all document sentences, <unk> prepended.
std::vector<std::string> build_vocab(const Corpus& corpus);

/// Weight matrices uniform in +-1/sqrt(d) from the seed; biases start at 0
/// and LayerNorm gains at 1.
ScorerParams init_params(std::vector<std::string> vocab_tokens, const Hyperparams& hyper,
                         std::uint64_t seed);

/// Mean of the chunk's token embeddings. Throws on an empty chunk.
Eigen::VectorXd embed_and_pool(const std::vector<std::string>& chunk_tokens,
                               const ScorerParams& params);

/// Apply the configured block stack to a sequence of pooled unit vectors
/// (one row per unit). Throws on a dimension mismatch.
Eigen::MatrixXd transformer_block(const Eigen::MatrixXd& pooled, const ScorerParams& params);

/// sigma(w_o . c + b_o)
double predict_prob(const Eigen::VectorXd& unit_repr, const ScorerParams& params);

/// Mean binary cross-entropy; probabilities are clamped to [1e-7, 1 - 1e-7].
double bce_loss(const std::vector<double>& probs, const std::vector<std::uint8_t>& labels);

/// Extraction probabilities for a list of unit token lists.
std::vector<double> score_units(const std::vector<std::vector<std::string>>& unit_tokens,
                                const ScorerParams& params);

/// Score a document's units. Units are dropped when they extend past the
/// first `token_cap` document tokens (0 disables the cap); unit_index in the
/// result refers to document_units(document, kind) positions.
std::vector<scorers::ScoredUnit> score_document(const Document& document, UnitKind kind,
                                                const ScorerParams& params,
                                                std::size_t token_cap = kDefaultTokenCap);

struct TrainOptions {
  std::size_t epochs = 500;
  double learning_rate = 0.05;
  std::size_t token_cap = kDefaultTokenCap;

  enum class Optimizer { GradientDescent, Adam } optimizer = Optimizer::GradientDescent;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

class TrainingDivergence : public std::runtime_error {
 public:
  explicit TrainingDivergence(std::size_t epoch)
      : std::runtime_error("training loss became non-finite at epoch " + std::to_string(epoch)) {}
};

/// Full-batch training with exact analytic gradients through the pooling,
/// block stack and output head. Every document needs chunks and labels.
/// Deterministic: the same params and options give bit-identical results.
ScorerParams train(const Corpus& corpus, ScorerParams params, const TrainOptions& options = {});

/// Mean BCE of the corpus under the given parameters (same unit mean that
/// train() descends on).
double corpus_loss(const Corpus& corpus, const ScorerParams& params,
                   std::size_t token_cap = kDefaultTokenCap);

/// Compare every analytic parameter gradient on one labeled document against
/// central finite differences; returns the worst component error (relative,
/// or absolute where both values vanish).
double grad_check(const ScorerParams& params, const Document& document, double eps = 1e-5);

/// Versioned binary format: magic, hyperparameters, vocab, then every weight
/// array row-major as little-endian 64-bit floats in declaration order.
void save_params(const ScorerParams& params, const std::filesystem::path& path);
ScorerParams load_params(const std::filesystem::path& path);

}  // namespace subsum::neural

#endif

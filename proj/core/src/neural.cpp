#include "subsum/neural.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <set>

#include "subsum/rouge.hpp"

namespace subsum::neural {
namespace {

constexpr double kProbEpsilon = 1e-7;
constexpr char kMagic[8] = {'s', 'u', 'b', 's', 'u', 'm', 'n', 'n'};
constexpr std::uint32_t kFormatVersion = 1;

void validate_hyper(const Hyperparams& h) {
  if (h.dim <= 0 || h.ffn_dim <= 0 || h.heads <= 0 || h.layers < 0)
    throw std::invalid_argument("hyperparameters must be positive");
  if (h.dim % h.heads != 0) throw std::invalid_argument("dim must be divisible by heads");
  if (!(h.ln_epsilon > 0.0)) throw std::invalid_argument("ln_epsilon must be positive");
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double clamp_prob(double p) {
  return std::min(std::max(p, kProbEpsilon), 1.0 - kProbEpsilon);
}

// Gradients share the parameter layout; BlockParams doubles as per-block
// gradient storage.
struct Gradients {
  Eigen::MatrixXd embedding;
  std::vector<BlockParams> blocks;
  Eigen::VectorXd w_o;
  double b_o = 0.0;
};

struct TensorView {
  double* data;
  std::size_t size;
};

template <class ParamsLike>
std::vector<TensorView> tensor_views(ParamsLike& p) {
  std::vector<TensorView> out;
  auto add = [&out](auto& tensor) {
    out.push_back({tensor.data(), static_cast<std::size_t>(tensor.size())});
  };
  add(p.embedding);
  for (auto& b : p.blocks) {
    for (auto& m : b.w_q) add(m);
    for (auto& m : b.w_k) add(m);
    for (auto& m : b.w_v) add(m);
    add(b.w_m);
    add(b.w_1);
    add(b.b_1);
    add(b.w_2);
    add(b.b_2);
    add(b.ln1_gain);
    add(b.ln1_bias);
    add(b.ln2_gain);
    add(b.ln2_bias);
  }
  add(p.w_o);
  out.push_back({&p.b_o, 1});
  return out;
}

BlockParams make_block(const Hyperparams& h) {
  BlockParams b;
  const int dh = h.head_dim();
  b.w_q.assign(h.heads, Eigen::MatrixXd::Zero(h.dim, dh));
  b.w_k.assign(h.heads, Eigen::MatrixXd::Zero(h.dim, dh));
  b.w_v.assign(h.heads, Eigen::MatrixXd::Zero(h.dim, dh));
  b.w_m = Eigen::MatrixXd::Zero(h.dim, h.dim);
  b.w_1 = Eigen::MatrixXd::Zero(h.dim, h.ffn_dim);
  b.b_1 = Eigen::VectorXd::Zero(h.ffn_dim);
  b.w_2 = Eigen::MatrixXd::Zero(h.ffn_dim, h.dim);
  b.b_2 = Eigen::VectorXd::Zero(h.dim);
  b.ln1_gain = Eigen::VectorXd::Zero(h.dim);
  b.ln1_bias = Eigen::VectorXd::Zero(h.dim);
  b.ln2_gain = Eigen::VectorXd::Zero(h.dim);
  b.ln2_bias = Eigen::VectorXd::Zero(h.dim);
  return b;
}

ScorerParams allocate_params(std::vector<std::string> vocab_tokens, const Hyperparams& hyper) {
  validate_hyper(hyper);
  if (vocab_tokens.empty()) throw std::invalid_argument("vocabulary is empty");
  ScorerParams p;
  p.hyper = hyper;
  p.id_to_token = std::move(vocab_tokens);
  for (std::size_t i = 0; i < p.id_to_token.size(); ++i)
    p.vocab.emplace(p.id_to_token[i], static_cast<int>(i));
  p.embedding = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p.id_to_token.size()), hyper.dim);
  for (int l = 0; l < hyper.layers; ++l) p.blocks.push_back(make_block(hyper));
  p.w_o = Eigen::VectorXd::Zero(hyper.dim);
  return p;
}

Gradients make_gradients(const ScorerParams& p) {
  Gradients g;
  g.embedding = Eigen::MatrixXd::Zero(p.embedding.rows(), p.embedding.cols());
  for (std::size_t l = 0; l < p.blocks.size(); ++l) g.blocks.push_back(make_block(p.hyper));
  g.w_o = Eigen::VectorXd::Zero(p.w_o.size());
  return g;
}

void zero_gradients(Gradients& g) {
  for (auto& view : tensor_views(g)) std::fill_n(view.data, view.size, 0.0);
}

// ---------------------------------------------------------------------------
// forward

struct BlockCache {
  std::vector<Eigen::MatrixXd> q, k, v, a;  // per head
  Eigen::MatrixXd concat;                   // joined head outputs, n x d
  Eigen::VectorXd s1, s2;                   // per-row sqrt(var + eps)
  Eigen::MatrixXd xhat1, xhat2;             // normalized residuals
  Eigen::MatrixXd h;                        // first LayerNorm output
  Eigen::MatrixXd pre, act;                 // FFN pre-activation / ReLU
  Eigen::MatrixXd y;                        // block output
};

struct ForwardCache {
  std::vector<std::vector<int>> token_ids;
  Eigen::MatrixXd x0;
  std::vector<BlockCache> blocks;
  std::vector<double> probs;
};

Eigen::MatrixXd layer_norm(const Eigen::MatrixXd& x, const Eigen::VectorXd& gain,
                           const Eigen::VectorXd& bias, double eps, Eigen::VectorXd& s,
                           Eigen::MatrixXd& xhat) {
  const Eigen::Index n = x.rows(), d = x.cols();
  s.resize(n);
  xhat.resize(n, d);
  Eigen::MatrixXd out(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu = x.row(i).mean();
    const double var = (x.row(i).array() - mu).square().sum() / static_cast<double>(d);
    s(i) = std::sqrt(var + eps);
    xhat.row(i) = (x.row(i).array() - mu) / s(i);
    out.row(i) = xhat.row(i).cwiseProduct(gain.transpose()) + bias.transpose();
  }
  return out;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& scores) {
  Eigen::MatrixXd a(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const Eigen::ArrayXd shifted = scores.row(i).array() - scores.row(i).maxCoeff();
    const Eigen::ArrayXd e = shifted.exp();
    a.row(i) = e / e.sum();
  }
  return a;
}

Eigen::MatrixXd block_forward(const Eigen::MatrixXd& x, const BlockParams& bp,
                              const Hyperparams& hy, BlockCache& cache) {
  const Eigen::Index n = x.rows();
  const int dh = hy.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  cache.q.resize(hy.heads);
  cache.k.resize(hy.heads);
  cache.v.resize(hy.heads);
  cache.a.resize(hy.heads);
  cache.concat.resize(n, hy.dim);
  for (int h = 0; h < hy.heads; ++h) {
    cache.q[h] = x * bp.w_q[h];
    cache.k[h] = x * bp.w_k[h];
    cache.v[h] = x * bp.w_v[h];
    cache.a[h] = softmax_rows(cache.q[h] * cache.k[h].transpose() * scale);
    cache.concat.middleCols(static_cast<Eigen::Index>(h) * dh, dh) = cache.a[h] * cache.v[h];
  }

  const Eigen::MatrixXd r1 = x + cache.concat * bp.w_m;
  cache.h = layer_norm(r1, bp.ln1_gain, bp.ln1_bias, hy.ln_epsilon, cache.s1, cache.xhat1);

  cache.pre = (cache.h * bp.w_1).rowwise() + bp.b_1.transpose();
  cache.act = cache.pre.cwiseMax(0.0);
  const Eigen::MatrixXd r2 = cache.h + ((cache.act * bp.w_2).rowwise() + bp.b_2.transpose());
  cache.y = layer_norm(r2, bp.ln2_gain, bp.ln2_bias, hy.ln_epsilon, cache.s2, cache.xhat2);
  return cache.y;
}

Eigen::MatrixXd pool_ids(const std::vector<std::vector<int>>& token_ids,
                         const ScorerParams& params) {
  Eigen::MatrixXd x0(static_cast<Eigen::Index>(token_ids.size()), params.hyper.dim);
  for (std::size_t i = 0; i < token_ids.size(); ++i) {
    if (token_ids[i].empty()) throw std::invalid_argument("cannot pool an empty unit");
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(params.hyper.dim);
    for (int id : token_ids[i]) sum += params.embedding.row(id);
    x0.row(static_cast<Eigen::Index>(i)) = sum / static_cast<double>(token_ids[i].size());
  }
  return x0;
}

void forward_units(std::vector<std::vector<int>> token_ids, const ScorerParams& params,
                   ForwardCache& cache) {
  cache.token_ids = std::move(token_ids);
  cache.x0 = pool_ids(cache.token_ids, params);
  cache.blocks.assign(params.blocks.size(), BlockCache{});
  const Eigen::MatrixXd* x = &cache.x0;
  for (std::size_t l = 0; l < params.blocks.size(); ++l) {
    block_forward(*x, params.blocks[l], params.hyper, cache.blocks[l]);
    x = &cache.blocks[l].y;
  }
  cache.probs.resize(static_cast<std::size_t>(x->rows()));
  for (Eigen::Index i = 0; i < x->rows(); ++i)
    cache.probs[static_cast<std::size_t>(i)] = sigmoid(x->row(i).dot(params.w_o) + params.b_o);
}

// ---------------------------------------------------------------------------
// backward

// dOut -> dIn for y = gain * (x - mu)/s + bias, accumulating gain/bias grads.
Eigen::MatrixXd layer_norm_backward(const Eigen::MatrixXd& d_out, const Eigen::MatrixXd& xhat,
                                    const Eigen::VectorXd& s, const Eigen::VectorXd& gain,
                                    Eigen::VectorXd& d_gain, Eigen::VectorXd& d_bias) {
  const Eigen::Index n = d_out.rows(), d = d_out.cols();
  Eigen::MatrixXd d_in(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    d_gain += d_out.row(i).cwiseProduct(xhat.row(i)).transpose();
    d_bias += d_out.row(i).transpose();
    const Eigen::RowVectorXd d_xhat = d_out.row(i).cwiseProduct(gain.transpose());
    const double m1 = d_xhat.mean();
    const double m2 = d_xhat.cwiseProduct(xhat.row(i)).mean();
    d_in.row(i) = (d_xhat.array() - m1 - xhat.row(i).array() * m2) / s(i);
  }
  return d_in;
}

Eigen::MatrixXd block_backward(const Eigen::MatrixXd& x, const BlockCache& cache,
                               const BlockParams& bp, const Hyperparams& hy,
                               const Eigen::MatrixXd& d_y, BlockParams& bg) {
  const int dh = hy.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  const Eigen::MatrixXd d_r2 =
      layer_norm_backward(d_y, cache.xhat2, cache.s2, bp.ln2_gain, bg.ln2_gain, bg.ln2_bias);

  // residual: r2 = h + relu(h w1 + b1) w2 + b2
  Eigen::MatrixXd d_h = d_r2;
  bg.w_2 += cache.act.transpose() * d_r2;
  bg.b_2 += d_r2.colwise().sum().transpose();
  Eigen::MatrixXd d_pre = d_r2 * bp.w_2.transpose();
  d_pre = (cache.pre.array() > 0.0).select(d_pre, 0.0);
  bg.w_1 += cache.h.transpose() * d_pre;
  bg.b_1 += d_pre.colwise().sum().transpose();
  d_h += d_pre * bp.w_1.transpose();

  const Eigen::MatrixXd d_r1 =
      layer_norm_backward(d_h, cache.xhat1, cache.s1, bp.ln1_gain, bg.ln1_gain, bg.ln1_bias);

  // residual: r1 = x + concat(heads) w_m
  Eigen::MatrixXd d_x = d_r1;
  bg.w_m += cache.concat.transpose() * d_r1;
  const Eigen::MatrixXd d_concat = d_r1 * bp.w_m.transpose();
  for (int h = 0; h < hy.heads; ++h) {
    const auto d_oh = d_concat.middleCols(static_cast<Eigen::Index>(h) * dh, dh);
    const Eigen::MatrixXd d_a = d_oh * cache.v[h].transpose();
    const Eigen::MatrixXd d_v = cache.a[h].transpose() * d_oh;
    Eigen::MatrixXd d_s(d_a.rows(), d_a.cols());
    for (Eigen::Index i = 0; i < d_a.rows(); ++i) {
      const double dot = d_a.row(i).dot(cache.a[h].row(i));
      d_s.row(i) = cache.a[h].row(i).array() * (d_a.row(i).array() - dot);
    }
    d_s *= scale;
    const Eigen::MatrixXd d_q = d_s * cache.k[h];
    const Eigen::MatrixXd d_k = d_s.transpose() * cache.q[h];
    bg.w_q[h] += x.transpose() * d_q;
    bg.w_k[h] += x.transpose() * d_k;
    bg.w_v[h] += x.transpose() * d_v;
    d_x += d_q * bp.w_q[h].transpose() + d_k * bp.w_k[h].transpose() + d_v * bp.w_v[h].transpose();
  }
  return d_x;
}

// Accumulates d(scale * sum_i bce_i)/d(params) into grads and returns the
// summed (unscaled) loss over the cached units.
double backward_units(const ForwardCache& cache, const std::vector<std::uint8_t>& labels,
                      double scale, const ScorerParams& params, Gradients& grads) {
  const std::size_t n = cache.probs.size();
  if (labels.size() != n) throw std::invalid_argument("labels do not match units");
  const Eigen::MatrixXd& top = cache.blocks.empty() ? cache.x0 : cache.blocks.back().y;

  double loss = 0.0;
  Eigen::VectorXd dz(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double p = cache.probs[i];
    const double pc = clamp_prob(p);
    const double y = labels[i] ? 1.0 : 0.0;
    loss -= y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc);
    // where the clamp is active the loss is flat in the logit
    const bool inside = p > kProbEpsilon && p < 1.0 - kProbEpsilon;
    dz(static_cast<Eigen::Index>(i)) = inside ? scale * (p - y) : 0.0;
  }

  grads.w_o += top.transpose() * dz;
  grads.b_o += dz.sum();
  Eigen::MatrixXd d_x = dz * params.w_o.transpose();
  for (std::size_t l = params.blocks.size(); l-- > 0;) {
    const Eigen::MatrixXd& x_in = l == 0 ? cache.x0 : cache.blocks[l - 1].y;
    d_x = block_backward(x_in, cache.blocks[l], params.blocks[l], params.hyper, d_x,
                         grads.blocks[l]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double inv = 1.0 / static_cast<double>(cache.token_ids[i].size());
    for (int id : cache.token_ids[i])
      grads.embedding.row(id) += d_x.row(static_cast<Eigen::Index>(i)) * inv;
  }
  return loss;
}

// ---------------------------------------------------------------------------
// document plumbing

std::vector<int> fold_to_ids(const std::vector<std::string>& tokens, const ScorerParams& params) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(params.token_id(t));
  return ids;
}

// Indices into document_units(document, kind) whose units end within the
// first token_cap document tokens (cap 0 keeps everything).
std::vector<std::size_t> kept_unit_indices(const Document& document,
                                           const std::vector<Chunk>& units,
                                           std::size_t token_cap) {
  std::vector<std::size_t> offsets(document.sentences.size() + 1, 0);
  for (std::size_t s = 0; s < document.sentences.size(); ++s)
    offsets[s + 1] = offsets[s] + document.sentences[s].tokens.size();
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const std::size_t global_end = offsets[units[i].sentence_index] + units[i].span.end;
    if (token_cap == 0 || global_end <= token_cap) kept.push_back(i);
  }
  return kept;
}

struct DocBatch {
  std::vector<std::vector<int>> ids;
  std::vector<std::uint8_t> labels;
};

DocBatch make_batch(const Document& document, const ScorerParams& params, std::size_t token_cap) {
  const auto units = document_units(document, UnitKind::Chunk);
  const auto labels = document_labels(document);
  if (labels.size() != units.size())
    throw std::invalid_argument("document " + document.id + ": labels do not match chunks");
  DocBatch batch;
  for (std::size_t i : kept_unit_indices(document, units, token_cap)) {
    batch.ids.push_back(fold_to_ids(units[i].tokens, params));
    batch.labels.push_back(labels[i]);
  }
  return batch;
}

// ---------------------------------------------------------------------------
// serialization helpers

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("truncated model file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated model file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

}  // namespace

// ---------------------------------------------------------------------------
// public API

int ScorerParams::token_id(const std::string& token) const {
  const auto it = vocab.find(rouge::fold_token(token));
  return it == vocab.end() ? kUnkId : it->second;
}

std::vector<std::string> build_vocab(const Corpus& corpus) {
  std::set<std::string> folded;
  for (const auto& doc : corpus)
    for (const auto& sentence : doc.sentences)
      for (const auto& token : sentence.tokens) folded.insert(rouge::fold_token(token));
  folded.erase(kUnkToken);
  std::vector<std::string> vocab;
  vocab.reserve(folded.size() + 1);
  vocab.push_back(kUnkToken);
  vocab.insert(vocab.end(), folded.begin(), folded.end());
  return vocab;
}

ScorerParams init_params(std::vector<std::string> vocab_tokens, const Hyperparams& hyper,
                         std::uint64_t seed) {
  ScorerParams p = allocate_params(std::move(vocab_tokens), hyper);
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hyper.dim));
  std::uniform_real_distribution<double> dist(-bound, bound);
  auto fill = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
  };
  fill(p.embedding);
  for (auto& b : p.blocks) {
    for (auto& m : b.w_q) fill(m);
    for (auto& m : b.w_k) fill(m);
    for (auto& m : b.w_v) fill(m);
    fill(b.w_m);
    fill(b.w_1);
    fill(b.w_2);
    b.ln1_gain.setOnes();
    b.ln2_gain.setOnes();
  }
  for (Eigen::Index i = 0; i < p.w_o.size(); ++i) p.w_o(i) = dist(rng);
  return p;
}

Eigen::VectorXd embed_and_pool(const std::vector<std::string>& chunk_tokens,
                               const ScorerParams& params) {
  if (chunk_tokens.empty()) throw std::invalid_argument("cannot pool an empty unit");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(params.hyper.dim);
  for (const auto& token : chunk_tokens)
    sum += params.embedding.row(params.token_id(token)).transpose();
  return sum / static_cast<double>(chunk_tokens.size());
}

Eigen::MatrixXd transformer_block(const Eigen::MatrixXd& pooled, const ScorerParams& params) {
  if (pooled.cols() != params.hyper.dim)
    throw std::invalid_argument("input width does not match model dim");
  Eigen::MatrixXd x = pooled;
  BlockCache scratch;
  for (const auto& block : params.blocks) x = block_forward(x, block, params.hyper, scratch);
  return x;
}

double predict_prob(const Eigen::VectorXd& unit_repr, const ScorerParams& params) {
  if (unit_repr.size() != params.w_o.size())
    throw std::invalid_argument("representation width does not match model dim");
  return sigmoid(unit_repr.dot(params.w_o) + params.b_o);
}

double bce_loss(const std::vector<double>& probs, const std::vector<std::uint8_t>& labels) {
  if (probs.size() != labels.size()) throw std::invalid_argument("probs and labels differ in size");
  if (probs.empty()) throw std::invalid_argument("bce_loss needs at least one unit");
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double pc = clamp_prob(probs[i]);
    total -= labels[i] ? std::log(pc) : std::log(1.0 - pc);
  }
  return total / static_cast<double>(probs.size());
}

std::vector<double> score_units(const std::vector<std::vector<std::string>>& unit_tokens,
                                const ScorerParams& params) {
  if (unit_tokens.empty()) return {};
  std::vector<std::vector<int>> ids;
  ids.reserve(unit_tokens.size());
  for (const auto& tokens : unit_tokens) ids.push_back(fold_to_ids(tokens, params));
  ForwardCache cache;
  forward_units(std::move(ids), params, cache);
  return cache.probs;
}

std::vector<scorers::ScoredUnit> score_document(const Document& document, UnitKind kind,
                                                const ScorerParams& params,
                                                std::size_t token_cap) {
  const auto units = document_units(document, kind);
  const auto kept = kept_unit_indices(document, units, token_cap);
  if (kept.empty()) return {};
  std::vector<std::vector<int>> ids;
  ids.reserve(kept.size());
  for (std::size_t i : kept) ids.push_back(fold_to_ids(units[i].tokens, params));
  ForwardCache cache;
  forward_units(std::move(ids), params, cache);
  std::vector<scorers::ScoredUnit> scored;
  scored.reserve(kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) scored.push_back({kept[j], cache.probs[j]});
  return scored;
}

ScorerParams train(const Corpus& corpus, ScorerParams params, const TrainOptions& options) {
  std::vector<DocBatch> batches;
  std::size_t total_units = 0;
  for (const auto& doc : corpus) {
    DocBatch batch = make_batch(doc, params, options.token_cap);
    total_units += batch.ids.size();
    if (!batch.ids.empty()) batches.push_back(std::move(batch));
  }
  if (total_units == 0) throw std::invalid_argument("no trainable units in corpus");
  const double scale = 1.0 / static_cast<double>(total_units);

  Gradients grads = make_gradients(params);
  auto param_views = tensor_views(params);
  auto grad_views = tensor_views(grads);

  // Adam first/second moment state, laid out like the parameter views.
  std::vector<std::vector<double>> adam_m, adam_v;
  if (options.optimizer == TrainOptions::Optimizer::Adam) {
    for (const auto& view : param_views) {
      adam_m.emplace_back(view.size, 0.0);
      adam_v.emplace_back(view.size, 0.0);
    }
  }

  ForwardCache cache;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    zero_gradients(grads);
    double loss = 0.0;
    for (const auto& batch : batches) {
      forward_units(batch.ids, params, cache);
      loss += backward_units(cache, batch.labels, scale, params, grads);
    }
    loss *= scale;
    if (!std::isfinite(loss)) throw TrainingDivergence(epoch);

    if (options.optimizer == TrainOptions::Optimizer::GradientDescent) {
      for (std::size_t t = 0; t < param_views.size(); ++t)
        for (std::size_t j = 0; j < param_views[t].size; ++j)
          param_views[t].data[j] -= options.learning_rate * grad_views[t].data[j];
    } else {
      const double step = static_cast<double>(epoch + 1);
      const double bias1 = 1.0 - std::pow(options.adam_beta1, step);
      const double bias2 = 1.0 - std::pow(options.adam_beta2, step);
      for (std::size_t t = 0; t < param_views.size(); ++t) {
        for (std::size_t j = 0; j < param_views[t].size; ++j) {
          const double g = grad_views[t].data[j];
          double& m = adam_m[t][j];
          double& v = adam_v[t][j];
          m = options.adam_beta1 * m + (1.0 - options.adam_beta1) * g;
          v = options.adam_beta2 * v + (1.0 - options.adam_beta2) * g * g;
          param_views[t].data[j] -=
              options.learning_rate * (m / bias1) / (std::sqrt(v / bias2) + options.adam_epsilon);
        }
      }
    }
  }
  return params;
}

double corpus_loss(const Corpus& corpus, const ScorerParams& params, std::size_t token_cap) {
  double total = 0.0;
  std::size_t total_units = 0;
  ForwardCache cache;
  for (const auto& doc : corpus) {
    const DocBatch batch = make_batch(doc, params, token_cap);
    if (batch.ids.empty()) continue;
    forward_units(batch.ids, params, cache);
    for (std::size_t i = 0; i < cache.probs.size(); ++i) {
      const double pc = clamp_prob(cache.probs[i]);
      total -= batch.labels[i] ? std::log(pc) : std::log(1.0 - pc);
    }
    total_units += batch.ids.size();
  }
  if (total_units == 0) throw std::invalid_argument("no labeled units in corpus");
  return total / static_cast<double>(total_units);
}

double grad_check(const ScorerParams& params, const Document& document, double eps) {
  ScorerParams work = params;
  const DocBatch batch = make_batch(document, work, 0);
  if (batch.ids.empty()) throw std::invalid_argument("document has no labeled units");
  const double scale = 1.0 / static_cast<double>(batch.ids.size());

  Gradients grads = make_gradients(work);
  ForwardCache cache;
  forward_units(batch.ids, work, cache);
  backward_units(cache, batch.labels, scale, work, grads);

  auto doc_loss = [&]() {
    forward_units(batch.ids, work, cache);
    double total = 0.0;
    for (std::size_t i = 0; i < cache.probs.size(); ++i) {
      const double pc = clamp_prob(cache.probs[i]);
      total -= batch.labels[i] ? std::log(pc) : std::log(1.0 - pc);
    }
    return total * scale;
  };

  auto param_views = tensor_views(work);
  auto grad_views = tensor_views(grads);
  double worst = 0.0;
  for (std::size_t t = 0; t < param_views.size(); ++t) {
    for (std::size_t j = 0; j < param_views[t].size; ++j) {
      const double saved = param_views[t].data[j];
      param_views[t].data[j] = saved + eps;
      const double plus = doc_loss();
      param_views[t].data[j] = saved - eps;
      const double minus = doc_loss();
      param_views[t].data[j] = saved;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double analytic = grad_views[t].data[j];
      const double denom = std::max(std::abs(analytic), std::abs(numeric));
      // a flat direction has both sides ~0; compare absolutely there
      const double err = denom < 1e-8 ? std::abs(analytic - numeric)
                                      : std::abs(analytic - numeric) / denom;
      worst = std::max(worst, err);
    }
  }
  return worst;
}

void save_params(const ScorerParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kFormatVersion);
  write_u32(out, static_cast<std::uint32_t>(params.hyper.dim));
  write_u32(out, static_cast<std::uint32_t>(params.hyper.ffn_dim));
  write_u32(out, static_cast<std::uint32_t>(params.hyper.heads));
  write_u32(out, static_cast<std::uint32_t>(params.hyper.layers));
  write_f64(out, params.hyper.ln_epsilon);
  write_u64(out, params.id_to_token.size());
  for (const auto& token : params.id_to_token) {
    write_u32(out, static_cast<std::uint32_t>(token.size()));
    out.write(token.data(), static_cast<std::streamsize>(token.size()));
  }
  auto write_mat = [&out](const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) write_f64(out, m(r, c));
  };
  auto write_vec = [&out](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) write_f64(out, v(i));
  };
  write_mat(params.embedding);
  for (const auto& b : params.blocks) {
    for (const auto& m : b.w_q) write_mat(m);
    for (const auto& m : b.w_k) write_mat(m);
    for (const auto& m : b.w_v) write_mat(m);
    write_mat(b.w_m);
    write_mat(b.w_1);
    write_vec(b.b_1);
    write_mat(b.w_2);
    write_vec(b.b_2);
    write_vec(b.ln1_gain);
    write_vec(b.ln1_bias);
    write_vec(b.ln2_gain);
    write_vec(b.ln2_bias);
  }
  write_vec(params.w_o);
  write_f64(out, params.b_o);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ScorerParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error(path.string() + " is not a scorer model file (bad magic)");
  if (const auto version = read_u32(in); version != kFormatVersion)
    throw std::runtime_error("unsupported model format version " + std::to_string(version));

  Hyperparams hyper;
  hyper.dim = static_cast<int>(read_u32(in));
  hyper.ffn_dim = static_cast<int>(read_u32(in));
  hyper.heads = static_cast<int>(read_u32(in));
  hyper.layers = static_cast<int>(read_u32(in));
  hyper.ln_epsilon = read_f64(in);
  const std::uint64_t vocab_size = read_u64(in);
  std::vector<std::string> vocab_tokens;
  vocab_tokens.reserve(vocab_size);
  for (std::uint64_t i = 0; i < vocab_size; ++i) {
    const std::uint32_t len = read_u32(in);
    std::string token(len, '\0');
    if (len > 0 && !in.read(token.data(), len)) throw std::runtime_error("truncated model file");
    vocab_tokens.push_back(std::move(token));
  }

  ScorerParams params = allocate_params(std::move(vocab_tokens), hyper);
  auto read_mat = [&in](Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = read_f64(in);
  };
  auto read_vec = [&in](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = read_f64(in);
  };
  read_mat(params.embedding);
  for (auto& b : params.blocks) {
    for (auto& m : b.w_q) read_mat(m);
    for (auto& m : b.w_k) read_mat(m);
    for (auto& m : b.w_v) read_mat(m);
    read_mat(b.w_m);
    read_mat(b.w_1);
    read_vec(b.b_1);
    read_mat(b.w_2);
    read_vec(b.b_2);
    read_vec(b.ln1_gain);
    read_vec(b.ln1_bias);
    read_vec(b.ln2_gain);
    read_vec(b.ln2_bias);
  }
  read_vec(params.w_o);
  params.b_o = read_f64(in);
  if (in.peek() != std::char_traits<char>::eof())
    throw std::runtime_error(path.string() + " has trailing data");
  return params;
}

}  // namespace subsum::neural

#pragma once

// Text preprocessing and the shared embedding trainer: vocabulary,
// skip-gram with negative sampling, and PV-DBOW paragraph vectors.
// Metadata, directory-tree walks and code path contexts all go through
// these routines.

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "repo2vec/common.hpp"
#include "repo2vec/corpus.hpp"
#include "repo2vec/vector_io.hpp"

namespace repo2vec {

// ---------------------------------------------------------------------------
// Preprocessing

inline constexpr std::string_view kStopwordListVersion = "en-1";

inline constexpr std::string_view kStopwords[] = {
#include "repo2vec/data/stopwords_en_v1.inc"
};

inline bool is_stopword(std::string_view token) {
  return std::binary_search(std::begin(kStopwords), std::end(kStopwords), token);
}

using TokenSequence = std::vector<std::string>;

namespace detail {

inline bool looks_like_url(std::string_view t) {
  return t.find("://") != std::string_view::npos || t.rfind("www.", 0) == 0;
}

inline bool looks_like_email(std::string_view t) {
  const auto at = t.find('@');
  return at != std::string_view::npos && at > 0 && t.find('.', at) != std::string_view::npos;
}

inline bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
}

inline bool all_digits(std::string_view t) {
  return std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace detail

/// Lowercases, drops URL- and email-shaped tokens, splits on special
/// characters, then drops pure numbers and stopwords.
inline TokenSequence preprocess(std::string_view raw) {
  TokenSequence out;
  std::string lowered(raw);
  for (auto& c : lowered) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  std::size_t i = 0;
  while (i < lowered.size()) {
    while (i < lowered.size() && std::isspace(static_cast<unsigned char>(lowered[i]))) ++i;
    std::size_t j = i;
    while (j < lowered.size() && !std::isspace(static_cast<unsigned char>(lowered[j]))) ++j;
    const std::string_view raw_token(lowered.data() + i, j - i);
    i = j;
    if (raw_token.empty() || detail::looks_like_url(raw_token) || detail::looks_like_email(raw_token)) {
      continue;
    }
    std::string piece;
    auto flush = [&] {
      if (!piece.empty() && !detail::all_digits(piece) && !is_stopword(piece)) {
        out.push_back(piece);
      }
      piece.clear();
    };
    for (unsigned char c : raw_token) {
      if (detail::is_word_byte(c)) {
        piece.push_back(static_cast<char>(c));
      } else {
        flush();
      }
    }
    flush();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Configuration

struct EmbedConfig {
  std::size_t dim = 128;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 20;
  double initial_lr = 0.025;
  std::size_t min_count = 1;
  std::uint64_t seed = 1;

  void validate() const {
    if (dim < 1) throw InvalidArgument("EmbedConfig: dim must be >= 1");
    if (negatives < 1) throw InvalidArgument("EmbedConfig: negatives must be >= 1");
    if (epochs < 1) throw InvalidArgument("EmbedConfig: epochs must be >= 1");
    if (!(initial_lr > 0.0)) throw InvalidArgument("EmbedConfig: initial_lr must be > 0");
    if (window < 1) throw InvalidArgument("EmbedConfig: window must be >= 1");
  }

  friend bool operator==(const EmbedConfig&, const EmbedConfig&) = default;
};

// ---------------------------------------------------------------------------
// Vocabulary

class Vocabulary {
public:
  Vocabulary() = default;

  /// Counts tokens and keeps those seen at least min_count times. Indices
  /// are assigned by descending count, ties by token.
  static Vocabulary build(std::span<const TokenSequence> sequences, std::size_t min_count) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& seq : sequences) {
      for (const auto& t : seq) ++counts[t];
    }
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (auto& [tok, c] : counts) {
      if (c >= min_count) kept.emplace_back(tok, c);
    }
    std::stable_sort(kept.begin(), kept.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    Vocabulary v;
    for (auto& [tok, c] : kept) v.add(std::move(tok), c);
    v.build_sampling_table();
    return v;
  }

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  std::uint64_t count(std::size_t i) const { return counts_.at(i); }

  /// Index of a token, or -1 when it was pruned or never seen.
  std::int64_t index(std::string_view t) const {
    const auto it = index_.find(std::string(t));
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
  }

  std::vector<std::size_t> encode(const TokenSequence& seq) const {
    std::vector<std::size_t> ids;
    ids.reserve(seq.size());
    for (const auto& t : seq) {
      const auto i = index(t);
      if (i >= 0) ids.push_back(static_cast<std::size_t>(i));
    }
    return ids;
  }

  /// Draws a token index from the unigram distribution raised to 0.75.
  std::size_t sample_negative(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), size() - 1);
  }

  /// Probability of drawing index i as a negative.
  double negative_probability(std::size_t i) const {
    const double prev = i == 0 ? 0.0 : cumulative_[i - 1];
    return (cumulative_[i] - prev) / cumulative_.back();
  }

  void add(std::string token, std::uint64_t count) {
    index_.emplace(token, tokens_.size());
    tokens_.push_back(std::move(token));
    counts_.push_back(count);
  }

  void build_sampling_table() {
    cumulative_.assign(tokens_.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      acc += std::pow(static_cast<double>(counts_[i]), 0.75);
      cumulative_[i] = acc;
    }
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.counts_ == b.counts_;
  }

private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> cumulative_;
};

// ---------------------------------------------------------------------------
// Dense row-major matrix

class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  /// word2vec-style initialization: uniform in [-0.5, 0.5) / cols.
  void randomize(Rng& rng) {
    for (auto& x : data_) x = (rng.uniform() - 0.5) / static_cast<double>(cols_);
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Negative-sampling objective

/// One scored output row: label 1 for the observed token, 0 for noise.
struct NsTarget {
  std::size_t row;
  double label;
};

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// -log σ(u·v) for positives plus -log σ(-u·v) for negatives.
inline double ns_loss(std::span<const double> input, const Matrix& output,
                      std::span<const NsTarget> targets) {
  double loss = 0.0;
  for (const auto& t : targets) {
    const double s = dot(input, output.row(t.row));
    // log σ(x) = -log1p(exp(-x)), evaluated stably
    auto log_sigmoid = [](double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); };
    loss -= t.label * log_sigmoid(s) + (1.0 - t.label) * log_sigmoid(-s);
  }
  return loss;
}

/// Analytic gradient of ns_loss. grad_outputs holds one row per target
/// (same order as targets); repeated rows are not merged.
inline void ns_gradient(std::span<const double> input, const Matrix& output,
                        std::span<const NsTarget> targets, std::span<double> grad_input,
                        Matrix& grad_outputs) {
  std::fill(grad_input.begin(), grad_input.end(), 0.0);
  grad_outputs = Matrix(targets.size(), input.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto u = output.row(targets[k].row);
    const double g = sigmoid(dot(input, u)) - targets[k].label;
    auto go = grad_outputs.row(k);
    for (std::size_t d = 0; d < input.size(); ++d) {
      grad_input[d] += g * u[d];
      go[d] = g * input[d];
    }
  }
}

namespace detail {

// Dot product with four independent partial sums; the training loops spend
// most of their time here.
inline double dot4(std::span<const double> a, std::span<const double> b) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= a.size(); i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < a.size(); ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace detail

/// One gradient-descent step on ns_loss, all partial derivatives taken
/// at the current parameters.
inline void ns_step(std::span<double> input, Matrix& output, std::span<const NsTarget> targets,
                    double lr, bool update_input = true, bool update_output = true,
                    std::vector<double>* scratch = nullptr) {
  std::vector<double> local;
  std::vector<double>& grad_in = scratch ? *scratch : local;
  grad_in.assign(input.size(), 0.0);
  thread_local std::vector<double> coeff;
  coeff.resize(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto u = output.row(targets[k].row);
    coeff[k] = sigmoid(detail::dot4(input, u)) - targets[k].label;
    for (std::size_t d = 0; d < input.size(); ++d) grad_in[d] += coeff[k] * u[d];
  }
  if (update_output) {
    for (std::size_t k = 0; k < targets.size(); ++k) {
      auto u = output.row(targets[k].row);
      for (std::size_t d = 0; d < input.size(); ++d) u[d] -= lr * coeff[k] * input[d];
    }
  }
  if (update_input) {
    for (std::size_t d = 0; d < input.size(); ++d) input[d] -= lr * grad_in[d];
  }
}

namespace detail {

/// Learning rate after `done` of `total` work units: linear decay from
/// initial_lr down to initial_lr / 10,000.
inline double decayed_lr(double initial, std::uint64_t done, std::uint64_t total) {
  const double frac = total == 0 ? 0.0 : static_cast<double>(done) / static_cast<double>(total);
  return initial * std::max(1.0 - frac, 1e-4);
}

inline void fill_targets(std::vector<NsTarget>& targets, std::size_t positive,
                         const Vocabulary& vocab, std::size_t negatives, Rng& rng) {
  targets.clear();
  targets.push_back({positive, 1.0});
  for (std::size_t n = 0; n < negatives; ++n) {
    const auto neg = vocab.sample_negative(rng);
    if (neg == positive) continue;
    targets.push_back({neg, 0.0});
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Skip-gram

struct WordModel {
  Vocabulary vocab;
  Matrix input;   // V x dim, the word vectors
  Matrix output;  // V x dim, negative-sampling output weights

  Embedding vector(std::string_view token) const {
    const auto i = vocab.index(token);
    if (i < 0) throw InvalidArgument("unknown token: " + std::string(token));
    const auto r = input.row(static_cast<std::size_t>(i));
    return {r.begin(), r.end()};
  }
};

namespace detail {

inline void skipgram_pass(const std::vector<std::size_t>& ids, std::size_t window,
                          const Vocabulary& vocab, std::size_t negatives, Matrix& input,
                          Matrix& output, double lr, Rng& rng, std::vector<NsTarget>& targets,
                          std::vector<double>& scratch) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::size_t lo = i >= window ? i - window : 0;
    const std::size_t hi = std::min(ids.size(), i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (j == i) continue;
      fill_targets(targets, ids[j], vocab, negatives, rng);
      ns_step(input.row(ids[i]), output, targets, lr, true, true, &scratch);
    }
  }
}

}  // namespace detail

/// Skip-gram with negative sampling. Deterministic for a fixed seed.
inline WordModel train_skipgram(std::span<const TokenSequence> sequences, const EmbedConfig& config) {
  config.validate();
  WordModel m;
  m.vocab = Vocabulary::build(sequences, config.min_count);
  if (m.vocab.empty()) throw DataError("train_skipgram: empty vocabulary after pruning");

  std::vector<std::vector<std::size_t>> encoded;
  std::uint64_t total_tokens = 0;
  for (const auto& s : sequences) {
    encoded.push_back(m.vocab.encode(s));
    total_tokens += encoded.back().size();
  }

  Rng rng(config.seed);
  m.input = Matrix(m.vocab.size(), config.dim);
  m.input.randomize(rng);
  m.output = Matrix(m.vocab.size(), config.dim);

  const std::uint64_t total = total_tokens * config.epochs;
  std::uint64_t done = 0;
  std::vector<NsTarget> targets;
  std::vector<double> scratch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& ids : encoded) {
      const double lr = detail::decayed_lr(config.initial_lr, done, total);
      detail::skipgram_pass(ids, config.window, m.vocab, config.negatives, m.input, m.output, lr,
                            rng, targets, scratch);
      done += ids.size();
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// PV-DBOW

using Document = std::pair<std::string, TokenSequence>;

/// Trained paragraph-vector model: word vectors, shared output weights and
/// one vector per training document.
class DocModel {
public:
  EmbedConfig config;
  Vocabulary vocab;
  Matrix word_input;
  Matrix word_output;
  std::vector<std::string> doc_ids;
  Matrix doc_vectors;

  std::size_t dim() const { return config.dim; }

  std::span<const double> find(std::string_view doc_id) const {
    const auto it = doc_index_.find(std::string(doc_id));
    if (it == doc_index_.end()) return {};
    return doc_vectors.row(it->second);
  }

  bool contains(std::string_view doc_id) const { return doc_index_.count(std::string(doc_id)) > 0; }

  /// Vector of a training document.
  Embedding vector(std::string_view doc_id) const {
    const auto it = doc_index_.find(std::string(doc_id));
    if (it == doc_index_.end()) throw InvalidArgument("unknown document: " + std::string(doc_id));
    const auto r = doc_vectors.row(it->second);
    return {r.begin(), r.end()};
  }

  /// Vector for an unseen document: output weights frozen, only a fresh
  /// document vector is trained. The seed is derived from the token
  /// content, so equal documents infer equal vectors.
  Embedding infer(const TokenSequence& tokens) const {
    Embedding v(dim(), 0.0);
    const auto ids = vocab.encode(tokens);
    if (ids.empty()) return v;
    std::string key;
    for (const auto& t : tokens) {
      key += t;
      key += '\x1f';
    }
    Rng rng(derive_seed(config.seed, "infer:" + std::to_string(fnv1a64(key))));
    for (auto& x : v) x = (rng.uniform() - 0.5) / static_cast<double>(dim());
    Matrix frozen = word_output;
    const std::uint64_t total = ids.size() * config.epochs;
    std::uint64_t done = 0;
    std::vector<NsTarget> targets;
    std::vector<double> scratch;
    for (std::size_t e = 0; e < config.epochs; ++e) {
      const double lr = detail::decayed_lr(config.initial_lr, done, total);
      for (auto id : ids) {
        detail::fill_targets(targets, id, vocab, config.negatives, rng);
        ns_step(v, frozen, targets, lr, true, false, &scratch);
      }
      done += ids.size();
    }
    return v;
  }

  /// Training vector when doc_id is known, otherwise inference.
  Embedding vector_or_infer(std::string_view doc_id, const TokenSequence& tokens) const {
    if (contains(doc_id)) return vector(doc_id);
    return infer(tokens);
  }

  void reindex() {
    doc_index_.clear();
    for (std::size_t i = 0; i < doc_ids.size(); ++i) doc_index_.emplace(doc_ids[i], i);
  }

  std::vector<LabelledVector> doc_rows() const {
    std::vector<LabelledVector> rows;
    for (std::size_t i = 0; i < doc_ids.size(); ++i) {
      const auto r = doc_vectors.row(i);
      rows.emplace_back(doc_ids[i], Embedding(r.begin(), r.end()));
    }
    return rows;
  }

  friend bool operator==(const DocModel& a, const DocModel& b) {
    return a.config == b.config && a.vocab == b.vocab && a.word_input == b.word_input &&
           a.word_output == b.word_output && a.doc_ids == b.doc_ids && a.doc_vectors == b.doc_vectors;
  }

private:
  std::unordered_map<std::string, std::size_t> doc_index_;
};

struct PvDbowOptions {
  /// Also train word vectors with skip-gram over each document, sharing
  /// the output weights with the document objective.
  bool train_words = true;
};

/// PV-DBOW: each document vector is trained to predict the words of its
/// own document against negative samples. Documents whose tokens are all
/// pruned keep the zero vector. Doc ids must be unique.
inline DocModel train_pvdbow(std::span<const Document> docs, const EmbedConfig& config,
                             const PvDbowOptions& options = {}) {
  config.validate();
  DocModel m;
  m.config = config;
  std::vector<TokenSequence> seqs;
  seqs.reserve(docs.size());
  for (const auto& d : docs) seqs.push_back(d.second);
  m.vocab = Vocabulary::build(seqs, config.min_count);
  if (m.vocab.empty()) throw DataError("train_pvdbow: all documents are empty");

  std::vector<std::vector<std::size_t>> encoded;
  std::uint64_t total_tokens = 0;
  for (const auto& s : seqs) {
    encoded.push_back(m.vocab.encode(s));
    total_tokens += encoded.back().size();
  }

  Rng rng(config.seed);
  m.word_input = Matrix(m.vocab.size(), config.dim);
  m.word_input.randomize(rng);
  m.word_output = Matrix(m.vocab.size(), config.dim);
  m.doc_vectors = Matrix(docs.size(), config.dim);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    m.doc_ids.push_back(docs[i].first);
    if (encoded[i].empty()) continue;
    for (auto& x : m.doc_vectors.row(i)) x = (rng.uniform() - 0.5) / static_cast<double>(config.dim);
  }
  m.reindex();
  if (std::set<std::string>(m.doc_ids.begin(), m.doc_ids.end()).size() != docs.size()) {
    throw InvalidArgument("train_pvdbow: duplicate document id");
  }

  const std::uint64_t total = total_tokens * config.epochs;
  std::uint64_t done = 0;
  std::vector<NsTarget> targets;
  std::vector<double> scratch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = 0; i < encoded.size(); ++i) {
      const auto& ids = encoded[i];
      if (ids.empty()) continue;
      const double lr = detail::decayed_lr(config.initial_lr, done, total);
      auto dv = m.doc_vectors.row(i);
      for (auto id : ids) {
        detail::fill_targets(targets, id, m.vocab, config.negatives, rng);
        ns_step(dv, m.word_output, targets, lr, true, true, &scratch);
      }
      if (options.train_words) {
        detail::skipgram_pass(ids, config.window, m.vocab, config.negatives, m.word_input,
                              m.word_output, lr, rng, targets, scratch);
      }
      done += ids.size();
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Metadata embedding

/// Preprocessed metadata document of a repository.
inline TokenSequence meta_tokens(const MetaDocument& meta) { return preprocess(meta.concatenated()); }

/// Metadata vector M of a repository: its trained document vector, or an
/// inferred one when the model was trained on another corpus.
inline Embedding meta2vec(const RepoRecord& record, const DocModel& model) {
  const auto tokens = meta_tokens(record.meta);
  if (tokens.empty()) return Embedding(model.dim(), 0.0);
  return model.vector_or_infer(record.repo_id, tokens);
}

inline DocModel train_meta_model(std::span<const RepoRecord> records, const EmbedConfig& config) {
  std::vector<Document> docs;
  docs.reserve(records.size());
  for (const auto& r : records) docs.emplace_back(r.repo_id, meta_tokens(r.meta));
  return train_pvdbow(docs, config);
}

// ---------------------------------------------------------------------------
// Model file
//
// Little-endian binary layout:
//   char[4]  magic "R2VD"
//   u32      version (1)
//   u32      dim
//   u32      vocabulary size V
//   u32      document count D
//   u32      window, negatives, epochs, min_count
//   f64      initial_lr
//   u64      seed
//   V x { u32 byte length, bytes, u64 count }
//   V*dim f64 word vectors, row-major
//   V*dim f64 output weights, row-major
//   D x { u32 byte length, bytes }
//   D*dim f64 document vectors, row-major

inline constexpr char kModelMagic[4] = {'R', '2', 'V', 'D'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

static_assert(std::endian::native == std::endian::little, "model IO assumes little-endian host");

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw DataError("model file truncated");
  return v;
}

inline void put_string(std::ostream& out, const std::string& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in) {
  const auto n = get<std::uint32_t>(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw DataError("model file truncated");
  return s;
}

inline void put_matrix(std::ostream& out, const Matrix& m) {
  out.write(reinterpret_cast<const char*>(m.data().data()),
            static_cast<std::streamsize>(m.data().size() * sizeof(double)));
}

inline Matrix get_matrix(std::istream& in, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data().data()),
          static_cast<std::streamsize>(m.data().size() * sizeof(double)));
  if (!in) throw DataError("model file truncated");
  return m;
}

}  // namespace detail

inline void save_model(std::ostream& out, const DocModel& m) {
  using detail::put;
  out.write(kModelMagic, 4);
  put<std::uint32_t>(out, kModelVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.config.dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.vocab.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.doc_ids.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.config.window));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.config.negatives));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.config.epochs));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.config.min_count));
  put<double>(out, m.config.initial_lr);
  put<std::uint64_t>(out, m.config.seed);
  for (std::size_t i = 0; i < m.vocab.size(); ++i) {
    detail::put_string(out, m.vocab.token(i));
    put<std::uint64_t>(out, m.vocab.count(i));
  }
  detail::put_matrix(out, m.word_input);
  detail::put_matrix(out, m.word_output);
  for (const auto& id : m.doc_ids) detail::put_string(out, id);
  detail::put_matrix(out, m.doc_vectors);
}

inline DocModel load_model(std::istream& in) {
  using detail::get;
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kModelMagic, 4) != 0) throw DataError("not a repo2vec model file");
  if (get<std::uint32_t>(in) != kModelVersion) throw DataError("unsupported model version");
  DocModel m;
  m.config.dim = get<std::uint32_t>(in);
  const std::size_t vocab_size = get<std::uint32_t>(in);
  const std::size_t doc_count = get<std::uint32_t>(in);
  m.config.window = get<std::uint32_t>(in);
  m.config.negatives = get<std::uint32_t>(in);
  m.config.epochs = get<std::uint32_t>(in);
  m.config.min_count = get<std::uint32_t>(in);
  m.config.initial_lr = get<double>(in);
  m.config.seed = get<std::uint64_t>(in);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    auto tok = detail::get_string(in);
    m.vocab.add(std::move(tok), get<std::uint64_t>(in));
  }
  m.vocab.build_sampling_table();
  m.word_input = detail::get_matrix(in, vocab_size, m.config.dim);
  m.word_output = detail::get_matrix(in, vocab_size, m.config.dim);
  for (std::size_t i = 0; i < doc_count; ++i) m.doc_ids.push_back(detail::get_string(in));
  m.doc_vectors = detail::get_matrix(in, doc_count, m.config.dim);
  m.reindex();
  return m;
}

inline void save_model(const std::filesystem::path& path, const DocModel& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  save_model(out, m);
}

inline DocModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return load_model(in);
}

}  // namespace repo2vec

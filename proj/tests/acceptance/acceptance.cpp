// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "repo2vec/repo2vec.hpp"
#include "test_support.hpp"

using namespace repo2vec;
namespace fs = std::filesystem;
using testing_support::central_difference;
using testing_support::gaussian;
using testing_support::relative_error;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  std::ostringstream o;
  o.precision(4);
  o << x;
  return o.str();
}

// ---------------------------------------------------------------------------
// 1. Gradients

Outcome gradient_correctness() {
  constexpr std::size_t kDim = 8;
  const std::vector<TokenSequence> text{{"alpha", "beta", "gamma", "delta", "alpha", "beta", "eps"},
                                        {"zeta", "eta", "theta", "alpha", "gamma", "beta", "alpha"}};
  const auto vocab = Vocabulary::build(text, 1);
  Rng rng(2024);
  double worst = 0.0;
  std::size_t checked = 0;

  // Analytic gradient and the update ns_step applies (read back with lr = 1)
  // against central differences of the loss.
  auto check = [&](const std::vector<double>& input, const Matrix& output, const std::vector<NsTarget>& targets) {
    std::vector<double> grad_in(input.size());
    Matrix grad_out;
    ns_gradient(input, output, targets, grad_in, grad_out);
    auto stepped_in = input;
    Matrix stepped_out = output;
    ns_step(stepped_in, stepped_out, targets, 1.0);

    for (std::size_t i = 0; i < input.size(); ++i) {
      const double fd = central_difference([&](const std::vector<double>& x) { return ns_loss(x, output, targets); },
                                           input, i);
      worst = std::max({worst, relative_error(grad_in[i], fd), relative_error(input[i] - stepped_in[i], fd)});
      ++checked;
    }
    for (std::size_t row = 0; row < output.rows(); ++row) {
      for (std::size_t d = 0; d < output.cols(); ++d) {
        double analytic = 0.0;
        for (std::size_t k = 0; k < targets.size(); ++k) {
          if (targets[k].row == row) analytic += grad_out.row(k)[d];
        }
        const double fd = central_difference(
            [&](const std::vector<double>& flat) {
              Matrix m = output;
              m.data() = flat;
              return ns_loss(input, m, targets);
            },
            output.data(), row * output.cols() + d);
        const double stepped = output.row(row)[d] - stepped_out.row(row)[d];
        worst = std::max({worst, relative_error(analytic, fd), relative_error(stepped, fd)});
        ++checked;
      }
    }
  };

  auto random_matrix = [&](std::size_t rows) {
    Matrix m(rows, kDim);
    for (auto& x : m.data()) x = rng.uniform() - 0.5;
    return m;
  };
  std::vector<NsTarget> targets;
  // skip-gram: centre word vector against context/noise output rows
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix input = random_matrix(vocab.size());
    const Matrix output = random_matrix(vocab.size());
    const std::size_t centre = rng.below(vocab.size());
    detail::fill_targets(targets, rng.below(vocab.size()), vocab, 5, rng);
    const auto row = input.row(centre);
    check(std::vector<double>(row.begin(), row.end()), output, targets);
  }
  // PV-DBOW: document vector against word output rows
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> doc(kDim);
    for (auto& x : doc) x = rng.uniform() - 0.5;
    const Matrix output = random_matrix(vocab.size());
    detail::fill_targets(targets, rng.below(vocab.size()), vocab, 5, rng);
    check(doc, output, targets);
  }
  const bool ok = vocab.size() <= 10 && worst <= 1e-4;
  return {ok, "vocab " + std::to_string(vocab.size()) + ", dim " + std::to_string(kDim) + ", " +
                  std::to_string(checked) + " partials, max relative error " + num(worst)};
}

// ---------------------------------------------------------------------------
// 2-3. Two-family corpus

const std::vector<std::string> kWordsA{"ledger",  "invoice", "payment", "account", "balance", "currency",
                                       "transaction", "audit", "budget", "tax", "payroll", "credit",
                                       "debit", "bank", "loan", "interest", "fiscal", "expense",
                                       "revenue", "billing", "receipt", "refund", "wallet", "checkout"};
const std::vector<std::string> kWordsB{"shader",  "texture", "render",  "pixel",    "sprite",   "mesh",
                                       "vertex",  "camera",  "lighting", "polygon", "raster",   "viewport",
                                       "animation", "canvas", "bitmap", "gradient", "opacity", "scene",
                                       "frame",   "palette", "glyph",   "blur",     "voxel",    "particle"};
const std::vector<std::string> kTermsA{"sum", "total", "count", "index", "acc", "limit"};
const std::vector<std::string> kPathsA{"NameExpr^BinaryExpr_NameExpr", "NameExpr^AssignExpr_IntegerLiteralExpr",
                                       "NameExpr^ForStmt_BinaryExpr_IntegerLiteralExpr",
                                       "NameExpr^MethodCallExpr_NameExpr"};
const std::vector<std::string> kTermsB{"node", "child", "parent", "visitor", "tree", "walker"};
const std::vector<std::string> kPathsB{"NameExpr^FieldAccessExpr_NameExpr",
                                       "NameExpr^ObjectCreationExpr_ClassOrInterfaceType",
                                       "NameExpr^IfStmt_UnaryExpr_NameExpr", "NameExpr^ReturnStmt_NameExpr"};

std::string words(Rng& rng, const std::vector<std::string>& vocab, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += vocab[rng.below(vocab.size())];
  }
  return out;
}

// Family 0 trees are deep and narrow, family 1 trees are wide and shallow.
DirTree family_tree(Rng& rng, int family) {
  std::vector<std::size_t> parents{0};
  if (family == 0) {
    const std::size_t n = 12 + rng.below(8);
    for (std::size_t i = 1; i < n; ++i) parents.push_back(rng.uniform() < 0.85 ? i - 1 : rng.below(i));
  } else {
    const std::size_t fan = 8 + rng.below(6);
    const std::size_t n = 1 + fan + rng.below(8);
    for (std::size_t i = 1; i < n; ++i) parents.push_back(i <= fan ? 0 : 1 + rng.below(fan));
  }
  return DirTree::from_parents(parents);
}

RepoCode family_code(Rng& rng, int family, const std::string& repo_id) {
  const auto& terms = family == 0 ? kTermsA : kTermsB;
  const auto& paths = family == 0 ? kPathsA : kPathsB;
  RepoCode code{repo_id, {}};
  const std::size_t files = 2 + rng.below(2);
  for (std::size_t f = 0; f < files; ++f) {
    ParsedFile file{"src/File" + std::to_string(f) + ".java", {}};
    const std::size_t methods = 3 + rng.below(3);
    for (std::size_t m = 0; m < methods; ++m) {
      ParsedMethod method{file.path + "#" + std::to_string(m), {}};
      const std::size_t contexts = 10 + rng.below(10);
      for (std::size_t c = 0; c < contexts; ++c) {
        method.contexts.push_back(
            {terms[rng.below(terms.size())], paths[rng.below(paths.size())], terms[rng.below(terms.size())]});
      }
      file.methods.push_back(std::move(method));
    }
    code.files.push_back(std::move(file));
  }
  return code;
}

struct FamilyCorpus {
  IngestedCorpus corpus;
  std::map<std::string, int> family;
};

FamilyCorpus two_family_corpus(std::size_t per_family, std::uint64_t seed) {
  Rng rng(seed);
  FamilyCorpus out;
  for (std::size_t i = 0; i < 2 * per_family; ++i) {
    const int fam = static_cast<int>(i % 2);
    const auto& vocab = fam == 0 ? kWordsA : kWordsB;
    char id[32];
    std::snprintf(id, sizeof id, "fam%d-%02zu", fam, i / 2);
    RepoRecord r;
    r.repo_id = id;
    r.meta.title = words(rng, vocab, 2);
    r.meta.description = words(rng, vocab, 12);
    r.meta.topics = {vocab[rng.below(vocab.size())], vocab[rng.below(vocab.size())], vocab[rng.below(vocab.size())]};
    r.meta.readme = words(rng, vocab, 50);
    r.tree = family_tree(rng, fam);
    auto code = family_code(rng, fam, r.repo_id);
    for (const auto& f : code.files) r.sources.push_back({f.path, "java"});
    out.family[r.repo_id] = fam;
    out.corpus.records.push_back(std::move(r));
    out.corpus.code.push_back(std::move(code));
  }
  return out;
}

struct FamilyRun {
  FamilyCorpus data;
  std::vector<RepoEmbedding> embeddings;
  GroundTruth truth;
};

const FamilyRun& family_run() {
  static std::optional<FamilyRun> run;
  if (!run) {
    FamilyRun r;
    r.data = two_family_corpus(20, 31);
    r.embeddings = embed_corpus(r.data.corpus, RunConfig{}).repos;
    for (const auto& [q, fq] : r.data.family) {
      for (const auto& [c, fc] : r.data.family) {
        if (q != c) r.truth.add(q, c, fq == fc ? kMaxCategory : kMinCategory);
      }
    }
    run = std::move(r);
  }
  return *run;
}

std::vector<StoreRow> fused_store(const std::vector<RepoEmbedding>& parts, const FusionWeights& w) {
  std::vector<StoreRow> store;
  for (const auto& e : parts) store.push_back({e.repo_id, fuse(e.meta, e.structure, e.code, w)});
  return store;
}

double retrieval_precision(const FamilyRun& run, const FusionWeights& w) {
  const auto store = fused_store(run.embeddings, w);
  std::vector<QueryOutcome> outcomes;
  for (const auto& row : store) outcomes.push_back({row.repo_id, top_k(row.repo_id, store, 5)});
  return precision(outcomes, run.truth);
}

Outcome embedding_separation() {
  const auto& run = family_run();
  const auto store = fused_store(run.embeddings, variant_weights("All"));
  double intra = 0, inter = 0;
  std::size_t n_intra = 0, n_inter = 0;
  for (std::size_t i = 0; i < store.size(); ++i) {
    for (std::size_t j = i + 1; j < store.size(); ++j) {
      const double c = cosine(store[i].fused, store[j].fused);
      if (run.data.family.at(store[i].repo_id) == run.data.family.at(store[j].repo_id)) {
        intra += c;
        ++n_intra;
      } else {
        inter += c;
        ++n_inter;
      }
    }
  }
  intra /= static_cast<double>(n_intra);
  inter /= static_cast<double>(n_inter);
  const double p = retrieval_precision(run, variant_weights("All"));
  return {intra - inter >= 0.2 && p >= 0.9, "intra cosine " + num(intra) + ", inter cosine " + num(inter) +
                                                 ", gap " + num(intra - inter) + ", precision@5 " + num(p)};
}

Outcome ablation_ordering() {
  const auto& run = family_run();
  const double all = retrieval_precision(run, variant_weights("All"));
  const double ms = retrieval_precision(run, variant_weights("MS"));
  const double m = retrieval_precision(run, variant_weights("M"));
  return {all >= ms && ms >= m - 0.05, "precision All " + num(all) + ", MS " + num(ms) + ", M " + num(m)};
}

// ---------------------------------------------------------------------------
// 4. node2vec walks

double chi_square_uniform(const std::vector<std::size_t>& counts) {
  double n = 0;
  for (auto c : counts) n += static_cast<double>(c);
  const double expected = n / static_cast<double>(counts.size());
  double chi = 0;
  for (auto c : counts) chi += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  return chi;
}

Outcome node2vec_correctness() {
  constexpr std::size_t kLeaves = 5;
  constexpr double kCritical = 13.2767;  // chi-square, 4 degrees of freedom, upper 1%
  std::vector<std::vector<std::size_t>> adj(kLeaves + 1);
  for (std::size_t i = 1; i <= kLeaves; ++i) {
    adj[0].push_back(i);
    adj[i].push_back(0);
  }
  const WalkGraph star(adj);
  WalkConfig c;  // p = q = 1
  c.walk_length = 3;
  std::vector<std::size_t> first(kLeaves, 0), second(kLeaves, 0);
  for (std::size_t i = 0; i < 10000; ++i) {
    ++first[random_walk(star, 0, c, derive_seed(401, 0, i))[1] - 1];
    ++second[random_walk(star, 1, c, derive_seed(402, 1, i))[2] - 1];
  }
  const double chi1 = chi_square_uniform(first), chi2 = chi_square_uniform(second);

  const WalkGraph path({{1}, {0, 2}, {1}});
  const auto probs = transition_probabilities(path, 0, 1, 4.0, 0.25);
  const bool exact = probs == std::vector<double>{0.25 / 4.25, 4.0 / 4.25};
  return {chi1 < kCritical && chi2 < kCritical && exact,
          "chi-square first step " + num(chi1) + ", through centre " + num(chi2) + " (critical " + num(kCritical) +
              "), worked example " + (exact ? "exact" : "mismatch")};
}

// ---------------------------------------------------------------------------
// 5. Aggregators

// Exact sum by fixed point: every input is zero or has magnitude in
// [2^-20, 2^20], so x * 2^72 is an integer that fits with room to spare.
double exact_sum_oracle(const std::vector<double>& xs) {
  __int128 acc = 0;
  for (double x : xs) acc += static_cast<__int128>(std::ldexp(x, 72));
  return std::ldexp(static_cast<double>(acc), -72);
}

Outcome aggregation_oracle() {
  Rng rng(505);
  std::size_t mismatches = 0, columns = 0;
  double worst_mean = 0, worst_std = 0, worst_mode = 0;
  for (int set = 0; set < 100; ++set) {
    const std::size_t n = 1 + rng.below(40), dim = 1 + rng.below(8);
    const bool grid = set % 2 == 0;  // grid sets give repeated values and mode ties
    const double scale = set % 4 < 2 ? 1.0 : 10.0;
    std::vector<Embedding> vs(n, Embedding(dim));
    for (auto& v : vs) {
      for (auto& x : v) {
        if (grid) {
          x = (static_cast<double>(rng.below(9)) - 4.0) / 1000.0;
        } else {
          do x = (2.0 * rng.uniform() - 1.0) * scale;
          while (std::fabs(x) < 0x1p-20);
        }
      }
    }
    std::map<Aggregator, Embedding> got;
    for (auto a : {Aggregator::mean, Aggregator::mode, Aggregator::max, Aggregator::min, Aggregator::sum,
                   Aggregator::std}) {
      got[a] = aggregate(vs, a);
    }
    for (std::size_t d = 0; d < dim; ++d) {
      std::vector<double> col(n);
      for (std::size_t i = 0; i < n; ++i) col[i] = vs[i][d];
      ++columns;
      mismatches += got[Aggregator::min][d] != oracle::column_statistic(col, Aggregator::min);
      mismatches += got[Aggregator::max][d] != oracle::column_statistic(col, Aggregator::max);
      mismatches += got[Aggregator::sum][d] != exact_sum_oracle(col);
      worst_mean = std::max(worst_mean, std::fabs(got[Aggregator::mean][d] - oracle::column_statistic(col, Aggregator::mean)));
      worst_std = std::max(worst_std, std::fabs(got[Aggregator::std][d] - oracle::column_statistic(col, Aggregator::std)));
      worst_mode = std::max(worst_mode, std::fabs(got[Aggregator::mode][d] - oracle::column_statistic(col, Aggregator::mode)));
    }
  }
  const bool ok = mismatches == 0 && worst_mean <= 1e-12 && worst_std <= 1e-12 && worst_mode <= 1e-12;
  return {ok, std::to_string(columns) + " columns, min/max/sum mismatches " + std::to_string(mismatches) +
                  ", max error mean " + num(worst_mean) + ", std " + num(worst_std) + ", mode " + num(worst_mode)};
}

// ---------------------------------------------------------------------------
// 6. AGNES

Outcome agnes_oracle() {
  std::size_t instances = 0, failures = 0, tied = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(derive_seed(600, seed));
    const std::size_t n = 2 + rng.below(9);
    const std::size_t dim = 1 + rng.below(3);
    std::vector<Embedding> pts(n, Embedding(dim));
    // small integer coordinates produce exact distance ties
    for (auto& p : pts)
      for (auto& x : p) x = 1.0 + static_cast<double>(rng.below(4));
    for (auto l : {Linkage::ward, Linkage::average, Linkage::complete}) {
      for (bool norm : {false, true}) {
        ++instances;
        const auto got = agnes(pts, {l, norm});
        const auto want = oracle::agnes(pts, l, norm);
        bool same = got.merges.size() == want.merges.size();
        for (std::size_t m = 0; same && m < got.merges.size(); ++m) {
          const auto &a = got.merges[m], &b = want.merges[m];
          same = a.left == b.left && a.right == b.right && a.size == b.size &&
                 std::fabs(a.height - b.height) <= 1e-9 * std::max(1.0, std::fabs(b.height));
          if (m > 0 && b.height == want.merges[m - 1].height) ++tied;
        }
        for (std::size_t k = 1; same && k <= n; ++k) same = cut(got, k) == oracle::cut(want, k);
        failures += !same;
      }
    }
  }
  return {failures == 0, std::to_string(instances) + " instances over 50 seeds, " + std::to_string(tied) +
                             " equal-height merges, " + std::to_string(failures) + " mismatches"};
}

// ---------------------------------------------------------------------------
// 7-8. Clustering recovery and elbow

Outcome clustering_recovery() {
  constexpr std::size_t kDim = 384, kPoints = 150, kBlobs = 3;
  Rng rng(707);
  std::vector<Embedding> centers(kBlobs, Embedding(kDim));
  for (auto& c : centers)
    for (auto& x : c) x = gaussian(rng);
  std::vector<Embedding> pts;
  std::vector<std::size_t> planted;
  for (std::size_t i = 0; i < kPoints; ++i) {
    const std::size_t b = i % kBlobs;
    Embedding p(kDim);
    for (std::size_t d = 0; d < kDim; ++d) p[d] = centers[b][d] + 0.5 * gaussian(rng);
    pts.push_back(std::move(p));
    planted.push_back(b);
  }
  const auto d = agnes(pts);
  const double ari = adjusted_rand_index(cut(d, kBlobs), planted);
  std::vector<Embedding> clustered;
  for (const auto& p : pts) clustered.push_back(normalized(p));
  const auto k = elbow(sse_curve(clustered, d, 1, std::min<std::size_t>(30, kPoints)));
  return {ari >= 0.9 && k == 3, "ARI " + num(ari) + ", elbow k " + std::to_string(k)};
}

Outcome elbow_oracle() {
  const SSECurve curve{{1, 100}, {2, 40}, {3, 15}, {4, 12}, {5, 11}, {6, 10.5}};
  const auto k = elbow(curve);
  return {k == 3, "k* " + std::to_string(k)};
}

// ---------------------------------------------------------------------------
// 9. Metrics

Outcome metrics_exactness() {
  const double p = precision_from_counts(100, 50, 60, 40);
  const std::vector<double> id{1, 2, 3, 4, 5}, swap{2, 1, 3, 4, 5}, rev{5, 4, 3, 2, 1};
  const double s_swap = spearman(id, swap), s_rev = spearman(id, rev);
  // 1 - 6 sum d^2 / (n (n^2 - 1)) with sum d^2 = 2 and 40
  const double want_swap = 1.0 - 6.0 * 2.0 / (5.0 * 24.0), want_rev = 1.0 - 6.0 * 40.0 / (5.0 * 24.0);
  const bool ok = std::fabs(p - 0.60) <= 1e-12 && std::fabs(s_swap - want_swap) <= 1e-12 &&
                  std::fabs(s_swap - 0.9) <= 1e-12 && std::fabs(s_rev - want_rev) <= 1e-12 &&
                  std::fabs(s_rev + 1.0) <= 1e-12;
  return {ok, "precision " + num(p) + ", swap " + num(s_swap) + ", reversal " + num(s_rev)};
}

// ---------------------------------------------------------------------------
// 10. Classification

Outcome classification() {
  constexpr std::size_t kDim = 384;
  Rng rng(1010);
  std::vector<LabeledEmbedding> data;
  for (std::size_t i = 0; i < 200; ++i) {
    const bool mal = i % 2;
    Embedding v(kDim);
    for (auto& x : v) x = gaussian(rng) + (mal ? 0.5 : 0.0);
    data.push_back({"r" + std::to_string(i), v, mal ? RepoLabel::malware : RepoLabel::benign});
  }
  const auto report = cross_validate(data, 10, 11);

  auto doubled = data;
  doubled.insert(doubled.end(), data.begin(), data.end());
  const auto m1 = nb_fit(data), m2 = nb_fit(doubled);
  bool invariant = m1 == m2;
  for (const auto& e : data) {
    const auto a = nb_predict(m1, e.fused), b = nb_predict(m2, e.fused);
    invariant = invariant && a.label == b.label && a.log_posterior == b.log_posterior;
  }
  return {report.pooled.accuracy >= 0.95 && invariant,
          "10-fold accuracy " + num(report.pooled.accuracy) + ", duplication " + (invariant ? "invariant" : "changes model")};
}

// ---------------------------------------------------------------------------
// 11. Determinism of the command line pipeline

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = testing_support::read_text(e.path());
  }
  return out;
}

Outcome determinism() {
  const fs::path fixtures(REPO2VEC_FIXTURES);
  const std::string cli = REPO2VEC_CLI;
  const auto base = testing_support::temp_dir("acceptance-determinism");
  const auto conf = (fixtures / "run.conf").string();
  auto one_run = [&](const fs::path& dir) {
    const auto d = dir.string();
    const std::vector<std::string> steps{
        cli + " ingest " + (fixtures / "corpus").string() + " --out " + d + "/in --config " + conf,
        cli + " embed --in " + d + "/in --out " + d + "/emb --config " + conf,
        cli + " query --store " + d + "/emb/store.tsv --id calc-lib --k 3 > " + d + "/query.tsv",
        cli + " cluster --store " + d + "/emb/store.tsv --out " + d + "/cluster --elbow --profile --records " + d +
            "/in/records.jsonl --config " + conf + " > " + d + "/k.txt",
        cli + " eval --store " + d + "/emb/store.tsv --queries " + (fixtures / "eval/queries.txt").string() +
            " --groundtruth " + (fixtures / "eval/groundtruth.csv").string() + " --k 4 --table " + d +
            "/eval_table.tsv > " + d + "/eval.json",
    };
    for (const auto& s : steps) {
      if (testing_support::run(s + " 2>/dev/null") != 0) throw std::runtime_error("command failed: " + s);
    }
    return tree_contents(dir);
  };
  const auto a = one_run(base / "a");
  const auto b = one_run(base / "b");
  std::size_t differing = 0;
  std::string first_diff;
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    if (it == b.end() || it->second != bytes) {
      ++differing;
      if (first_diff.empty()) first_diff = name;
    }
  }
  const bool ok = a.size() == b.size() && differing == 0 && !a.empty();
  fs::remove_all(base);
  return {ok, std::to_string(a.size()) + " output files compared, " + std::to_string(differing) + " differ" +
                  (first_diff.empty() ? "" : " (first: " + first_diff + ")")};
}

// ---------------------------------------------------------------------------
// 12. LDA

Outcome lda_sanity() {
  const std::vector<std::string> fruit{"apple", "banana", "cherry", "grape", "lemon", "mango",
                                       "peach", "pear",   "plum",   "kiwi",  "lime",  "fig"};
  const std::vector<std::string> tools{"hammer", "wrench", "saw",  "drill", "chisel", "pliers",
                                       "level",  "clamp",  "file", "rasp",  "vise",   "awl"};
  Rng rng(1212);
  std::vector<TokenSequence> docs;
  for (std::size_t d = 0; d < 40; ++d) {
    const auto& vocab = d % 2 ? tools : fruit;
    TokenSequence doc;
    for (int i = 0; i < 40; ++i) doc.push_back(vocab[rng.below(vocab.size())]);
    docs.push_back(std::move(doc));
  }
  LdaConfig c;
  c.num_topics = 2;
  c.seed = 13;
  LdaSampler lda(docs, c);
  std::size_t inconsistent = !lda.counts_consistent();
  for (std::size_t it = 0; it < c.iterations; ++it) {
    lda.sweep();
    inconsistent += !lda.counts_consistent();
  }
  const std::set<std::string> fruit_set(fruit.begin(), fruit.end());
  std::set<bool> sides;
  bool pure = true;
  for (std::size_t t = 0; t < 2; ++t) {
    const auto top = lda.top_terms(t, 10);
    const bool is_fruit = fruit_set.count(top.at(0)) > 0;
    for (const auto& w : top) pure = pure && (fruit_set.count(w) > 0) == is_fruit;
    pure = pure && top.size() == 10;
    sides.insert(is_fruit);
  }
  const bool ok = pure && sides.size() == 2 && inconsistent == 0;
  return {ok, std::to_string(c.iterations) + " sweeps, top-10 terms " + (pure ? "single-vocabulary" : "mixed") +
                  ", distinct vocabularies " + std::to_string(sides.size()) + ", inconsistent states " +
                  std::to_string(inconsistent)};
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "gradient correctness", 1, gradient_correctness},
      {2, "embedding separation", 120, embedding_separation},
      {3, "ablation ordering", 120, ablation_ordering},
      {4, "node2vec correctness", 5, node2vec_correctness},
      {5, "aggregation oracle", 1, aggregation_oracle},
      {6, "AGNES oracle", 10, agnes_oracle},
      {7, "clustering recovery", 30, clustering_recovery},
      {8, "elbow oracle", 1, elbow_oracle},
      {9, "metrics exactness", 1, metrics_exactness},
      {10, "classification on separable data", 10, classification},
      {11, "end-to-end determinism", 180, determinism},
      {12, "LDA sanity", 30, lda_sanity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s  criterion %2d  %-34s %s [%.2f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

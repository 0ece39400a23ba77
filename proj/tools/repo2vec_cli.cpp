// repo2vec command-line tool.
//
//   repo2vec ingest   <corpus-root> --out DIR
//   repo2vec embed    --in INGEST_DIR --out DIR
//   repo2vec query    --store store.tsv --id REPO [--k 5]
//   repo2vec cluster  --store store.tsv (--k K | --elbow) [--profile --records records.jsonl] --out DIR
//   repo2vec classify --store store.tsv --labels labels.csv [--folds 10]
//   repo2vec eval     --store store.tsv --queries queries.txt --groundtruth gt.csv [--k 5]
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "repo2vec/repo2vec.hpp"

namespace fs = std::filesystem;
using namespace repo2vec;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string weights;
  std::string preset;
  std::string agg;

  RunConfig resolve() const {
    RunConfig c;
    if (!config.empty()) load_config_file(c, config);
    // Flags win over the config file.
    if (seed) c.seed = *seed;
    if (!preset.empty() && !weights.empty()) throw InvalidArgument("--preset and --weights are mutually exclusive");
    if (!preset.empty()) apply_setting(c, "preset", preset);
    if (!weights.empty()) apply_setting(c, "weights", weights);
    if (!agg.empty()) apply_setting(c, "agg", agg);
    c.validate();
    return c;
  }
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "key = value configuration file");
  cmd->add_option("--seed", o.seed, "root random seed");
  cmd->add_option("--weights", o.weights, "fusion weights wM,wS,wC");
  cmd->add_option("--preset", o.preset, "fusion preset")->check(CLI::IsMember({"M", "MS", "All"}));
  cmd->add_option("--agg", o.agg, "aggregator")->check(CLI::IsMember({"mean", "mode", "max", "min", "sum", "std"}));
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  return out;
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw DataError("cannot create " + p.string() + ": " + ec.message());
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

void write_part(const fs::path& p, const std::vector<RepoEmbedding>& repos, Embedding RepoEmbedding::*part) {
  auto out = open_out(p);
  for (const auto& r : repos) write_vector_row(out, r.repo_id, r.*part);
}

// ---------------------------------------------------------------------------

void cmd_ingest(const std::string& root, const std::string& out_dir, const CommonOptions& common) {
  const auto config = common.resolve();
  const auto corpus = ingest_corpus(root, config);
  ensure_dir(out_dir);
  auto manifest = open_out(fs::path(out_dir) / "manifest.tsv");
  write_manifest(manifest, corpus.records);
  auto records = open_out(fs::path(out_dir) / "records.jsonl");
  write_records(records, corpus);
}

void cmd_embed(const std::string& in_dir, const std::string& out_dir, const CommonOptions& common) {
  const auto config = common.resolve();
  const auto corpus = read_records(fs::path(in_dir) / "records.jsonl");
  const auto result = embed_corpus(corpus, config);
  ensure_dir(out_dir);
  const fs::path out(out_dir);
  write_part(out / "store.tsv", result.repos, &RepoEmbedding::fused);
  write_part(out / "meta.tsv", result.repos, &RepoEmbedding::meta);
  write_part(out / "struct.tsv", result.repos, &RepoEmbedding::structure);
  write_part(out / "code.tsv", result.repos, &RepoEmbedding::code);
  auto header = open_out(out / "store.json");
  header << store_header(config, result.repos.size()).dump(2) << '\n';
  if (result.meta_model) save_model(out / "meta.model", *result.meta_model);
  if (result.code_model) save_model(out / "code.model", *result.code_model);
}

void cmd_query(const std::string& store_path, const std::string& id, std::size_t k) {
  const auto store = read_store(store_path);
  write_query_result(std::cout, top_k(id, store, k));
}

struct ClusterOptions {
  std::string store;
  std::string out;
  std::optional<std::size_t> k;
  bool elbow = false;
  std::size_t k_max = 30;
  std::string linkage = "ward";
  bool profile = false;
  std::string records;
  std::size_t topics = 5;
  double sample = 0.5;
};

void cmd_cluster(const ClusterOptions& o, const CommonOptions& common) {
  if (o.k.has_value() == o.elbow) throw InvalidArgument("cluster: give exactly one of --k and --elbow");
  if (o.profile && o.records.empty()) throw InvalidArgument("cluster: --profile needs --records");
  const auto config = common.resolve();
  const auto store = read_store(o.store);
  std::vector<Embedding> vectors;
  for (const auto& r : store) vectors.push_back(r.fused);
  if (vectors.size() < 2) throw DataError("cluster: store has fewer than 2 rows");

  const AgnesOptions agnes_options{parse_linkage(o.linkage), true};
  const auto dendrogram = agnes(vectors, agnes_options);
  std::vector<Embedding> clustered;
  for (const auto& v : vectors) clustered.push_back(normalized(v));

  ensure_dir(o.out);
  const fs::path out(o.out);
  {
    auto f = open_out(out / "dendrogram.tsv");
    write_dendrogram(f, dendrogram);
  }
  std::size_t k = 0;
  if (o.elbow) {
    const auto k_max = std::min(o.k_max, vectors.size());
    if (k_max < 3) throw DataError("cluster: --elbow needs at least 3 candidate cluster counts");
    const auto curve = sse_curve(clustered, dendrogram, 1, k_max);
    auto f = open_out(out / "sse.tsv");
    for (const auto& [kk, v] : curve) f << kk << '\t' << format_real(v) << '\n';
    k = elbow(curve);
  } else {
    k = *o.k;
    if (k < 1 || k > vectors.size()) throw InvalidArgument("cluster: --k must be in [1, number of repositories]");
  }
  const auto labels = cut(dendrogram, k);
  {
    auto f = open_out(out / "labels.tsv");
    for (std::size_t i = 0; i < store.size(); ++i) f << store[i].repo_id << '\t' << labels[i] << '\n';
  }
  std::cout << "k\t" << k << '\n';

  if (o.profile) {
    const auto corpus = read_records(o.records);
    std::map<std::string, const RepoRecord*> by_id;
    for (const auto& r : corpus.records) by_id[r.repo_id] = &r;
    std::vector<TokenSequence> docs;
    for (const auto& row : store) {
      const auto it = by_id.find(row.repo_id);
      if (it == by_id.end()) throw DataError("cluster: repository " + row.repo_id + " missing from " + o.records);
      docs.push_back(meta_tokens(it->second->meta));
    }
    ProfileConfig pc;
    pc.num_topics = o.topics;
    pc.sample_fraction = o.sample;
    pc.seed = config.lda_seed();
    auto f = open_out(out / "profile.tsv");
    write_cluster_report(f, lda_profile(labels, docs, pc));
  }
}

void cmd_classify(const std::string& store_path, const std::string& labels_path, std::size_t folds,
                  const CommonOptions& common) {
  const auto config = common.resolve();
  const auto store = read_store(store_path);
  std::map<std::string, const StoreRow*> by_id;
  for (const auto& r : store) by_id[r.repo_id] = &r;
  std::vector<LabeledEmbedding> data;
  for (const auto& [id, label] : read_labels_csv(labels_path)) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("labelled repository not in store: " + id);
    data.push_back({id, it->second->fused, label});
  }
  const auto report = cross_validate(data, folds, config.cv_seed());
  std::cout << to_json(report).dump(2) << '\n';
}

void cmd_eval(const std::string& store_path, const std::string& queries_path, const std::string& gt_path,
              std::size_t k, const std::string& table_path) {
  const auto store = read_store(store_path);
  const auto gt = read_ground_truth(gt_path);
  std::vector<QueryOutcome> outcomes;
  for (const auto& q : read_lines(queries_path)) {
    const bool known = std::any_of(store.begin(), store.end(), [&](const StoreRow& r) { return r.repo_id == q; });
    if (!known) throw DataError("query repository not in store: " + q);
    outcomes.push_back({q, top_k(q, store, k)});
  }
  const auto report = evaluate(outcomes, gt, k);
  std::cout << to_json(report).dump(2) << '\n';
  if (!table_path.empty()) {
    auto f = open_out(table_path);
    write_eval_table(f, report);
  } else {
    write_eval_table(std::cerr, report);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repository embeddings: ingest, embed, query, cluster, classify, evaluate"};
  app.require_subcommand(1);

  CommonOptions common;

  auto* ingest = app.add_subcommand("ingest", "scan a corpus and extract metadata, trees and path contexts");
  std::string ingest_root, ingest_out;
  ingest->add_option("root", ingest_root, "corpus root")->required();
  ingest->add_option("--out", ingest_out, "output directory")->required();
  add_common(ingest, common);

  auto* embed = app.add_subcommand("embed", "train models and write the embedding store");
  std::string embed_in, embed_out;
  embed->add_option("--in", embed_in, "ingest output directory")->required();
  embed->add_option("--out", embed_out, "output directory")->required();
  add_common(embed, common);

  auto* query = app.add_subcommand("query", "most similar repositories to one repository");
  std::string query_store, query_id;
  std::size_t query_k = 5;
  query->add_option("--store", query_store, "store TSV")->required();
  query->add_option("--id", query_id, "query repository id")->required();
  query->add_option("--k", query_k, "number of results")->check(CLI::PositiveNumber);

  auto* cluster = app.add_subcommand("cluster", "hierarchical clustering of the store");
  ClusterOptions co;
  cluster->add_option("--store", co.store, "store TSV")->required();
  cluster->add_option("--out", co.out, "output directory")->required();
  cluster->add_option("--k", co.k, "number of clusters");
  cluster->add_flag("--elbow", co.elbow, "choose k by the elbow of the SSE curve");
  cluster->add_option("--k-max", co.k_max, "largest k on the SSE curve")->check(CLI::PositiveNumber);
  cluster->add_option("--linkage", co.linkage, "linkage")->check(CLI::IsMember({"ward", "average", "complete"}));
  cluster->add_flag("--profile", co.profile, "LDA topic profile of every cluster");
  cluster->add_option("--records", co.records, "records.jsonl from ingest, for --profile");
  cluster->add_option("--topics", co.topics, "LDA topics per cluster")->check(CLI::PositiveNumber);
  cluster->add_option("--sample", co.sample, "fraction of each cluster profiled")->check(CLI::Range(0.0, 1.0));
  add_common(cluster, common);

  auto* classify = app.add_subcommand("classify", "Naive Bayes cross-validation on labelled repositories");
  std::string classify_store, classify_labels;
  std::size_t folds = 10;
  classify->add_option("--store", classify_store, "store TSV")->required();
  classify->add_option("--labels", classify_labels, "CSV repo_id,label")->required();
  classify->add_option("--folds", folds, "number of folds")->check(CLI::Range(2, 1000));
  add_common(classify, common);

  auto* eval = app.add_subcommand("eval", "evaluate queries against graded ground truth");
  std::string eval_store, eval_queries, eval_gt, eval_table;
  std::size_t eval_k = 5;
  eval->add_option("--store", eval_store, "store TSV")->required();
  eval->add_option("--queries", eval_queries, "query ids, one per line")->required();
  eval->add_option("--groundtruth", eval_gt, "CSV query_id,result_id,category")->required();
  eval->add_option("--k", eval_k, "results per query")->check(CLI::PositiveNumber);
  eval->add_option("--table", eval_table, "write the summary table here instead of stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*ingest) cmd_ingest(ingest_root, ingest_out, common);
    else if (*embed) cmd_embed(embed_in, embed_out, common);
    else if (*query) cmd_query(query_store, query_id, query_k);
    else if (*cluster) cmd_cluster(co, common);
    else if (*classify) cmd_classify(classify_store, classify_labels, folds, common);
    else if (*eval) cmd_eval(eval_store, eval_queries, eval_gt, eval_k, eval_table);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}

#pragma once

// End-to-end wiring: run configuration, persisted ingest artifacts and
// corpus embedding. The command-line tool is a thin layer over this.

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repo2vec/codeembed.hpp"
#include "repo2vec/common.hpp"
#include "repo2vec/corpus.hpp"
#include "repo2vec/fusion.hpp"
#include "repo2vec/structembed.hpp"
#include "repo2vec/textembed.hpp"

namespace repo2vec {

struct RunConfig {
  std::uint64_t seed = 1;
  FusionWeights weights{1.0, 1.0, 1.0};
  Aggregator agg = Aggregator::mean;
  EmbedConfig meta;
  EmbedConfig structure;
  WalkConfig walks;
  EmbedConfig code;
  ContextLimits limits;
  std::filesystem::path method_vectors;  // optional imported method vectors

  /// Every setting as `key=value`, sorted by key.
  std::map<std::string, std::string> canonical() const {
    std::map<std::string, std::string> m;
    m["seed"] = std::to_string(seed);
    m["weights"] = format_real(weights.meta) + "," + format_real(weights.structure) + "," + format_real(weights.code);
    m["agg"] = std::string(to_string(agg));
    auto put = [&](const std::string& p, const EmbedConfig& c) {
      m[p + ".window"] = std::to_string(c.window);
      m[p + ".negatives"] = std::to_string(c.negatives);
      m[p + ".epochs"] = std::to_string(c.epochs);
      m[p + ".lr"] = format_real(c.initial_lr);
      m[p + ".min_count"] = std::to_string(c.min_count);
    };
    put("meta", meta);
    put("struct", structure);
    put("code", code);
    m["struct.p"] = format_real(walks.p);
    m["struct.q"] = format_real(walks.q);
    m["struct.walks_per_node"] = std::to_string(walks.walks_per_node);
    m["struct.walk_length"] = std::to_string(walks.walk_length);
    m["code.max_length"] = std::to_string(limits.max_length);
    m["code.max_width"] = std::to_string(limits.max_width);
    m["code.max_contexts"] = std::to_string(limits.max_contexts);
    if (!method_vectors.empty()) m["code.method_vectors"] = method_vectors.string();
    return m;
  }

  std::uint64_t hash() const {
    std::string text;
    for (const auto& [k, v] : canonical()) text += k + "=" + v + "\n";
    return fnv1a64(text);
  }

  /// Model configs with their seeds derived from the root seed.
  EmbedConfig meta_config() const { return with_seed(meta, "meta"); }
  EmbedConfig struct_config() const { return with_seed(structure, "struct"); }
  EmbedConfig code_config() const { return with_seed(code, "code"); }
  WalkConfig walk_config() const {
    WalkConfig w = walks;
    w.seed = derive_seed(seed, "walks");
    return w;
  }
  std::uint64_t context_seed() const { return derive_seed(seed, "contexts"); }
  std::uint64_t lda_seed() const { return derive_seed(seed, "lda"); }
  std::uint64_t cv_seed() const { return derive_seed(seed, "cv"); }

  void validate() const {
    weights.validate();
    meta.validate();
    structure.validate();
    code.validate();
    walks.validate();
    for (auto d : {meta.dim, structure.dim, code.dim}) {
      if (d != kPartDim) throw InvalidArgument("embedding dimensions are fixed at 128");
    }
  }

private:
  EmbedConfig with_seed(EmbedConfig c, std::string_view stream) const {
    c.seed = derive_seed(seed, stream);
    return c;
  }
};

namespace detail {

inline std::size_t parse_count(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  unsigned long long n = 0;
  try {
    n = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || v[0] == '-') throw InvalidArgument(key + ": expected a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(n);
}

inline FusionWeights parse_weights(const std::string& v) {
  const auto parts = split(v, ',');
  if (parts.size() != 3) throw InvalidArgument("weights: expected wM,wS,wC, got '" + v + "'");
  FusionWeights w{parse_real(trim(parts[0]), "weights"), parse_real(trim(parts[1]), "weights"),
                  parse_real(trim(parts[2]), "weights")};
  w.validate();
  return w;
}

}  // namespace detail

/// Applies one `key=value` setting. Unknown keys are usage errors.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  auto real = [&] {
    try {
      return parse_real(value, key);
    } catch (const std::exception& e) {
      throw InvalidArgument(e.what());
    }
  };
  auto count = [&] { return detail::parse_count(key, value); };
  auto embed = [&](EmbedConfig& e, const std::string& field) {
    if (field == "window") e.window = count();
    else if (field == "negatives") e.negatives = count();
    else if (field == "epochs") e.epochs = count();
    else if (field == "lr") e.initial_lr = real();
    else if (field == "min_count") e.min_count = count();
    else return false;
    return true;
  };
  const auto dot_pos = key.find('.');
  const std::string group = dot_pos == std::string::npos ? "" : key.substr(0, dot_pos);
  const std::string field = dot_pos == std::string::npos ? key : key.substr(dot_pos + 1);
  bool known = true;
  if (key == "seed") c.seed = count();
  else if (key == "weights") c.weights = detail::parse_weights(value);
  else if (key == "preset") c.weights = variant_weights(value);
  else if (key == "agg") c.agg = parse_aggregator(value);
  else if (group == "meta") known = embed(c.meta, field);
  else if (group == "struct") {
    if (field == "p") c.walks.p = real();
    else if (field == "q") c.walks.q = real();
    else if (field == "walks_per_node") c.walks.walks_per_node = count();
    else if (field == "walk_length") c.walks.walk_length = count();
    else known = embed(c.structure, field);
  } else if (group == "code") {
    if (field == "max_length") c.limits.max_length = count();
    else if (field == "max_width") c.limits.max_width = count();
    else if (field == "max_contexts") c.limits.max_contexts = count();
    else if (field == "method_vectors") c.method_vectors = value;
    else known = embed(c.code, field);
  } else known = false;
  if (!known) throw InvalidArgument("unknown config key: " + key);
}

/// `key = value` lines; `#` starts a comment.
inline std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in, const std::string& source) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidArgument(source + ":" + std::to_string(line_no) + ": expected key = value");
    }
    out.emplace_back(std::string(trim(t.substr(0, eq))), std::string(trim(t.substr(eq + 1))));
  }
  return out;
}

inline void load_config_file(RunConfig& c, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path.string());
  for (const auto& [k, v] : parse_config(in, path.string())) apply_setting(c, k, v);
}

// ---------------------------------------------------------------------------
// Ingest artifacts: one JSON object per repository holding its record and
// parsed code.

inline nlohmann::json record_to_json(const RepoRecord& r, const RepoCode& code) {
  nlohmann::json j;
  j["repo_id"] = r.repo_id;
  j["meta"] = {{"title", r.meta.title},
               {"description", r.meta.description},
               {"topics", r.meta.topics},
               {"readme", r.meta.readme}};
  j["parents"] = r.tree.parents();
  auto& sources = j["sources"] = nlohmann::json::array();
  for (const auto& s : r.sources) sources.push_back({{"path", s.path}, {"language", s.language_tag}});
  auto& files = j["code"] = nlohmann::json::array();
  for (const auto& f : code.files) {
    nlohmann::json methods = nlohmann::json::array();
    for (const auto& m : f.methods) {
      nlohmann::json ctx = nlohmann::json::array();
      for (const auto& c : m.contexts) ctx.push_back({c.left, c.path, c.right});
      methods.push_back({{"id", m.method_id}, {"contexts", std::move(ctx)}});
    }
    files.push_back({{"path", f.path}, {"methods", std::move(methods)}});
  }
  return j;
}

inline std::pair<RepoRecord, RepoCode> record_from_json(const nlohmann::json& j) {
  RepoRecord r;
  RepoCode code;
  r.repo_id = j.at("repo_id").get<std::string>();
  const auto& m = j.at("meta");
  r.meta.title = m.at("title").get<std::string>();
  r.meta.description = m.at("description").get<std::string>();
  r.meta.topics = m.at("topics").get<std::vector<std::string>>();
  r.meta.readme = m.at("readme").get<std::string>();
  r.tree = DirTree::from_parents(j.at("parents").get<std::vector<std::size_t>>());
  for (const auto& s : j.at("sources")) {
    r.sources.push_back({s.at("path").get<std::string>(), s.at("language").get<std::string>()});
  }
  code.repo_id = r.repo_id;
  for (const auto& f : j.at("code")) {
    ParsedFile pf{f.at("path").get<std::string>(), {}};
    for (const auto& mj : f.at("methods")) {
      ParsedMethod pm{mj.at("id").get<std::string>(), {}};
      for (const auto& c : mj.at("contexts")) {
        pm.contexts.push_back({c.at(0).get<std::string>(), c.at(1).get<std::string>(), c.at(2).get<std::string>()});
      }
      pf.methods.push_back(std::move(pm));
    }
    code.files.push_back(std::move(pf));
  }
  return {std::move(r), std::move(code)};
}

struct IngestedCorpus {
  std::vector<RepoRecord> records;
  std::vector<RepoCode> code;
};

inline IngestedCorpus ingest_corpus(const std::filesystem::path& root, const RunConfig& config) {
  IngestedCorpus c;
  c.records = scan_corpus(root);
  for (const auto& r : c.records) {
    c.code.push_back(parse_repository(root / r.repo_id, r, config.context_seed(), config.limits));
  }
  return c;
}

inline void write_records(std::ostream& out, const IngestedCorpus& c) {
  for (std::size_t i = 0; i < c.records.size(); ++i) out << record_to_json(c.records[i], c.code[i]).dump() << '\n';
}

inline IngestedCorpus read_records(std::istream& in, const std::string& source) {
  IngestedCorpus c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      auto [r, code] = record_from_json(nlohmann::json::parse(line));
      c.records.push_back(std::move(r));
      c.code.push_back(std::move(code));
    } catch (const std::exception& e) {
      throw DataError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return c;
}

inline IngestedCorpus read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing ingest artifact " + path.string());
  return read_records(in, path.string());
}

// ---------------------------------------------------------------------------
// Embedding

struct CorpusEmbedding {
  std::vector<RepoEmbedding> repos;
  std::optional<DocModel> meta_model;
  std::optional<DocModel> code_model;
};

/// Trains the metadata and code models on the corpus, embeds every tree
/// with the same walk and training seeds, and fuses the three parts.
inline CorpusEmbedding embed_corpus(const IngestedCorpus& corpus, const RunConfig& config) {
  config.validate();
  CorpusEmbedding out;
  const auto& records = corpus.records;

  const bool has_text = std::any_of(records.begin(), records.end(),
                                    [](const RepoRecord& r) { return !meta_tokens(r.meta).empty(); });
  if (has_text) out.meta_model = train_meta_model(records, config.meta_config());
  else if (!records.empty()) warn("no metadata text in the corpus; metadata vectors are zero");

  const bool has_code = std::any_of(corpus.code.begin(), corpus.code.end(), [](const RepoCode& rc) {
    for (const auto& f : rc.files) {
      for (const auto& m : f.methods) {
        if (!m.contexts.empty()) return true;
      }
    }
    return false;
  });
  if (has_code) out.code_model = train_code_model(corpus.code, config.code_config());
  else if (!records.empty() && config.method_vectors.empty()) warn("no path contexts in the corpus; code vectors are zero");

  CodeModel code_ctx;
  code_ctx.model = out.code_model ? &*out.code_model : nullptr;
  code_ctx.dim = kPartDim;
  if (!config.method_vectors.empty()) code_ctx.imported = import_method_vectors(config.method_vectors, kPartDim);

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    Embedding m = out.meta_model ? meta2vec(r, *out.meta_model) : Embedding(kPartDim, 0.0);
    Embedding s = struct2vec(r.tree, config.walk_config(), config.struct_config(), config.agg);
    Embedding c = source2vec(corpus.code.at(i), code_ctx, config.agg);
    out.repos.push_back(make_embedding(r.repo_id, std::move(m), std::move(s), std::move(c), config.weights));
  }
  return out;
}

/// Provenance written next to the store.
inline nlohmann::json store_header(const RunConfig& config, std::size_t rows) {
  nlohmann::json settings = nlohmann::json::object();
  for (const auto& [k, v] : config.canonical()) settings[k] = v;
  std::ostringstream hash;
  hash << std::hex << config.hash();
  return {{"dim", kFusedDim},
          {"rows", rows},
          {"weights", {config.weights.meta, config.weights.structure, config.weights.code}},
          {"seed", config.seed},
          {"config_hash", hash.str()},
          {"settings", settings}};
}

}  // namespace repo2vec

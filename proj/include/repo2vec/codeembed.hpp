#pragma once

// Source-code embedding. Methods are reduced to AST path contexts
// (terminal, node-type path, terminal); a PV-DBOW model over serialized
// contexts gives one vector per method, and method vectors are aggregated
// to files and files to the repository.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "repo2vec/common.hpp"
#include "repo2vec/corpus.hpp"
#include "repo2vec/java_frontend.hpp"
#include "repo2vec/structembed.hpp"
#include "repo2vec/textembed.hpp"
#include "repo2vec/vector_io.hpp"

namespace repo2vec {

struct PathContext {
  std::string left;
  std::string path;
  std::string right;

  friend bool operator==(const PathContext&, const PathContext&) = default;
  friend auto operator<=>(const PathContext&, const PathContext&) = default;
};

struct ParsedMethod {
  std::string method_id;  // "<file path>#<ordinal>"
  std::vector<PathContext> contexts;

  friend bool operator==(const ParsedMethod&, const ParsedMethod&) = default;
};

struct ParsedFile {
  std::string path;
  std::vector<ParsedMethod> methods;

  friend bool operator==(const ParsedFile&, const ParsedFile&) = default;
};

/// Parsed source code of one repository.
struct RepoCode {
  std::string repo_id;
  std::vector<ParsedFile> files;

  friend bool operator==(const RepoCode&, const RepoCode&) = default;
};

struct ContextLimits {
  std::size_t max_length = 8;  // AST nodes on the path, terminals included
  std::size_t max_width = 2;   // child-index distance at the top of the path
  std::size_t max_contexts = 200;
};

// ---------------------------------------------------------------------------
// Serialization of a context to one vocabulary token

namespace detail {

inline void append_escaped(std::string& out, std::string_view s) {
  for (char c : s) {
    if (c == '\\' || c == '|') out += '\\';
    out += c;
  }
}

}  // namespace detail

/// "left|path|right" with '\' and '|' escaped by a backslash, so distinct
/// triples never share a token.
inline std::string context_token(const PathContext& c) {
  std::string out;
  out.reserve(c.left.size() + c.path.size() + c.right.size() + 2);
  detail::append_escaped(out, c.left);
  out += '|';
  detail::append_escaped(out, c.path);
  out += '|';
  detail::append_escaped(out, c.right);
  return out;
}

inline TokenSequence context_tokens(const ParsedMethod& m) {
  TokenSequence out;
  out.reserve(m.contexts.size());
  for (const auto& c : m.contexts) out.push_back(context_token(c));
  return out;
}

// ---------------------------------------------------------------------------
// Path-context extraction

namespace detail {

struct LeafPath {
  const java::AstNode* leaf;
  std::vector<const java::AstNode*> nodes;  // root .. leaf
  std::vector<std::size_t> child_index;     // index taken at each level below the root
};

inline void collect_leaves(const java::AstNode& node, std::vector<const java::AstNode*>& stack,
                           std::vector<std::size_t>& idx, std::vector<LeafPath>& out) {
  stack.push_back(&node);
  if (node.is_terminal()) {
    out.push_back({&node, stack, idx});
  } else {
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      idx.push_back(i);
      collect_leaves(node.children[i], stack, idx, out);
      idx.pop_back();
    }
  }
  stack.pop_back();
}

}  // namespace detail

/// All contexts between pairs of terminals (left before right in source
/// order) whose connecting path respects the length and width limits.
/// No sampling is applied here.
inline std::vector<PathContext> extract_path_contexts(const java::AstNode& root,
                                                      const ContextLimits& limits = {}) {
  std::vector<detail::LeafPath> leaves;
  std::vector<const java::AstNode*> stack;
  std::vector<std::size_t> idx;
  detail::collect_leaves(root, stack, idx, leaves);

  std::vector<PathContext> out;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    for (std::size_t j = i + 1; j < leaves.size(); ++j) {
      const auto& a = leaves[i];
      const auto& b = leaves[j];
      // Depth of the lowest common ancestor.
      std::size_t lca = 0;
      while (lca < a.child_index.size() && lca < b.child_index.size() &&
             a.child_index[lca] == b.child_index[lca]) {
        ++lca;
      }
      const std::size_t up = a.nodes.size() - 1 - lca;
      const std::size_t down = b.nodes.size() - 1 - lca;
      if (up + down + 1 > limits.max_length) continue;
      if (b.child_index[lca] - a.child_index[lca] > limits.max_width) continue;
      std::string path;
      for (std::size_t k = a.nodes.size() - 1; k > lca; --k) {
        path += a.nodes[k]->type;
        path += '^';
      }
      path += a.nodes[lca]->type;
      for (std::size_t k = lca + 1; k < b.nodes.size(); ++k) {
        path += '_';
        path += b.nodes[k]->type;
      }
      out.push_back({a.leaf->token, std::move(path), b.leaf->token});
    }
  }
  return out;
}

/// Keeps at most `cap` contexts, chosen uniformly without replacement
/// with a stream seeded from the method id; kept contexts stay in order.
inline void cap_contexts(ParsedMethod& m, std::size_t cap, std::uint64_t seed) {
  if (m.contexts.size() <= cap) return;
  std::vector<std::size_t> order(m.contexts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, "contexts:" + m.method_id));
  rng.shuffle(order);
  order.resize(cap);
  std::sort(order.begin(), order.end());
  std::vector<PathContext> kept;
  kept.reserve(cap);
  for (auto i : order) kept.push_back(std::move(m.contexts[i]));
  m.contexts = std::move(kept);
}

// ---------------------------------------------------------------------------
// Interchange sidecar: one JSON object per line,
//   {"method_id": str, "contexts": [[left, path, right], ...]}

inline std::vector<ParsedMethod> read_interchange(std::istream& in, std::string_view source) {
  std::vector<ParsedMethod> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("method_id") || !j["method_id"].is_string() ||
        !j.contains("contexts") || !j["contexts"].is_array()) {
      throw DataError(where + ": expected {\"method_id\": str, \"contexts\": [...]}");
    }
    ParsedMethod m;
    m.method_id = j["method_id"].get<std::string>();
    for (const auto& c : j["contexts"]) {
      if (!c.is_array() || c.size() != 3 || !c[0].is_string() || !c[1].is_string() || !c[2].is_string()) {
        throw DataError(where + ": each context must be [left, path, right]");
      }
      PathContext pc{c[0].get<std::string>(), c[1].get<std::string>(), c[2].get<std::string>()};
      if (pc.left.empty() || pc.path.empty() || pc.right.empty()) {
        throw DataError(where + ": empty context component");
      }
      m.contexts.push_back(std::move(pc));
    }
    out.push_back(std::move(m));
  }
  return out;
}

inline void write_interchange(std::ostream& out, const std::vector<ParsedMethod>& methods) {
  for (const auto& m : methods) {
    nlohmann::json j;
    j["method_id"] = m.method_id;
    j["contexts"] = nlohmann::json::array();
    for (const auto& c : m.contexts) j["contexts"].push_back({c.left, c.path, c.right});
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Frontends

inline std::vector<ParsedMethod> parse_java_source(std::string_view source, const std::string& file_path,
                                                   std::uint64_t seed, const ContextLimits& limits = {}) {
  std::vector<ParsedMethod> out;
  const auto asts = java::parse_methods(source);
  for (std::size_t i = 0; i < asts.size(); ++i) {
    ParsedMethod m;
    m.method_id = file_path + "#" + std::to_string(i);
    m.contexts = extract_path_contexts(asts[i].root, limits);
    cap_contexts(m, limits.max_contexts, seed);
    out.push_back(std::move(m));
  }
  return out;
}

/// Methods of one source file. A `<path>.astctx.jsonl` sidecar takes
/// precedence over the built-in frontend. Files that cannot be parsed
/// yield no methods and a warning.
inline std::vector<ParsedMethod> parse_file(const fs::path& repo_root, const SourceFileRef& file,
                                            std::uint64_t seed, const ContextLimits& limits = {}) {
  const bool is_sidecar = detail::ends_with(file.path, kContextSidecarSuffix);
  const fs::path sidecar = repo_root / (is_sidecar ? file.path : file.path + std::string(kContextSidecarSuffix));
  std::error_code ec;
  try {
    if (fs::is_regular_file(sidecar, ec)) {
      std::ifstream in(sidecar);
      if (!in) throw DataError("cannot open " + sidecar.string());
      auto methods = read_interchange(in, sidecar.string());
      for (auto& m : methods) cap_contexts(m, limits.max_contexts, seed);
      return methods;
    }
    if (file.language_tag == "java") {
      bool ok = true;
      const auto text = detail::read_file(repo_root / file.path, ok);
      if (!ok) throw DataError("cannot read " + file.path);
      return parse_java_source(text, file.path, seed, limits);
    }
  } catch (const std::exception& e) {
    warn("skipping " + (repo_root / file.path).string() + ": " + e.what());
    return {};
  }
  return {};  // no frontend for this language and no sidecar
}

inline RepoCode parse_repository(const fs::path& repo_root, const RepoRecord& record, std::uint64_t seed,
                                 const ContextLimits& limits = {}) {
  RepoCode code;
  code.repo_id = record.repo_id;
  for (const auto& src : record.sources) {
    code.files.push_back({src.path, parse_file(repo_root, src, seed, limits)});
  }
  return code;
}

// ---------------------------------------------------------------------------
// Method vectors

/// Corpus-wide document id of a method.
inline std::string method_doc_id(std::string_view repo_id, std::string_view method_id) {
  return std::string(repo_id) + "/" + std::string(method_id);
}

inline DocModel train_code_model(std::span<const RepoCode> corpus, const EmbedConfig& config) {
  std::vector<Document> docs;
  for (const auto& repo : corpus) {
    for (const auto& file : repo.files) {
      for (const auto& m : file.methods) {
        docs.emplace_back(method_doc_id(repo.repo_id, m.method_id), context_tokens(m));
      }
    }
  }
  const bool any = std::any_of(docs.begin(), docs.end(), [](const Document& d) { return !d.second.empty(); });
  if (!any) throw DataError("train_code_model: no path contexts in the corpus");
  return train_pvdbow(docs, config);
}

/// Trained model plus optional externally computed method vectors, keyed
/// by corpus-wide method id. Imported vectors win over the model.
struct CodeModel {
  const DocModel* model = nullptr;
  std::map<std::string, Embedding> imported;
  std::size_t dim = 128;
};

inline Embedding embed_method(const ParsedMethod& method, std::string_view repo_id, const CodeModel& ctx) {
  const auto id = method_doc_id(repo_id, method.method_id);
  if (const auto it = ctx.imported.find(id); it != ctx.imported.end()) return it->second;
  if (method.contexts.empty() || ctx.model == nullptr) return Embedding(ctx.dim, 0.0);
  return ctx.model->vector_or_infer(id, context_tokens(method));
}

/// Reads `method_id \t v1 ... vdim` rows.
inline std::map<std::string, Embedding> import_method_vectors(const fs::path& path, std::size_t dim = 128) {
  std::map<std::string, Embedding> out;
  for (auto& [id, v] : read_vectors_tsv(path, dim)) out[id] = std::move(v);
  return out;
}

/// Code vector C: methods aggregated per file, files aggregated per
/// repository. Repositories without methods map to zero.
inline Embedding source2vec(const RepoCode& repo, const CodeModel& ctx, Aggregator agg = Aggregator::mean) {
  std::vector<Embedding> file_vectors;
  for (const auto& file : repo.files) {
    if (file.methods.empty()) continue;
    std::vector<Embedding> method_vectors;
    method_vectors.reserve(file.methods.size());
    for (const auto& m : file.methods) method_vectors.push_back(embed_method(m, repo.repo_id, ctx));
    file_vectors.push_back(aggregate(method_vectors, agg));
  }
  if (file_vectors.empty()) return Embedding(ctx.dim, 0.0);
  return aggregate(file_vectors, agg);
}

}  // namespace repo2vec

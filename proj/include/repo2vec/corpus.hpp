#pragma once

// Corpus ingestion: one immediate subdirectory of the corpus root is one
// repository. Each repository becomes a RepoRecord holding its metadata
// text, its anonymous directory tree and the list of source files.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "repo2vec/common.hpp"

namespace repo2vec {

namespace fs = std::filesystem;

/// Free text of one repository in fixed field order: title, description,
/// topics, readme.
struct MetaDocument {
  std::string title;
  std::string description;
  std::vector<std::string> topics;
  std::string readme;

  /// Fields joined into a single document, one paragraph per field.
  std::string concatenated() const {
    std::string out = title;
    out += "\n\n";
    out += description;
    out += "\n\n";
    for (std::size_t i = 0; i < topics.size(); ++i) {
      if (i) out += ' ';
      out += topics[i];
    }
    out += "\n\n";
    out += readme;
    return out;
  }

  bool empty() const {
    return title.empty() && description.empty() && topics.empty() && readme.empty();
  }

  friend bool operator==(const MetaDocument&, const MetaDocument&) = default;
};

/// Unlabelled rooted tree. Node 0 is the root; nodes are numbered in
/// preorder and children keep their scan order.
class DirTree {
public:
  DirTree() : children_(1) {}

  /// Builds a tree from a parent array; parents[0] is ignored (root) and
  /// every other node must point to a lower index.
  static DirTree from_parents(const std::vector<std::size_t>& parents) {
    if (parents.empty()) throw InvalidArgument("DirTree: at least one node required");
    DirTree t;
    t.children_.assign(parents.size(), {});
    for (std::size_t i = 1; i < parents.size(); ++i) {
      if (parents[i] >= i) throw InvalidArgument("DirTree: parent must precede child");
      t.children_[parents[i]].push_back(i);
    }
    return t;
  }

  std::size_t add_child(std::size_t parent) {
    const std::size_t id = children_.size();
    children_.emplace_back();
    children_.at(parent).push_back(id);
    return id;
  }

  std::size_t size() const { return children_.size(); }
  std::size_t root() const { return 0; }
  const std::vector<std::size_t>& children(std::size_t node) const { return children_.at(node); }

  /// parent[i] for every node; the root maps to itself.
  std::vector<std::size_t> parents() const {
    std::vector<std::size_t> p(size(), 0);
    for (std::size_t n = 0; n < size(); ++n) {
      for (auto c : children_[n]) p[c] = n;
    }
    return p;
  }

  /// Undirected adjacency lists: parent first, then children in order.
  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(size());
    for (std::size_t n = 0; n < size(); ++n) {
      for (auto c : children_[n]) adj[c].push_back(n);
    }
    for (std::size_t n = 0; n < size(); ++n) {
      adj[n].insert(adj[n].end(), children_[n].begin(), children_[n].end());
    }
    return adj;
  }

  friend bool operator==(const DirTree&, const DirTree&) = default;

private:
  std::vector<std::vector<std::size_t>> children_;
};

struct SourceFileRef {
  std::string path;          // relative to the repository root, '/' separated
  std::string language_tag;  // selects the frontend

  friend bool operator==(const SourceFileRef&, const SourceFileRef&) = default;
};

struct RepoRecord {
  std::string repo_id;
  MetaDocument meta;
  DirTree tree;
  std::vector<SourceFileRef> sources;

  friend bool operator==(const RepoRecord&, const RepoRecord&) = default;
};

inline constexpr std::string_view kMetaSidecar = "repo-meta.json";
inline constexpr std::string_view kContextSidecarSuffix = ".astctx.jsonl";

inline std::map<std::string, std::string> default_language_map() {
  return {
      {".java", "java"},   {".py", "python"},   {".c", "c"},         {".h", "c"},
      {".cc", "cpp"},      {".cpp", "cpp"},     {".cxx", "cpp"},     {".hpp", "cpp"},
      {".js", "javascript"}, {".ts", "typescript"}, {".go", "go"},   {".rs", "rust"},
      {".kt", "kotlin"},   {".cs", "csharp"},   {".rb", "ruby"},     {".php", "php"},
      {".scala", "scala"}, {".swift", "swift"},
  };
}

struct IngestConfig {
  /// File extension (with dot, lowercase) → language tag.
  std::map<std::string, std::string> languages = default_language_map();
};

namespace detail {

inline bool is_vcs_dir(const std::string& name) {
  return name == ".git" || name == ".hg" || name == ".svn" || name == ".bzr" ||
         name == "CVS" || name == "_darcs" || name == ".fossil";
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Sidecar inputs belong to the tooling, not to the authored layout.
inline bool is_sidecar(const std::string& name, bool at_root) {
  return (at_root && name == kMetaSidecar) || ends_with(name, kContextSidecarSuffix);
}

struct Entry {
  std::string name;
  fs::path path;
  bool directory = false;
};

/// Sorted listing of a directory without following symlinks.
inline std::vector<Entry> list_dir(const fs::path& dir) {
  std::vector<Entry> out;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) {
    warn("cannot read directory " + dir.string() + ": " + ec.message());
    return out;
  }
  for (; it != fs::directory_iterator(); it.increment(ec)) {
    if (ec) {
      warn("error while listing " + dir.string() + ": " + ec.message());
      break;
    }
    Entry e;
    e.name = it->path().filename().string();
    e.path = it->path();
    std::error_code sec;
    const auto st = it->symlink_status(sec);
    e.directory = !sec && fs::is_directory(st);
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.name < b.name; });
  return out;
}

inline void build_tree(const fs::path& dir, std::size_t node, bool at_root, DirTree& tree) {
  for (const auto& e : list_dir(dir)) {
    if (e.directory && is_vcs_dir(e.name)) continue;
    if (!e.directory && is_sidecar(e.name, at_root)) continue;
    const auto child = tree.add_child(node);
    if (e.directory) build_tree(e.path, child, false, tree);
  }
}

inline std::string read_file(const fs::path& p, bool& ok) {
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    ok = false;
    return {};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  ok = static_cast<bool>(in) || in.eof();
  return ss.str();
}

inline void collect_sources(const fs::path& repo_root, const fs::path& dir, const std::string& rel,
                            const IngestConfig& config, std::vector<SourceFileRef>& out) {
  for (const auto& e : list_dir(dir)) {
    const std::string rel_path = rel.empty() ? e.name : rel + "/" + e.name;
    if (e.directory) {
      if (!is_vcs_dir(e.name)) collect_sources(repo_root, e.path, rel_path, config, out);
      continue;
    }
    if (ends_with(e.name, kContextSidecarSuffix)) {
      // A sidecar without its source file stands in for it.
      const std::string base = rel_path.substr(0, rel_path.size() - kContextSidecarSuffix.size());
      std::error_code ec;
      const bool base_is_source =
          fs::is_regular_file(repo_root / base, ec) &&
          config.languages.count(lower(fs::path(base).extension().string())) > 0;
      if (!base_is_source) out.push_back({rel_path, "astctx"});
      continue;
    }
    const auto ext = lower(e.path.extension().string());
    const auto it = config.languages.find(ext);
    if (it == config.languages.end()) continue;
    std::error_code ec;
    if (!fs::is_regular_file(e.path, ec)) continue;
    out.push_back({rel_path, it->second});
  }
}

}  // namespace detail

/// Metadata of one repository. Missing pieces become empty fields.
inline MetaDocument extract_metadata(const fs::path& repo_path) {
  MetaDocument meta;
  meta.title = repo_path.filename().string();
  if (meta.title.empty()) meta.title = repo_path.parent_path().filename().string();

  const auto sidecar = repo_path / std::string(kMetaSidecar);
  std::error_code ec;
  if (fs::is_regular_file(sidecar, ec)) {
    bool ok = true;
    const auto text = detail::read_file(sidecar, ok);
    if (!ok) {
      warn("cannot read " + sidecar.string());
    } else {
      try {
        const auto j = nlohmann::json::parse(text);
        if (j.contains("description") && j["description"].is_string()) {
          meta.description = j["description"].get<std::string>();
        }
        if (j.contains("topics") && j["topics"].is_array()) {
          for (const auto& t : j["topics"]) {
            if (t.is_string()) meta.topics.push_back(t.get<std::string>());
          }
        }
      } catch (const nlohmann::json::exception& e) {
        warn("malformed " + sidecar.string() + ": " + e.what());
      }
    }
  }

  for (const auto& e : detail::list_dir(repo_path)) {
    if (e.directory) continue;
    if (detail::lower(e.name).rfind("readme", 0) != 0) continue;
    if (!fs::is_regular_file(e.path, ec)) continue;
    bool ok = true;
    auto text = detail::read_file(e.path, ok);
    if (!ok) {
      warn("cannot read " + e.path.string());
      continue;
    }
    meta.readme = std::move(text);
    break;
  }
  return meta;
}

/// Name-free directory tree of one repository. Version-control directories
/// and tool sidecars are left out; symlinks become leaves.
inline DirTree extract_tree(const fs::path& repo_path) {
  DirTree tree;
  detail::build_tree(repo_path, tree.root(), true, tree);
  return tree;
}

inline std::vector<SourceFileRef> extract_sources(const fs::path& repo_path,
                                                  const IngestConfig& config = {}) {
  std::vector<SourceFileRef> out;
  detail::collect_sources(repo_path, repo_path, "", config, out);
  return out;
}

inline RepoRecord ingest_repository(const fs::path& repo_path, const IngestConfig& config = {}) {
  RepoRecord r;
  r.repo_id = repo_path.filename().string();
  r.meta = extract_metadata(repo_path);
  r.tree = extract_tree(repo_path);
  r.sources = extract_sources(repo_path, config);
  return r;
}

/// One record per non-hidden subdirectory of root, ordered by repo_id.
inline std::vector<RepoRecord> scan_corpus(const fs::path& root, const IngestConfig& config = {}) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw DataError("corpus root is not a readable directory: " + root.string());
  }
  fs::directory_iterator probe(root, ec);
  if (ec) throw DataError("cannot read corpus root " + root.string() + ": " + ec.message());

  std::vector<RepoRecord> records;
  for (const auto& e : detail::list_dir(root)) {
    if (!e.directory || e.name.empty() || e.name[0] == '.') continue;
    records.push_back(ingest_repository(e.path, config));
  }
  return records;
}

/// Tab-separated `repo_id  node_count  source_file_count`, one line per repo.
inline void write_manifest(std::ostream& out, const std::vector<RepoRecord>& records) {
  for (const auto& r : records) {
    out << r.repo_id << '\t' << r.tree.size() << '\t' << r.sources.size() << '\n';
  }
}

}  // namespace repo2vec

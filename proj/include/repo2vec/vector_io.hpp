#pragma once

// TSV import/export of labelled vectors: `id \t v1 \t ... \t vd`.

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "repo2vec/common.hpp"

namespace repo2vec {

using LabelledVector = std::pair<std::string, Embedding>;

inline void write_vector_row(std::ostream& out, std::string_view id, std::span<const double> v) {
  out << id;
  for (double x : v) out << '\t' << format_real(x);
  out << '\n';
}

inline void write_vectors_tsv(std::ostream& out, const std::vector<LabelledVector>& rows) {
  for (const auto& [id, v] : rows) write_vector_row(out, id, v);
}

/// Reads rows of `id \t floats`. Every row must carry exactly
/// expected_dim values when expected_dim is nonzero, otherwise all rows
/// must agree with the first.
inline std::vector<LabelledVector> read_vectors_tsv(std::istream& in, std::size_t expected_dim = 0,
                                                    std::string_view source = "vectors") {
  std::vector<LabelledVector> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, '\t');
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    if (fields.size() < 2) throw DataError(where + ": expected id and values");
    Embedding v;
    v.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) v.push_back(parse_real(fields[i], where));
    const std::size_t want = expected_dim ? expected_dim : (rows.empty() ? v.size() : rows.front().second.size());
    if (v.size() != want) {
      throw DataError(where + ": dimension mismatch (expected " + std::to_string(want) + ", got " +
                      std::to_string(v.size()) + ")");
    }
    rows.emplace_back(std::move(fields[0]), std::move(v));
  }
  return rows;
}

inline std::vector<LabelledVector> read_vectors_tsv(const std::filesystem::path& path,
                                                    std::size_t expected_dim = 0) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_vectors_tsv(in, expected_dim, path.string());
}

}  // namespace repo2vec

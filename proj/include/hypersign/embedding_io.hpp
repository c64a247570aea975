#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hypersign/error.hpp"
#include "hypersign/manifold.hpp"

namespace hypersign {

struct LoadedEmbeddings {
  EmbeddingStore store;
  std::vector<std::string> labels;  // one per row, virtual rows included
  std::size_t virtual_rows = 0;     // trailing rows that are virtual nodes
};

// First `rows` rows of a store (used to slice off trailing virtual nodes).
inline EmbeddingStore head_rows(const EmbeddingStore& store, std::size_t rows) {
  if (rows > store.rows()) throw Error("cannot take more rows than the store has");
  EmbeddingStore out(rows, store.dim(), store.eps());
  out.data().assign(store.data().begin(),
                    store.data().begin() + static_cast<std::ptrdiff_t>(rows * store.dim()));
  return out;
}

// Evaluation and analysis never see virtual rows.
inline void drop_virtual_rows(LoadedEmbeddings& loaded) {
  if (loaded.virtual_rows == 0) return;
  std::size_t real = loaded.store.rows() - loaded.virtual_rows;
  loaded.store = head_rows(loaded.store, real);
  loaded.labels.resize(real);
  loaded.virtual_rows = 0;
}

namespace detail {

// 17 significant digits: doubles round-trip exactly through decimal text.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

// TSV, one row per node: label then K coordinates. The header records the
// dimension, the ball guard and how many trailing rows are virtual nodes
// (none by default; evaluation and analysis never see them).
inline void save_embeddings(std::ostream& out, const EmbeddingStore& store,
                            const std::vector<std::string>& labels,
                            std::size_t virtual_rows = 0) {
  std::size_t emit_rows = store.rows();
  if (labels.size() + virtual_rows < emit_rows)
    throw Error("not enough labels for embedding rows");
  out << "# hypersign-embedding\tdim=" << store.dim() << "\teps="
      << detail::format_double(store.eps()) << "\tvirtual=" << virtual_rows << '\n';
  for (std::size_t i = 0; i < emit_rows; ++i) {
    bool is_virtual = i >= emit_rows - virtual_rows && virtual_rows > 0;
    if (is_virtual)
      out << "__virtual_" << (i - (emit_rows - virtual_rows)) << "__";
    else
      out << labels[i];
    for (double x : store.row(i)) out << '\t' << detail::format_double(x);
    out << '\n';
  }
}

inline LoadedEmbeddings load_embeddings(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# hypersign-embedding", 0) != 0)
    throw Error("missing embedding header line");

  auto field = [&](const std::string& key) -> std::string {
    auto pos = header.find(key + "=");
    if (pos == std::string::npos) throw Error("embedding header lacks " + key);
    pos += key.size() + 1;
    auto end = header.find_first_of("\t\n", pos);
    return header.substr(pos, end - pos);
  };
  std::size_t dim = std::stoul(field("dim"));
  double eps = std::stod(field("eps"));
  std::size_t virtual_rows = std::stoul(field("virtual"));

  std::vector<std::string> labels;
  std::vector<double> coords;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string label;
    if (!std::getline(fields, label, '\t'))
      throw Error("embedding line " + std::to_string(line_no) + " malformed");
    labels.push_back(label);
    std::string tok;
    std::size_t got = 0;
    while (std::getline(fields, tok, '\t')) {
      coords.push_back(std::stod(tok));
      ++got;
    }
    if (got != dim)
      throw Error("embedding line " + std::to_string(line_no) + ": expected " +
                  std::to_string(dim) + " coordinates, got " + std::to_string(got));
  }
  if (labels.empty()) throw Error("embedding file has no rows");

  EmbeddingStore store(labels.size(), dim, eps);
  store.data() = std::move(coords);
  return {std::move(store), std::move(labels), virtual_rows};
}

}  // namespace hypersign

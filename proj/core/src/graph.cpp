#include "secl/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>

#include "secl/error.hpp"

namespace secl {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if constexpr (std::is_floating_point_v<T>) {
    if (!tok.empty() && tok.front() == '+') ++first;
  }
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open: " + path.string());
  return in;
}

struct EdgeFile {
  std::vector<Edge> records;
  std::vector<std::size_t> line_numbers;
};

EdgeFile read_edge_records(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  EdgeFile out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto toks = split_ws(line);
    Index i = 0;
    Index j = 0;
    if (toks.size() != 2 || !parse_number(toks[0], i) || !parse_number(toks[1], j)) {
      throw ParseError(path.string(), line_no, "expected two integer node ids, got '" + line + "'");
    }
    if (i < 0 || j < 0) throw ParseError(path.string(), line_no, "negative node id");
    if (i == j) {
      throw ParseError(path.string(), line_no,
                       "self-loop " + std::to_string(i) + " " + std::to_string(j) + " rejected");
    }
    out.records.emplace_back(i, j);
    out.line_numbers.push_back(line_no);
  }
  return out;
}

DenseMatrix read_attributes_text(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::pair<Index, Index>> header;
  std::size_t header_line = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto toks = split_ws(line);
    if (first) {
      first = false;
      Index n = 0;
      Index d = 0;
      if (toks.size() == 2 && parse_number(toks[0], n) && parse_number(toks[1], d) && n > 0 && d > 0) {
        // Tentative: a two-integer first line is a header only if the row
        // count below it matches.
        header = {n, d};
        header_line = line_no;
      }
    }
    std::vector<double> row;
    row.reserve(toks.size());
    for (auto tok : toks) {
      double v = 0.0;
      if (!parse_number(tok, v)) {
        throw ParseError(path.string(), line_no, "bad float '" + std::string(tok) + "'");
      }
      if (!std::isfinite(v)) throw ParseError(path.string(), line_no, "non-finite attribute");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
    line_numbers.push_back(line_no);
  }

  std::size_t start = 0;
  // A two-integer first line over rows of a different width can only be a
  // header, so its row count must hold.
  if (header && header->second != 2 && rows.size() > 1 && static_cast<Index>(rows[1].size()) == header->second &&
      static_cast<Index>(rows.size()) - 1 != header->first) {
    throw ShapeError(path.string() + ": header on line " + std::to_string(header_line) + " declares " +
                     std::to_string(header->first) + " rows, found " + std::to_string(rows.size() - 1));
  }
  if (header && static_cast<Index>(rows.size()) - 1 == header->first) {
    start = 1;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (static_cast<Index>(rows[r].size()) != header->second) {
        throw ParseError(path.string(), line_numbers[r],
                         "expected " + std::to_string(header->second) + " values per header line " +
                             std::to_string(header_line) + ", got " + std::to_string(rows[r].size()));
      }
    }
  }
  const Index n = static_cast<Index>(rows.size() - start);
  const Index d = n > 0 ? static_cast<Index>(rows[start].size()) : (header ? header->second : 0);
  DenseMatrix x(n, d);
  for (Index r = 0; r < n; ++r) {
    const auto& row = rows[start + static_cast<std::size_t>(r)];
    if (static_cast<Index>(row.size()) != d) {
      throw ParseError(path.string(), line_numbers[start + static_cast<std::size_t>(r)],
                       "expected " + std::to_string(d) + " values, got " + std::to_string(row.size()));
    }
    for (Index c = 0; c < d; ++c) x(r, c) = row[static_cast<std::size_t>(c)];
  }
  return x;
}

bool has_bin_extension(const std::filesystem::path& p) { return p.extension() == ".bin"; }

}  // namespace

int Graph::num_classes() const {
  if (!labels || labels->empty()) return 0;
  return *std::max_element(labels->begin(), labels->end()) + 1;
}

Graph make_graph(Index num_nodes, const std::vector<Edge>& edge_records, DenseMatrix attributes,
                 std::optional<std::vector<int>> labels) {
  if (num_nodes < 0) throw ShapeError("negative node count");
  if (attributes.rows() != num_nodes) {
    throw ShapeError("attribute matrix has " + std::to_string(attributes.rows()) +
                     " rows but the graph has " + std::to_string(num_nodes) + " nodes");
  }
  require_finite(attributes, "attributes");
  if (labels) {
    if (static_cast<Index>(labels->size()) != num_nodes) {
      throw ShapeError("label vector has " + std::to_string(labels->size()) + " entries but the graph has " +
                       std::to_string(num_nodes) + " nodes");
    }
    for (int c : *labels) {
      if (c < 0) throw IndexError("negative class id " + std::to_string(c));
    }
  }
  std::vector<Edge> edges;
  edges.reserve(edge_records.size());
  for (auto [i, j] : edge_records) {
    if (i < 0 || j < 0 || i >= num_nodes || j >= num_nodes) {
      throw IndexError("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                       ") has an endpoint outside [0, " + std::to_string(num_nodes) + ")");
    }
    if (i == j) throw ContractError("self-loop on node " + std::to_string(i) + " rejected");
    edges.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  Graph g;
  g.num_nodes = num_nodes;
  g.edges = std::move(edges);
  g.attributes = std::move(attributes);
  g.labels = std::move(labels);
  g.raw_edge_records = edge_records.size();
  return g;
}

std::vector<int> read_labels(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto toks = split_ws(line);
    int c = 0;
    if (toks.size() != 1 || !parse_number(toks[0], c)) {
      throw ParseError(path.string(), line_no, "expected one integer class id, got '" + line + "'");
    }
    if (c < 0) throw ParseError(path.string(), line_no, "negative class id");
    labels.push_back(c);
  }
  return labels;
}

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (int c : labels) out << c << '\n';
}

Graph load_graph(const std::filesystem::path& edge_path, const std::filesystem::path& attr_path,
                 const std::optional<std::filesystem::path>& label_path) {
  DenseMatrix x = has_bin_extension(attr_path) ? read_matrix_binary(attr_path)
                                               : read_attributes_text(attr_path);
  const Index n = x.rows();
  EdgeFile ef = read_edge_records(edge_path);
  for (std::size_t k = 0; k < ef.records.size(); ++k) {
    const auto [i, j] = ef.records[k];
    if (i >= n || j >= n) {
      throw IndexError(edge_path.string() + ":" + std::to_string(ef.line_numbers[k]) + ": endpoint " +
                       std::to_string(std::max(i, j)) + " >= node count " + std::to_string(n));
    }
  }
  std::optional<std::vector<int>> labels;
  if (label_path) labels = read_labels(*label_path);
  return make_graph(n, ef.records, std::move(x), std::move(labels));
}

void write_graph(const Graph& g, const std::filesystem::path& edge_path,
                 const std::filesystem::path& attr_path,
                 const std::optional<std::filesystem::path>& label_path) {
  {
    std::ofstream out(edge_path, std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + edge_path.string());
    for (auto [i, j] : g.edges) out << i << ' ' << j << '\n';
  }
  if (has_bin_extension(attr_path)) {
    write_matrix_binary(attr_path, g.attributes);
  } else {
    std::ofstream out(attr_path, std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + attr_path.string());
    out.precision(std::numeric_limits<double>::max_digits10);
    out << g.attributes.rows() << ' ' << g.attributes.cols() << '\n';
    for (Index r = 0; r < g.attributes.rows(); ++r) {
      for (Index c = 0; c < g.attributes.cols(); ++c) {
        if (c) out << ' ';
        out << g.attributes(r, c);
      }
      out << '\n';
    }
  }
  if (label_path) {
    if (!g.labels) throw ContractError("graph has no labels to write");
    write_labels(*label_path, *g.labels);
  }
}

Eigen::VectorXd degree_vector(const Graph& g) {
  Eigen::VectorXd k = Eigen::VectorXd::Zero(g.num_nodes);
  for (auto [i, j] : g.edges) {
    k[i] += 1.0;
    k[j] += 1.0;
  }
  return k;
}

namespace {

SparseMatrix build_symmetric(const Graph& g, bool self_loops, const Eigen::VectorXd* inv_sqrt_deg) {
  std::vector<Eigen::Triplet<double, Index>> trips;
  trips.reserve(g.edges.size() * 2 + (self_loops ? static_cast<std::size_t>(g.num_nodes) : 0));
  auto weight = [&](Index i, Index j) {
    return inv_sqrt_deg ? (*inv_sqrt_deg)[i] * (*inv_sqrt_deg)[j] : 1.0;
  };
  for (auto [i, j] : g.edges) {
    trips.emplace_back(i, j, weight(i, j));
    trips.emplace_back(j, i, weight(j, i));
  }
  if (self_loops) {
    for (Index i = 0; i < g.num_nodes; ++i) trips.emplace_back(i, i, weight(i, i));
  }
  SparseMatrix s(g.num_nodes, g.num_nodes);
  s.setFromTriplets(trips.begin(), trips.end());
  s.makeCompressed();
  return s;
}

}  // namespace

SparseMatrix adjacency(const Graph& g) { return build_symmetric(g, false, nullptr); }

SparseMatrix self_looped_adjacency(const Graph& g) { return build_symmetric(g, true, nullptr); }

SparseMatrix normalized_adjacency(const Graph& g) {
  Eigen::VectorXd inv_sqrt = degree_vector(g);
  for (Index i = 0; i < inv_sqrt.size(); ++i) inv_sqrt[i] = 1.0 / std::sqrt(inv_sqrt[i] + 1.0);
  return build_symmetric(g, true, &inv_sqrt);
}

DenseMatrix modularity_matrix(const Graph& g) {
  if (g.num_edges() == 0) {
    throw DegenerateGraphError("modularity matrix is undefined for a graph without edges");
  }
  const Eigen::VectorXd k = degree_vector(g);
  const double two_m = 2.0 * static_cast<double>(g.num_edges());
  DenseMatrix b = -(k * k.transpose()) / two_m;
  for (auto [i, j] : g.edges) {
    b(i, j) += 1.0;
    b(j, i) += 1.0;
  }
  return b;
}

ModularityOperator::ModularityOperator(const Graph& g, Index dense_cap)
    : adjacency_(secl::adjacency(g)), degrees_(degree_vector(g)) {
  if (g.num_edges() == 0) {
    throw DegenerateGraphError("modularity is undefined for a graph without edges");
  }
  two_m_ = 2.0 * static_cast<double>(g.num_edges());
  if (g.num_nodes <= dense_cap) dense_ = modularity_matrix(g);
}

DenseMatrix ModularityOperator::apply(const DenseMatrix& u) const {
  if (u.rows() != size()) {
    throw ShapeError("modularity operator of size " + std::to_string(size()) + " applied to " +
                     shape_string(u));
  }
  if (dense_) {
    DenseMatrix out(u.rows(), u.cols());
    out.noalias() = *dense_ * u;
    return out;
  }
  DenseMatrix out(u.rows(), u.cols());
  out.noalias() = adjacency_ * u;
  const Eigen::RowVectorXd ktu = degrees_.transpose() * u;
  out.noalias() -= degrees_ * ktu / two_m_;
  return out;
}

DenseMatrix ModularityOperator::materialize() const {
  if (dense_) return *dense_;
  DenseMatrix b = to_dense(adjacency_);
  b.noalias() -= degrees_ * degrees_.transpose() / two_m_;
  return b;
}

GraphOperators GraphOperators::build(const Graph& g, Index modularity_dense_cap) {
  GraphOperators ops;
  ops.a = adjacency(g);
  ops.a_tilde = self_looped_adjacency(g);
  ops.a_hat = normalized_adjacency(g);
  ops.degrees = degree_vector(g);
  if (g.num_edges() > 0) ops.modularity.emplace(g, modularity_dense_cap);
  return ops;
}

}  // namespace secl

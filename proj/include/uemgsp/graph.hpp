#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uemgsp/rng.hpp"

namespace uemgsp {

using Coords = Eigen::MatrixX2d;

/// Undirected weighted graph over nodes embedded in the plane.
///
/// Invariants: adjacency is square, symmetric, has a zero diagonal and
/// nonnegative entries; coords has one row per node. `k` and `seed` record
/// how a k-NN instance was built (left at 0 when not applicable).
struct Graph {
  Coords coords;
  Eigen::MatrixXd adjacency;
  int k = 0;
  std::uint64_t seed = 0;

  int n_nodes() const { return static_cast<int>(adjacency.rows()); }
};

inline void validate(const Graph& g) {
  const auto& a = g.adjacency;
  if (a.rows() != a.cols()) throw std::invalid_argument("graph: adjacency must be square");
  if (a.rows() < 1) throw std::invalid_argument("graph: empty adjacency");
  if (g.coords.rows() != a.rows())
    throw std::invalid_argument("graph: coords/adjacency size mismatch");
  if (!a.allFinite()) throw std::invalid_argument("graph: non-finite adjacency entry");
  for (int i = 0; i < a.rows(); ++i) {
    if (a(i, i) != 0.0) throw std::invalid_argument("graph: nonzero diagonal");
    for (int j = 0; j < a.cols(); ++j) {
      if (a(i, j) < 0.0) throw std::invalid_argument("graph: negative edge weight");
      if (a(i, j) != a(j, i)) throw std::invalid_argument("graph: adjacency not symmetric");
    }
  }
}

/// Depth-first reachability from node 0.
inline bool is_connected(const Eigen::MatrixXd& adjacency) {
  const int n = static_cast<int>(adjacency.rows());
  if (n <= 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      if (adjacency(u, v) > 0.0 && !seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

namespace detail {

// Binary k-NN adjacency, symmetrized by union. Neighbour ranking breaks
// distance ties by the lower node index so the construction is deterministic.
inline Eigen::MatrixXd knn_adjacency(const Coords& coords, int k) {
  const int n = static_cast<int>(coords.rows());
  if (n < 2) throw std::invalid_argument("knn_adjacency: need at least 2 nodes");
  if (k < 1 || k >= n) throw std::invalid_argument("knn_adjacency: require 1 <= k < n_nodes");
  if (!coords.allFinite()) throw std::invalid_argument("knn_adjacency: non-finite coordinate");

  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> order;
  std::vector<double> dist2(n);
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      dist2[j] = (coords.row(i) - coords.row(j)).squaredNorm();
      order.push_back(j);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (dist2[a] != dist2[b]) return dist2[a] < dist2[b];
      return a < b;
    });
    for (int r = 0; r < k; ++r) {
      const int j = order[r];
      adj(i, j) = 1.0;
      adj(j, i) = 1.0;
    }
  }
  return adj;
}

}  // namespace detail

/// Builds the union-symmetrized binary k-NN graph of the given points.
/// Throws std::runtime_error("disconnected graph") when the result is not
/// connected; `seed` is only recorded as provenance metadata.
inline Graph build_knn_graph(const Coords& coords, int k, std::uint64_t seed = 0) {
  Eigen::MatrixXd adj = detail::knn_adjacency(coords, k);
  if (!is_connected(adj)) throw std::runtime_error("disconnected graph");
  return Graph{coords, std::move(adj), k, seed};
}

/// Samples node coordinates uniformly from the unit square and retries with
/// derived seeds until the k-NN graph comes out connected.
inline Graph random_connected_graph(int n_nodes, int k, std::uint64_t seed,
                                    int max_attempts = 64) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    Coords coords(n_nodes, 2);
    for (int i = 0; i < n_nodes; ++i) {
      coords(i, 0) = uniform_unit(rng);
      coords(i, 1) = uniform_unit(rng);
    }
    Eigen::MatrixXd adj = detail::knn_adjacency(coords, k);
    if (is_connected(adj)) return Graph{std::move(coords), std::move(adj), k, seed};
  }
  throw std::runtime_error("disconnected graph: resampling exhausted");
}

inline Eigen::VectorXd degree_vector(const Graph& g) {
  return g.adjacency.rowwise().sum();
}

/// Combinatorial Laplacian L = D - A.
inline Eigen::MatrixXd laplacian(const Graph& g) {
  Eigen::MatrixXd l = -g.adjacency;
  l.diagonal() = degree_vector(g);
  return l;
}

/// Symmetric doubly stochastic consensus matrix Z = I - eps * L with
/// eps = 1 / (1.25 * max_degree). Valid as a lazy random-walk transition
/// matrix; the degree margin keeps every self-loop weight at least 0.2 on
/// binary graphs.
struct ConsensusMatrix {
  Eigen::MatrixXd entries;
  double epsilon = 0.0;
};

inline void validate(const ConsensusMatrix& b) {
  const auto& z = b.entries;
  const int n = static_cast<int>(z.rows());
  if (n < 1 || z.cols() != n) throw std::invalid_argument("consensus: matrix must be square");
  if (!(b.epsilon > 0.0)) throw std::invalid_argument("consensus: epsilon must be positive");
  constexpr double tol = 1e-12;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (z(i, j) < 0.0) throw std::invalid_argument("consensus: negative entry");
      if (z(i, j) != z(j, i)) throw std::invalid_argument("consensus: not symmetric");
      row += z(i, j);
    }
    if (std::abs(row - 1.0) > tol) throw std::invalid_argument("consensus: row sum not 1");
  }
}

inline ConsensusMatrix consensus_matrix(const Graph& g) {
  validate(g);
  if (!is_connected(g.adjacency)) throw std::runtime_error("irreducibility violated");
  const double max_degree = degree_vector(g).maxCoeff();
  const double eps = 1.0 / (1.25 * max_degree);
  Eigen::MatrixXd z = -eps * laplacian(g);
  z.diagonal().array() += 1.0;
  return ConsensusMatrix{std::move(z), eps};
}

namespace detail {

// Shortest decimal form that parses back to the same double.
inline std::string fmt_double(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Plain-text edge list:
///   line 1:            n_nodes k seed
///   one line per edge: i j weight   (i < j, nonzero weights only)
///   one line per node: coord i x y
inline void save_graph(const Graph& g, const std::string& path) {
  validate(g);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_graph: cannot open " + path);
  out << g.n_nodes() << ' ' << g.k << ' ' << g.seed << '\n';
  for (int i = 0; i < g.n_nodes(); ++i)
    for (int j = i + 1; j < g.n_nodes(); ++j)
      if (g.adjacency(i, j) != 0.0)
        out << i << ' ' << j << ' ' << detail::fmt_double(g.adjacency(i, j)) << '\n';
  for (int i = 0; i < g.n_nodes(); ++i)
    out << "coord " << i << ' ' << detail::fmt_double(g.coords(i, 0)) << ' '
        << detail::fmt_double(g.coords(i, 1)) << '\n';
  if (!out) throw std::runtime_error("save_graph: write failed for " + path);
}

inline Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_graph: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_graph: malformed header");
  int n = 0, k = 0;
  std::uint64_t seed = 0;
  {
    std::istringstream head(line);
    if (!(head >> n >> k >> seed) || n < 1)
      throw std::runtime_error("load_graph: malformed header");
  }
  Graph g;
  g.adjacency = Eigen::MatrixXd::Zero(n, n);
  g.coords = Coords::Zero(n, 2);
  g.k = k;
  g.seed = seed;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string first;
    row >> first;
    if (first == "coord") {
      int i = 0;
      double x = 0.0, y = 0.0;
      if (!(row >> i >> x >> y) || i < 0 || i >= n)
        throw std::runtime_error("load_graph: malformed coord line");
      g.coords(i, 0) = x;
      g.coords(i, 1) = y;
    } else {
      int i = std::stoi(first), j = 0;
      double w = 0.0;
      if (!(row >> j >> w) || i < 0 || j < 0 || i >= n || j >= n)
        throw std::runtime_error("load_graph: malformed edge line");
      g.adjacency(i, j) = w;
      g.adjacency(j, i) = w;
    }
  }
  validate(g);
  return g;
}

}  // namespace uemgsp

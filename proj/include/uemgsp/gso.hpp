#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "uemgsp/diffusion.hpp"
#include "uemgsp/graph.hpp"
#include "uemgsp/uem.hpp"

namespace uemgsp {

enum class GsoKind {
  laplacian,
  extended_laplacian,
  shortest_path,
  markov,
  uem,
};

/// Recipe for one graph shift operator. Only the fields relevant to `kind`
/// are read; the static constructors set them.
struct GsoSpec {
  GsoKind kind = GsoKind::laplacian;
  int t = 1;          // diffusion scale (extended_laplacian, uem)
  double rho = 0.4;   // kernel bandwidth (extended_laplacian, uem)
  int max_hops = 2;   // shortest_path
  double m = 0.0;     // uem
  double n = 0.0;     // uem

  static GsoSpec laplacian() { return GsoSpec{GsoKind::laplacian, 0, 0.0, 0, 0.0, 0.0}; }
  static GsoSpec extended(int t, double rho) {
    return GsoSpec{GsoKind::extended_laplacian, t, rho, 0, 0.0, 0.0};
  }
  static GsoSpec shortest_path(int max_hops) {
    return GsoSpec{GsoKind::shortest_path, 0, 0.0, max_hops, 0.0, 0.0};
  }
  static GsoSpec markov() { return GsoSpec{GsoKind::markov, 0, 0.0, 0, 0.0, 0.0}; }
  static GsoSpec uem(double m, double n, int t, double rho) {
    return GsoSpec{GsoKind::uem, t, rho, 0, m, n};
  }
};

/// Unweighted hop distances via per-source breadth-first search;
/// -1 marks unreachable pairs.
inline Eigen::MatrixXi hop_distances(const Eigen::MatrixXd& adjacency) {
  const int n = static_cast<int>(adjacency.rows());
  Eigen::MatrixXi dist = Eigen::MatrixXi::Constant(n, n, -1);
  std::vector<int> frontier, next;
  for (int s = 0; s < n; ++s) {
    dist(s, s) = 0;
    frontier.assign(1, s);
    int depth = 0;
    while (!frontier.empty()) {
      ++depth;
      next.clear();
      for (const int u : frontier)
        for (int v = 0; v < n; ++v)
          if (adjacency(u, v) > 0.0 && dist(s, v) < 0) {
            dist(s, v) = depth;
            next.push_back(v);
          }
      frontier.swap(next);
    }
  }
  return dist;
}

inline Eigen::MatrixXd build_gso(const Graph& g, const GsoSpec& spec) {
  switch (spec.kind) {
    case GsoKind::laplacian:
      validate(g);
      return laplacian(g);
    case GsoKind::extended_laplacian:
      return extended_adjacency(consensus_matrix(g), spec.t, spec.rho).l_bar;
    case GsoKind::shortest_path: {
      validate(g);
      if (spec.max_hops < 1)
        throw std::invalid_argument("build_gso: max_hops must be at least 1");
      // Inverse hop distance, truncated after max_hops; at max_hops = 1 this
      // is exactly the binary adjacency matrix.
      const Eigen::MatrixXi dist = hop_distances(g.adjacency);
      const int n = g.n_nodes();
      Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const int h = dist(i, j);
          if (i != j && h >= 1 && h <= spec.max_hops) s(i, j) = 1.0 / h;
        }
      return s;
    }
    case GsoKind::markov:
      return consensus_matrix(g).entries;
    case GsoKind::uem:
      return build_uem(extended_adjacency(consensus_matrix(g), spec.t, spec.rho),
                       spec.m, spec.n)
          .entries;
  }
  throw std::invalid_argument("build_gso: unknown kind");
}

/// One named detector method: which operator family it decomposes and which
/// structural hyperparameters are swept for it. The names are stable CLI
/// identifiers.
struct MethodSpec {
  std::string name;
  GsoKind kind = GsoKind::laplacian;
  int fixed_t = 0;    // extended_laplacian: pinned diffusion scale
  int max_hops = 0;   // shortest_path
  bool sweep_rho = false;
  bool sweep_mnt = false;

  GsoSpec to_spec(double rho, double m, double n, int t) const {
    switch (kind) {
      case GsoKind::laplacian: return GsoSpec::laplacian();
      case GsoKind::extended_laplacian: return GsoSpec::extended(fixed_t, rho);
      case GsoKind::shortest_path: return GsoSpec::shortest_path(max_hops);
      case GsoKind::markov: return GsoSpec::markov();
      case GsoKind::uem: return GsoSpec::uem(m, n, t, rho);
    }
    throw std::invalid_argument("to_spec: unknown kind");
  }
};

inline const std::vector<MethodSpec>& all_methods() {
  static const std::vector<MethodSpec> methods = {
      {"gft", GsoKind::laplacian, 0, 0, false, false},
      {"df1", GsoKind::extended_laplacian, 1, 0, true, false},
      {"df2", GsoKind::extended_laplacian, 2, 0, true, false},
      {"sp2", GsoKind::shortest_path, 0, 2, false, false},
      {"sp3", GsoKind::shortest_path, 0, 3, false, false},
      {"mrk", GsoKind::markov, 0, 0, false, false},
      {"uem", GsoKind::uem, 0, 0, true, true},
  };
  return methods;
}

inline const MethodSpec& method_from_name(const std::string& name) {
  for (const auto& m : all_methods())
    if (m.name == name) return m;
  throw std::invalid_argument("unknown kind: " + name);
}

}  // namespace uemgsp

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "uemgsp/graph.hpp"

namespace uemgsp {

namespace detail {

inline Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& m, int t) {
  const auto n = m.rows();
  if (t == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd acc = m;
  for (int i = 1; i < t; ++i) acc = acc * m;
  return acc;
}

}  // namespace detail

/// Squared diffusion distances at scale t over a lazy random walk:
///   d2(i, j) = N * sum_v (B^t(i, v) - B^t(j, v))^2
/// d2 is symmetric with a zero diagonal; t = 0 gives 2N off the diagonal.
struct DiffusionDistances {
  int t = 0;
  Eigen::MatrixXd d2;
};

inline DiffusionDistances diffusion_distances(const ConsensusMatrix& b, int t) {
  if (t < 0) throw std::invalid_argument("diffusion_distances: t must be nonnegative");
  validate(b);
  const int n = static_cast<int>(b.entries.rows());
  const Eigen::MatrixXd bt = detail::matrix_power(b.entries, t);
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = n * (bt.row(i) - bt.row(j)).squaredNorm();
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }
  return DiffusionDistances{t, std::move(d2)};
}

/// Diffusion-extended graph matrices at scale t.
///
/// a_bar(i, j) = B(i, j) + exp(-d2(i, j) / (rho * N)) for i != j, zero on the
/// diagonal; d_bar holds the extended degrees (row sums of a_bar) and
/// l_bar = diag(d_bar) - a_bar. a_bar and l_bar are built bitwise symmetric.
struct ExtendedMatrices {
  int t = 1;
  double rho = 0.0;
  Eigen::MatrixXd a_bar;
  Eigen::VectorXd d_bar;
  Eigen::MatrixXd l_bar;
};

inline ExtendedMatrices extended_adjacency(const ConsensusMatrix& b, int t, double rho) {
  if (t < 1) throw std::invalid_argument("extended_adjacency: t must be at least 1");
  if (!(rho > 0.0)) throw std::invalid_argument("extended_adjacency: rho must be positive");
  const DiffusionDistances dd = diffusion_distances(b, t);
  const int n = static_cast<int>(b.entries.rows());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = b.entries(i, j) + std::exp(-dd.d2(i, j) / (rho * n));
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  Eigen::VectorXd d = a.rowwise().sum();
  Eigen::MatrixXd l = -a;
  l.diagonal() = d;
  return ExtendedMatrices{t, rho, std::move(a), std::move(d), std::move(l)};
}

}  // namespace uemgsp

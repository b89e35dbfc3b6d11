#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

// Brute-force reference implementations. Everything here is written straight
// from the definitions, independent of the library's algorithms, so the two
// can disagree only when one of them is wrong.
namespace oracle {

inline Eigen::MatrixXd mat_mul(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
  return c;
}

inline Eigen::MatrixXd mat_pow(const Eigen::MatrixXd& m, int t) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  for (int i = 0; i < t; ++i) acc = mat_mul(acc, m);
  return acc;
}

// d2(i, j) = N * sum_v (B^t(i, v) - B^t(j, v))^2, elementwise from scratch.
inline Eigen::MatrixXd diffusion_d2(const Eigen::MatrixXd& b, int t) {
  const Eigen::Index n = b.rows();
  const Eigen::MatrixXd bt = mat_pow(b, t);
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Eigen::Index v = 0; v < n; ++v) {
        const double diff = bt(i, v) - bt(j, v);
        s += diff * diff;
      }
      d2(i, j) = static_cast<double>(n) * s;
    }
  return d2;
}

inline Eigen::MatrixXd extended_a_bar(const Eigen::MatrixXd& b, int t, double rho) {
  const Eigen::Index n = b.rows();
  const Eigen::MatrixXd d2 = diffusion_d2(b, t);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) a(i, j) = b(i, j) + std::exp(-d2(i, j) / (rho * static_cast<double>(n)));
  return a;
}

// All-pairs unweighted hop counts; -1 for unreachable pairs.
inline Eigen::MatrixXi floyd_warshall_hops(const Eigen::MatrixXd& adjacency) {
  const int n = static_cast<int>(adjacency.rows());
  constexpr int inf = 1 << 28;
  Eigen::MatrixXi d = Eigen::MatrixXi::Constant(n, n, inf);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0;
    for (int j = 0; j < n; ++j)
      if (adjacency(i, j) > 0.0) d(i, j) = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (d(i, j) >= inf) d(i, j) = -1;
  return d;
}

inline bool connected_union_find(const Eigen::MatrixXd& adjacency) {
  const int n = static_cast<int>(adjacency.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (adjacency(i, j) > 0.0) parent[find(i)] = find(j);
  for (int i = 1; i < n; ++i)
    if (find(i) != find(0)) return false;
  return true;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double population_std(const std::vector<double>& v) {
  const double mu = mean(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace oracle

namespace testutil {

// Scratch directory removed on scope exit.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    const auto tick = static_cast<std::uint64_t>(
        std::chrono::steady_clock::now().time_since_epoch().count());
    path = std::filesystem::temp_directory_path() /
           ("uemgsp-" + tag + "-" + std::to_string(++counter) + "-" + std::to_string(tick));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace testutil

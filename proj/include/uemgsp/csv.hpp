#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uemgsp/detector.hpp"
#include "uemgsp/graph.hpp"
#include "uemgsp/spectral.hpp"

namespace uemgsp {

// Numbers are written in shortest round-trip decimal form, so equal configs
// and seeds produce byte-identical files.
using detail::fmt_double;

inline std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  return out;
}

inline void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& path) {
  auto out = open_csv(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << fmt_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

/// Two columns: eigenvalue, transform coefficient of one signal.
inline void write_spectrum_csv(const SpectralBasis& basis, const Eigen::VectorXd& coeffs,
                               const std::string& path) {
  if (coeffs.size() != basis.eigenvalues.size())
    throw std::invalid_argument("write_spectrum_csv: length mismatch");
  auto out = open_csv(path);
  out << "eigenvalue,coefficient\n";
  for (Eigen::Index l = 0; l < coeffs.size(); ++l)
    out << fmt_double(basis.eigenvalues(l)) << ',' << fmt_double(coeffs(l)) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

/// Full cross-validation table of one grid search. Columns for axes the
/// method does not sweep are left empty.
inline void write_grid_csv(const std::vector<GridPointScore>& table, const GridAxes& axes,
                           const std::string& gso_name, const std::string& path) {
  auto out = open_csv(path);
  out << "gso_kind,lambda_cut_q,beta,rho,m,n,t,mean_f1\n";
  for (const auto& row : table) {
    out << gso_name << ',' << fmt_double(row.lambda_cut_q) << ',' << fmt_double(row.beta)
        << ',';
    if (!axes.rhos.empty()) out << fmt_double(row.sp.rho);
    out << ',';
    if (!axes.ms.empty()) out << fmt_double(row.sp.m);
    out << ',';
    if (!axes.ns.empty()) out << fmt_double(row.sp.n);
    out << ',';
    if (!axes.ts.empty()) out << row.sp.t;
    out << ',' << fmt_double(row.mean_f1) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace uemgsp

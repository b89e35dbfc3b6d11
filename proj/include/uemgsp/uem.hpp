#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

#include "uemgsp/diffusion.hpp"

namespace uemgsp {

/// Coordinates of one member of the unified extended-matrix family.
struct UemParams {
  double m = 0.0;
  double n = 0.0;
  int t = 1;
  double rho = 0.0;
};

inline void validate(const UemParams& p) {
  if (!(p.m >= 0.0 && p.m <= 1.0 && p.n >= 0.0 && p.n <= 1.0))
    throw std::invalid_argument("invalid UEM parameter: m and n must lie in [0, 1]");
  if (p.t < 1) throw std::invalid_argument("invalid UEM parameter: t must be at least 1");
  if (!(p.rho > 0.0)) throw std::invalid_argument("invalid UEM parameter: rho must be positive");
}

struct UemMatrix {
  UemParams params;
  Eigen::MatrixXd entries;
};

/// P(m, n) = m * diag(d_bar) + (2n - 1)(m - 1) * a_bar.
///
/// Degenerate corners recover the classical operators:
///   (0, 0)   -> a_bar
///   (0.5, 1) -> l_bar / 2
///   (1, n)   -> diag(d_bar) for every n
inline UemMatrix build_uem(const ExtendedMatrices& ext, double m, double n) {
  if (!(m >= 0.0 && m <= 1.0 && n >= 0.0 && n <= 1.0))
    throw std::invalid_argument("invalid UEM parameter: m and n must lie in [0, 1]");
  const double coef = (2.0 * n - 1.0) * (m - 1.0);
  Eigen::MatrixXd p = coef * ext.a_bar;
  p.diagonal() = m * ext.d_bar;
  return UemMatrix{UemParams{m, n, ext.t, ext.rho}, std::move(p)};
}

/// Collapses (m, n) to the canonical label of its matrix, for reporting.
///
/// Whenever the adjacency coefficient (2n - 1)(m - 1) vanishes with m > 0,
/// P(m, n) is m * diag(d_bar): a positive multiple of the extended-degree
/// matrix. A positive rescaling of a shift operator keeps its eigenvectors
/// and scales the spectrum, so a relative-quantile highpass detector built
/// on it is unchanged; every such lattice point names the same detector and
/// reports collapse them to (1, 0.5). Likewise m = 0, n < 0.5 yields
/// (1 - 2n) * a_bar, a positive multiple of the extended-adjacency matrix,
/// reported as (0, 0). All other points (including negative multiples,
/// which reverse the spectral order) keep their own label.
inline std::pair<double, double> canonical_uem_label(double m, double n) {
  const double coef = (2.0 * n - 1.0) * (m - 1.0);
  if (m > 0.0 && coef == 0.0) return {1.0, 0.5};
  if (m == 0.0 && n < 0.5) return {0.0, 0.0};
  return {m, n};
}

/// Positive-semidefiniteness condition for P(m, n):
///   (2m - 1) / (2(m - 1)) <= n <= 1 / (2(1 - m))
/// The m = 1 member is diagonal with nonnegative entries, hence PSD for
/// every n; both bounds blow up there, so it is handled explicitly.
inline bool psd_condition_holds(double m, double n) {
  if (m == 1.0) return true;
  const double lower = (2.0 * m - 1.0) / (2.0 * (m - 1.0));
  const double upper = 1.0 / (2.0 * (1.0 - m));
  return lower <= n && n <= upper;
}

/// Weyl gap matrix G(n) = diag(d_bar) - (2n - 1) * a_bar. PSD for all
/// n in [0, 1]; it bounds eigenvalue growth of the family in m from below.
inline Eigen::MatrixXd weyl_gap_matrix(const ExtendedMatrices& ext, double n) {
  if (!(n >= 0.0 && n <= 1.0))
    throw std::invalid_argument("invalid UEM parameter: n must lie in [0, 1]");
  const double coef = -(2.0 * n - 1.0);
  Eigen::MatrixXd g = coef * ext.a_bar;
  g.diagonal() = ext.d_bar;
  return g;
}

}  // namespace uemgsp

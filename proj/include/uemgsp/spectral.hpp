#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace uemgsp {

/// Orthonormal eigenbasis of a symmetric graph shift operator.
///
/// Eigenvalues are sorted ascending; eigenvectors(:, l) belongs to
/// eigenvalues(l). Each eigenvector's sign is fixed so its largest-magnitude
/// component is positive (first such component on exact ties), which makes
/// the decomposition a pure function of the input matrix.
struct SpectralBasis {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  std::string source;  // free-form label of the operator that was decomposed

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

namespace detail {

inline void fix_eigenvector_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double mag = std::abs(vectors(i, j));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (vectors(pivot, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

}  // namespace detail

/// Symmetric eigendecomposition.
///
/// The operator is prescaled by a power of two so its largest entry lands in
/// [0.5, 1) before the solve, and the eigenvalues are scaled back afterwards.
/// Power-of-two scaling is exact in floating point, so spectra commute
/// bitwise with such rescalings of the input: decompose(2 * S) returns the
/// identical eigenvectors and exactly doubled eigenvalues. Rejects matrices
/// whose asymmetry exceeds 1e-10 in max norm.
inline SpectralBasis decompose(const Eigen::MatrixXd& gso, std::string source = "") {
  if (gso.rows() != gso.cols() || gso.rows() < 1)
    throw std::invalid_argument("non-symmetric GSO: matrix must be square and nonempty");
  const double asymmetry = (gso - gso.transpose()).cwiseAbs().maxCoeff();
  if (!(asymmetry <= 1e-10)) throw std::invalid_argument("non-symmetric GSO");

  double down = 1.0, up = 1.0;
  const double amax = gso.cwiseAbs().maxCoeff();
  if (amax > 0.0 && std::isfinite(amax)) {
    int exp2 = 0;
    std::frexp(amax, &exp2);
    down = std::ldexp(1.0, -exp2);
    up = std::ldexp(1.0, exp2);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gso * down);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("decompose: eigendecomposition failed");

  SpectralBasis basis;
  basis.eigenvalues = solver.eigenvalues() * up;
  basis.eigenvectors = solver.eigenvectors();
  detail::fix_eigenvector_signs(basis.eigenvectors);
  basis.source = std::move(source);
  return basis;
}

/// Forward graph Fourier transform: coefficients = U^T x.
inline Eigen::VectorXd gft(const SpectralBasis& basis, const Eigen::VectorXd& signal) {
  if (signal.size() != basis.eigenvectors.rows())
    throw std::invalid_argument("gft: length mismatch");
  return basis.eigenvectors.transpose() * signal;
}

/// Inverse transform: x = U coefficients.
inline Eigen::VectorXd igft(const SpectralBasis& basis, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != basis.eigenvectors.cols())
    throw std::invalid_argument("igft: length mismatch");
  return basis.eigenvectors * coeffs;
}

/// Keeps coefficients whose eigenvalue is strictly above lambda_cut, zeroes
/// the rest.
inline Eigen::VectorXd highpass_filter(const SpectralBasis& basis,
                                       const Eigen::VectorXd& coeffs,
                                       double lambda_cut) {
  if (coeffs.size() != basis.eigenvalues.size())
    throw std::invalid_argument("highpass_filter: length mismatch");
  Eigen::VectorXd out = coeffs;
  for (Eigen::Index l = 0; l < out.size(); ++l)
    if (!(basis.eigenvalues(l) > lambda_cut)) out(l) = 0.0;
  return out;
}

}  // namespace uemgsp

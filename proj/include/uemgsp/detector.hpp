#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uemgsp/rng.hpp"
#include "uemgsp/spectral.hpp"

namespace uemgsp {

enum class Label { healthy = 0, anomalous = 1 };

struct LabeledDataset {
  std::vector<Eigen::VectorXd> signals;
  std::vector<Label> labels;

  int size() const { return static_cast<int>(signals.size()); }
  int count(Label l) const {
    return static_cast<int>(std::count(labels.begin(), labels.end(), l));
  }
  void push(Eigen::VectorXd signal, Label label) {
    signals.push_back(std::move(signal));
    labels.push_back(label);
  }
};

inline void validate(const LabeledDataset& ds) {
  if (ds.signals.size() != ds.labels.size())
    throw std::invalid_argument("dataset: signals/labels length mismatch");
  if (ds.signals.empty()) throw std::invalid_argument("dataset: empty");
  const auto dim = ds.signals.front().size();
  for (const auto& s : ds.signals)
    if (s.size() != dim) throw std::invalid_argument("dataset: mixed signal lengths");
}

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;
};

/// F1 = 2 TP / (2 TP + FP + FN); defined as 0 when the denominator is 0.
inline double f1_score(const ConfusionCounts& c) {
  const double denom = 2.0 * c.tp + c.fp + c.fn;
  if (denom == 0.0) return 0.0;
  return 2.0 * c.tp / denom;
}

/// Max-magnitude high-pass response of one signal: the test statistic the
/// detector thresholds.
inline double max_filtered_abs(const SpectralBasis& basis, const Eigen::VectorXd& signal,
                               double lambda_cut) {
  const Eigen::VectorXd filtered = highpass_filter(basis, gft(basis, signal), lambda_cut);
  return filtered.cwiseAbs().maxCoeff();
}

namespace detail {

struct Moments {
  double mu = 0.0;
  double sigma = 0.0;  // population convention (divide by count)
};

inline Moments population_moments(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("empty healthy set");
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mu = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) ss += (v - mu) * (v - mu);
  return Moments{mu, std::sqrt(ss / static_cast<double>(values.size()))};
}

}  // namespace detail

/// Fitted spectral anomaly detector: a basis, a cut frequency and the
/// decision threshold tau = mu + beta * sigma over healthy peak responses.
struct DetectorModel {
  SpectralBasis basis;
  double lambda_cut = 0.0;
  double beta = 0.0;
  double tau = 0.0;
};

inline DetectorModel fit_threshold(const SpectralBasis& basis,
                                   const std::vector<Eigen::VectorXd>& healthy,
                                   double lambda_cut, double beta) {
  std::vector<double> peaks;
  peaks.reserve(healthy.size());
  for (const auto& x : healthy) peaks.push_back(max_filtered_abs(basis, x, lambda_cut));
  const auto m = detail::population_moments(peaks);
  return DetectorModel{basis, lambda_cut, beta, m.mu + beta * m.sigma};
}

/// Anomalous iff the peak filtered response strictly exceeds tau.
inline Label classify(const DetectorModel& model, const Eigen::VectorXd& signal) {
  return max_filtered_abs(model.basis, signal, model.lambda_cut) > model.tau
             ? Label::anomalous
             : Label::healthy;
}

inline ConfusionCounts evaluate(const DetectorModel& model, const LabeledDataset& ds) {
  validate(ds);
  ConfusionCounts c;
  for (int i = 0; i < ds.size(); ++i) {
    const bool pred = classify(model, ds.signals[i]) == Label::anomalous;
    const bool truth = ds.labels[i] == Label::anomalous;
    if (pred && truth) ++c.tp;
    else if (pred && !truth) ++c.fp;
    else if (!pred && truth) ++c.fn;
    else ++c.tn;
  }
  return c;
}

/// Structural coordinates of one operator in a hyperparameter sweep. Fields
/// whose axis is absent from the grid stay at their defaults and must be
/// ignored by the basis factory.
struct StructuralPoint {
  double rho = 0.0;
  double m = 0.0;
  double n = 0.0;
  int t = 0;
};

using BasisFactory = std::function<SpectralBasis(const StructuralPoint&)>;

/// Hyperparameter lattice. lambda_cut is expressed as a relative quantile of
/// the operator's eigenvalue range: cut = lambda_min + q * (lambda_max -
/// lambda_min). Empty structural axes mean "not applicable to this method".
struct GridAxes {
  std::vector<double> lambda_cut_quantiles;
  std::vector<double> betas;
  std::vector<double> rhos;
  std::vector<double> ms;
  std::vector<double> ns;
  std::vector<int> ts;
};

struct GridPointScore {
  double lambda_cut_q = 0.0;
  double beta = 0.0;
  StructuralPoint sp;
  double mean_f1 = 0.0;
};

struct GridSearchOutcome {
  GridPointScore best;
  DetectorModel model;                   // refit on all healthy training signals
  std::vector<GridPointScore> table;     // canonical lattice order
  std::vector<std::string> warnings;
};

/// Stratified k-fold cross-validated grid search.
///
/// Folds are dealt round-robin per class after a seeded shuffle. For every
/// lattice point, tau is fitted on the healthy signals of the training folds
/// and F1 is measured on the validation fold; scores are averaged across
/// folds. Ties on mean F1 resolve to the earliest point in canonical lattice
/// order: lambda_cut outermost, then beta, rho, m, n, t innermost. A fold
/// whose training side has no healthy signals (or whose validation side is
/// empty) is skipped with a warning; it is an error for all folds to skip.
///
/// The sweep evaluates each signal's statistic through suffix maxima of its
/// |coefficients| over the eigenvalue order, which yields bit-identical
/// results to running fit_threshold/classify at each lattice point.
inline GridSearchOutcome grid_search_cv(const BasisFactory& factory,
                                        const LabeledDataset& train,
                                        const GridAxes& axes, int folds = 5,
                                        std::uint64_t seed = 0) {
  validate(train);
  if (folds < 2) throw std::invalid_argument("grid_search_cv: folds must be at least 2");
  if (train.count(Label::healthy) == 0 || train.count(Label::anomalous) == 0)
    throw std::invalid_argument("grid_search_cv: training set must contain both classes");
  if (axes.lambda_cut_quantiles.empty() || axes.betas.empty())
    throw std::invalid_argument("grid_search_cv: empty hyperparameter axis");

  const int n_signals = train.size();

  std::vector<int> fold_of(n_signals, -1);
  {
    Rng rng(seed);
    std::vector<int> by_class[2];
    for (int i = 0; i < n_signals; ++i)
      by_class[train.labels[i] == Label::anomalous ? 1 : 0].push_back(i);
    for (auto& idx : by_class) {
      shuffle_in_place(idx, rng);
      for (std::size_t p = 0; p < idx.size(); ++p)
        fold_of[idx[p]] = static_cast<int>(p % folds);
    }
  }

  std::vector<std::vector<int>> val_of(folds), train_healthy_of(folds);
  for (int i = 0; i < n_signals; ++i)
    for (int f = 0; f < folds; ++f) {
      if (fold_of[i] == f) val_of[f].push_back(i);
      else if (train.labels[i] == Label::healthy) train_healthy_of[f].push_back(i);
    }

  GridSearchOutcome out;
  std::vector<int> usable;
  for (int f = 0; f < folds; ++f) {
    if (val_of[f].empty())
      out.warnings.push_back("fold " + std::to_string(f) + " skipped: empty validation subset");
    else if (train_healthy_of[f].empty())
      out.warnings.push_back("fold " + std::to_string(f) +
                             " skipped: no healthy training signals");
    else
      usable.push_back(f);
  }
  if (usable.empty()) throw std::runtime_error("grid_search_cv: all folds skipped");

  const auto& qs = axes.lambda_cut_quantiles;
  const auto& bs = axes.betas;
  const std::size_t q_count = qs.size(), b_count = bs.size();
  const std::size_t r_count = std::max<std::size_t>(1, axes.rhos.size());
  const std::size_t m_count = std::max<std::size_t>(1, axes.ms.size());
  const std::size_t n_count = std::max<std::size_t>(1, axes.ns.size());
  const std::size_t t_count = std::max<std::size_t>(1, axes.ts.size());
  out.table.assign(q_count * b_count * r_count * m_count * n_count * t_count,
                   GridPointScore{});

  double best_f1 = -1.0;
  std::size_t best_order = 0;
  StructuralPoint best_sp;
  double best_q = qs.front(), best_beta = bs.front();

  std::vector<double> cuts(q_count), taups;
  std::vector<int> kept_from(q_count);
  std::vector<double> sums(q_count * b_count);

  for (std::size_t ri = 0; ri < r_count; ++ri)
    for (std::size_t mi = 0; mi < m_count; ++mi)
      for (std::size_t ni = 0; ni < n_count; ++ni)
        for (std::size_t ti = 0; ti < t_count; ++ti) {
          StructuralPoint sp;
          if (!axes.rhos.empty()) sp.rho = axes.rhos[ri];
          if (!axes.ms.empty()) sp.m = axes.ms[mi];
          if (!axes.ns.empty()) sp.n = axes.ns[ni];
          if (!axes.ts.empty()) sp.t = axes.ts[ti];

          const SpectralBasis basis = factory(sp);
          const int nb = basis.size();
          const double lambda_lo = basis.eigenvalues(0);
          const double span = basis.eigenvalues(nb - 1) - lambda_lo;
          for (std::size_t qi = 0; qi < q_count; ++qi) {
            cuts[qi] = lambda_lo + qs[qi] * span;
            // first index strictly above the cut; eigenvalues are ascending
            kept_from[qi] = static_cast<int>(
                std::upper_bound(basis.eigenvalues.data(), basis.eigenvalues.data() + nb,
                                 cuts[qi]) -
                basis.eigenvalues.data());
          }

          Eigen::MatrixXd sufmax(nb + 1, n_signals);
          for (int i = 0; i < n_signals; ++i) {
            const Eigen::VectorXd c = gft(basis, train.signals[i]);
            sufmax(nb, i) = 0.0;
            for (int l = nb - 1; l >= 0; --l)
              sufmax(l, i) = std::max(sufmax(l + 1, i), std::abs(c(l)));
          }

          std::fill(sums.begin(), sums.end(), 0.0);
          for (const int f : usable) {
            for (std::size_t qi = 0; qi < q_count; ++qi) {
              taups.clear();
              for (const int i : train_healthy_of[f]) taups.push_back(sufmax(kept_from[qi], i));
              const auto m = detail::population_moments(taups);
              for (std::size_t bi = 0; bi < b_count; ++bi) {
                const double tau = m.mu + bs[bi] * m.sigma;
                ConfusionCounts c;
                for (const int i : val_of[f]) {
                  const bool pred = sufmax(kept_from[qi], i) > tau;
                  const bool truth = train.labels[i] == Label::anomalous;
                  if (pred && truth) ++c.tp;
                  else if (pred && !truth) ++c.fp;
                  else if (!pred && truth) ++c.fn;
                  else ++c.tn;
                }
                sums[qi * b_count + bi] += f1_score(c);
              }
            }
          }

          for (std::size_t qi = 0; qi < q_count; ++qi)
            for (std::size_t bi = 0; bi < b_count; ++bi) {
              const double mean_f1 =
                  sums[qi * b_count + bi] / static_cast<double>(usable.size());
              const std::size_t order =
                  ((((qi * b_count + bi) * r_count + ri) * m_count + mi) * n_count + ni) *
                      t_count +
                  ti;
              out.table[order] = GridPointScore{qs[qi], bs[bi], sp, mean_f1};
              if (mean_f1 > best_f1 || (mean_f1 == best_f1 && order < best_order)) {
                best_f1 = mean_f1;
                best_order = order;
                best_sp = sp;
                best_q = qs[qi];
                best_beta = bs[bi];
              }
            }
        }

  const SpectralBasis basis = factory(best_sp);
  const double lambda_lo = basis.eigenvalues(0);
  const double span = basis.eigenvalues(basis.size() - 1) - lambda_lo;
  const double cut = lambda_lo + best_q * span;
  std::vector<Eigen::VectorXd> healthy;
  for (int i = 0; i < n_signals; ++i)
    if (train.labels[i] == Label::healthy) healthy.push_back(train.signals[i]);

  out.best = GridPointScore{best_q, best_beta, best_sp, best_f1};
  out.model = fit_threshold(basis, healthy, cut, best_beta);
  return out;
}

}  // namespace uemgsp

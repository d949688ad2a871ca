#pragma once

#include <vector>

#include "mdlsel/dataset.hpp"

namespace mdlsel {

// Exact stepwise least-squares state for one response column.
//
// The active design (intercept plus selected features) is held as a thin QR
// factorization with an explicit orthonormal basis, so evaluating a candidate
// costs O(n p) and accepting one costs O(n p) with a reorthogonalization pass
// for stability.  All updates are exact least squares — no approximations.
class TaskFit {
public:
  TaskFit(const Dataset& data, int task);

  struct Gain {
    double drss = 0.0;     // decrease in RSS if the feature were added
    bool singular = false; // feature is (numerically) in the span of the design
  };

  // Candidate evaluation; pure read, safe to call concurrently.
  Gain gain(int feature) const;

  // Adds a feature column; throws SingularDesign if it is collinear with the
  // active design.
  void add(int feature);

  // Rebuilds from scratch on the given support (order irrelevant for the fit).
  void rebuild(const std::vector<int>& support);

  double rss() const { return rss_; }
  // Degenerate-fit floor: 1e-12 * ||y||^2.
  double rss_floor() const { return 1e-12 * y_nrm2_; }
  // An exactly-fit response stops accepting features.
  bool saturated() const { return rss_ <= rss_floor(); }

  int n() const { return n_; }
  int task() const { return task_; }
  const Dataset& dataset() const { return *data_; }
  const std::vector<int>& support() const { return support_; }

  // Fitted coefficients: [intercept, one per support entry, support order].
  std::vector<double> coefficients() const;

private:
  const Dataset* data_;
  int task_ = 0;
  int n_ = 0;
  std::vector<int> support_;
  std::vector<double> qbasis_;   // n x p, column-major, orthonormal
  std::vector<double> rdiag_;    // packed upper-triangular R, column-major
  std::vector<double> qty_;      // Q^T y
  std::vector<double> residual_; // y - fit
  double rss_ = 0.0;
  double y_nrm2_ = 0.0;

  int ncols() const { return static_cast<int>(qty_.size()); }
  const double* qcol(int c) const;
  void append_column(const double* col);
};

// Residual code length in bits for one response fitted by the profile-MLE
// Gaussian model with rss > 0 observed on n rows:
//   (n/2) * log2(2 pi sigma^2) + n / (2 ln 2),  sigma^2 = rss / n.
// Throws DegenerateResidual when rss <= 0.
double residual_bits(double rss, int n);

// Same, with rss clamped to a positive floor first (search-time variant).
double residual_bits_floored(double rss, int n, double floor);

// Total residual bits over every response of a fitted state, each clamped to
// its own degenerate-fit floor.
double residual_bits(const std::vector<TaskFit>& state);

// Residual bits saved by adding `feature` jointly to the given responses.
// Tasks where the candidate is singular contribute zero.
double delta_se(const std::vector<TaskFit>& state, int feature,
                const std::vector<int>& tasks);

// Logistic refit of a fixed support by iteratively reweighted least squares.
struct LogisticFit {
  std::vector<double> beta;  // [intercept, one per feature, given order]
  int iterations = 0;
  bool converged = false;
  bool separation = false;   // likelihood diverged; coefficients were rescaled
};

// Responses for `task` must be 0/1.  On (quasi-)separation the coefficient
// vector is scaled down to a fixed norm, which leaves the decision boundary
// unchanged, and the flag is set.
LogisticFit refit_logistic(const Dataset& data, const std::vector<int>& features,
                           int task, int max_iter = 100, double tol = 1e-8);

// P(y = 1 | row) under a logistic fit.
double logistic_prob(const LogisticFit& fit, const Dataset& data,
                     const std::vector<int>& features, int row);

}  // namespace mdlsel

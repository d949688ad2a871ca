#include "mdlsel/fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdlsel/errors.hpp"
#include "mdlsel/kernels.hpp"

namespace mdlsel {

namespace {

constexpr double kSingularRelTol = 1e-8;   // d <= tol^2 * ||x||^2 -> collinear
constexpr double kRecheckRelTol = 1e-4;    // below this, re-orthogonalize exactly
constexpr double kLog2 = 0.69314718055994530941723212145818;  // ln 2
constexpr double kPi = 3.14159265358979323846264338327950;

}  // namespace

TaskFit::TaskFit(const Dataset& data, int task) : data_(&data), task_(task), n_(data.n) {
  if (task < 0 || task >= data.h) {
    throw DimensionMismatch("task index out of range: " + std::to_string(task));
  }
  rebuild({});
}

const double* TaskFit::qcol(int c) const {
  return qbasis_.data() + static_cast<std::size_t>(c) * static_cast<std::size_t>(n_);
}

void TaskFit::rebuild(const std::vector<int>& support) {
  const double* y = data_->col_y(task_);
  support_.clear();
  qbasis_.clear();
  rdiag_.clear();
  qty_.clear();
  residual_.assign(y, y + n_);
  y_nrm2_ = kernels::nrm2sq(y, static_cast<std::size_t>(n_));
  rss_ = y_nrm2_;
  // Intercept column first.
  std::vector<double> ones(static_cast<std::size_t>(n_), 1.0);
  append_column(ones.data());
  for (int j : support) add(j);
}

void TaskFit::append_column(const double* col) {
  const std::size_t n = static_cast<std::size_t>(n_);
  const int p = ncols();
  const double colsq = kernels::nrm2sq(col, n);
  std::vector<double> w(col, col + n);
  std::vector<double> r(static_cast<std::size_t>(p) + 1, 0.0);
  // Modified Gram-Schmidt with one reorthogonalization pass.
  for (int pass = 0; pass < 2; ++pass) {
    for (int c = 0; c < p; ++c) {
      double t = kernels::dot(qcol(c), w.data(), n);
      kernels::axpy(-t, qcol(c), w.data(), n);
      r[static_cast<std::size_t>(c)] += t;
    }
  }
  const double wsq = kernels::nrm2sq(w.data(), n);
  if (!(wsq > kSingularRelTol * kSingularRelTol * colsq) || colsq == 0.0) {
    throw SingularDesign("candidate column lies in the span of the active design");
  }
  const double wn = std::sqrt(wsq);
  r[static_cast<std::size_t>(p)] = wn;
  const double inv = 1.0 / wn;
  for (double& v : w) v *= inv;
  qbasis_.insert(qbasis_.end(), w.begin(), w.end());
  rdiag_.insert(rdiag_.end(), r.begin(), r.end());
  const double qy = kernels::dot(w.data(), residual_.data(), n);
  qty_.push_back(qy);
  kernels::axpy(-qy, w.data(), residual_.data(), n);
  rss_ -= qy * qy;
  if (rss_ < 0.0) rss_ = 0.0;
}

void TaskFit::add(int feature) {
  if (feature < 0 || feature >= data_->m) {
    throw DimensionMismatch("feature index out of range: " + std::to_string(feature));
  }
  if (std::find(support_.begin(), support_.end(), feature) != support_.end()) {
    throw SpecError("feature already in the active design: " + std::to_string(feature));
  }
  append_column(data_->col_x(feature));
  support_.push_back(feature);
}

TaskFit::Gain TaskFit::gain(int feature) const {
  const std::size_t n = static_cast<std::size_t>(n_);
  const double* xj = data_->col_x(feature);
  const double colsq = kernels::nrm2sq(xj, n);
  if (colsq == 0.0) return {0.0, true};
  const int p = ncols();
  double tsq = 0.0;
  double c = kernels::dot(xj, residual_.data(), n);
  for (int k = 0; k < p; ++k) {
    double t = kernels::dot(qcol(k), xj, n);
    tsq += t * t;
  }
  double d = colsq - tsq;
  if (d < kRecheckRelTol * colsq) {
    // Near-collinear: redo the projection explicitly for an accurate d and c.
    std::vector<double> w(xj, xj + n);
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < p; ++k) {
        double t = kernels::dot(qcol(k), w.data(), n);
        kernels::axpy(-t, qcol(k), w.data(), n);
      }
    }
    d = kernels::nrm2sq(w.data(), n);
    c = kernels::dot(w.data(), residual_.data(), n);
  }
  if (!(d > kSingularRelTol * kSingularRelTol * colsq)) return {0.0, true};
  double drss = c * c / d;
  if (drss > rss_) drss = rss_;  // guard tiny floating-point overshoot
  return {drss, false};
}

std::vector<double> TaskFit::coefficients() const {
  // Back-substitute R beta = Q^T y; R is packed column-major upper-triangular.
  const int p = ncols();
  std::vector<double> beta(qty_);
  std::vector<std::size_t> off(static_cast<std::size_t>(p));
  std::size_t acc = 0;
  for (int c = 0; c < p; ++c) {
    off[static_cast<std::size_t>(c)] = acc;
    acc += static_cast<std::size_t>(c) + 1;
  }
  for (int c = p - 1; c >= 0; --c) {
    const double* rc = rdiag_.data() + off[static_cast<std::size_t>(c)];
    beta[static_cast<std::size_t>(c)] /= rc[c];
    const double bc = beta[static_cast<std::size_t>(c)];
    for (int r = 0; r < c; ++r) beta[static_cast<std::size_t>(r)] -= rc[r] * bc;
  }
  return beta;
}

double residual_bits(double rss, int n) {
  if (n < 1) throw DomainError("residual_bits needs n >= 1");
  if (!(rss > 0.0)) {
    throw DegenerateResidual("residual sum of squares must be positive, got " +
                             std::to_string(rss));
  }
  const double sigma2 = rss / n;
  return 0.5 * n * std::log2(2.0 * kPi * sigma2) + n / (2.0 * kLog2);
}

double residual_bits_floored(double rss, int n, double floor) {
  if (!(floor > 0.0)) {
    // An identically-zero response carries no residual information.
    if (rss <= 0.0) return 0.0;
  }
  return residual_bits(std::max(rss, floor), n);
}

double residual_bits(const std::vector<TaskFit>& state) {
  double total = 0.0;
  for (const TaskFit& f : state) {
    total += residual_bits_floored(f.rss(), f.n(), f.rss_floor());
  }
  return total;
}

double delta_se(const std::vector<TaskFit>& state, int feature,
                const std::vector<int>& tasks) {
  double total = 0.0;
  for (int t : tasks) {
    if (t < 0 || t >= static_cast<int>(state.size())) {
      throw DimensionMismatch("task index out of range: " + std::to_string(t));
    }
    const TaskFit& f = state[static_cast<std::size_t>(t)];
    if (f.saturated()) continue;
    TaskFit::Gain g = f.gain(feature);
    if (g.singular) continue;
    const double before = std::max(f.rss(), f.rss_floor());
    const double after = std::max(f.rss() - g.drss, f.rss_floor());
    total += 0.5 * f.n() * std::log2(before / after);
  }
  return total;
}

// ---------------------------------------------------------------- logistic --

namespace {

double sigmoid(double eta) {
  if (eta > 30.0) eta = 30.0;
  if (eta < -30.0) eta = -30.0;
  return 1.0 / (1.0 + std::exp(-eta));
}

// Solves the symmetric positive-definite system A b = v by Cholesky.
// Returns false if A is not positive definite to working precision.
bool chol_solve(std::vector<double>& a, std::vector<double>& v, int p) {
  for (int c = 0; c < p; ++c) {
    for (int r = c; r < p; ++r) {
      double sum = a[static_cast<std::size_t>(c) * p + r];
      for (int k = 0; k < c; ++k) {
        sum -= a[static_cast<std::size_t>(k) * p + r] * a[static_cast<std::size_t>(k) * p + c];
      }
      if (r == c) {
        if (!(sum > 1e-300)) return false;
        a[static_cast<std::size_t>(c) * p + r] = std::sqrt(sum);
      } else {
        a[static_cast<std::size_t>(c) * p + r] = sum / a[static_cast<std::size_t>(c) * p + c];
      }
    }
  }
  for (int r = 0; r < p; ++r) {
    double sum = v[static_cast<std::size_t>(r)];
    for (int k = 0; k < r; ++k) sum -= a[static_cast<std::size_t>(k) * p + r] * v[static_cast<std::size_t>(k)];
    v[static_cast<std::size_t>(r)] = sum / a[static_cast<std::size_t>(r) * p + r];
  }
  for (int r = p - 1; r >= 0; --r) {
    double sum = v[static_cast<std::size_t>(r)];
    for (int k = r + 1; k < p; ++k) sum -= a[static_cast<std::size_t>(r) * p + k] * v[static_cast<std::size_t>(k)];
    v[static_cast<std::size_t>(r)] = sum / a[static_cast<std::size_t>(r) * p + r];
  }
  return true;
}

}  // namespace

LogisticFit refit_logistic(const Dataset& data, const std::vector<int>& features,
                           int task, int max_iter, double tol) {
  if (task < 0 || task >= data.h) {
    throw DimensionMismatch("task index out of range: " + std::to_string(task));
  }
  const int n = data.n;
  const double* y = data.col_y(task);
  for (int i = 0; i < n; ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) {
      throw DomainError("logistic refit needs 0/1 responses");
    }
  }
  const int p = static_cast<int>(features.size()) + 1;
  for (int j : features) {
    if (j < 0 || j >= data.m) {
      throw DimensionMismatch("feature index out of range: " + std::to_string(j));
    }
  }

  LogisticFit fit;
  fit.beta.assign(static_cast<std::size_t>(p), 0.0);
  std::vector<double> eta(static_cast<std::size_t>(n), 0.0);
  std::vector<double> grad(static_cast<std::size_t>(p));
  std::vector<double> hess(static_cast<std::size_t>(p) * p);
  constexpr double kBetaNormCap = 1e4;

  auto design = [&](int i, int c) -> double {
    return c == 0 ? 1.0 : data.col_x(features[static_cast<std::size_t>(c - 1)])[i];
  };

  for (int it = 0; it < max_iter; ++it) {
    fit.iterations = it + 1;
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(hess.begin(), hess.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const double mu = sigmoid(eta[static_cast<std::size_t>(i)]);
      const double w = std::max(mu * (1.0 - mu), 1e-10);
      const double r = y[i] - mu;
      for (int c = 0; c < p; ++c) {
        const double xic = design(i, c);
        grad[static_cast<std::size_t>(c)] += xic * r;
        for (int c2 = c; c2 < p; ++c2) {
          hess[static_cast<std::size_t>(c) * p + c2] += w * xic * design(i, c2);
        }
      }
    }
    std::vector<double> step(grad);
    std::vector<double> a(hess);
    if (!chol_solve(a, step, p)) {
      fit.separation = true;
      break;
    }
    double maxstep = 0.0;
    for (int c = 0; c < p; ++c) {
      fit.beta[static_cast<std::size_t>(c)] += step[static_cast<std::size_t>(c)];
      maxstep = std::max(maxstep, std::fabs(step[static_cast<std::size_t>(c)]));
    }
    for (int i = 0; i < n; ++i) {
      double e = 0.0;
      for (int c = 0; c < p; ++c) e += design(i, c) * fit.beta[static_cast<std::size_t>(c)];
      eta[static_cast<std::size_t>(i)] = e;
    }
    double nrm = std::sqrt(kernels::nrm2sq(fit.beta.data(), fit.beta.size()));
    if (nrm > kBetaNormCap) {
      fit.separation = true;
      break;
    }
    if (maxstep < tol) {
      fit.converged = true;
      break;
    }
  }
  // Separation: scale to a fixed norm; the decision boundary is unchanged.
  if (fit.separation) {
    double nrm = std::sqrt(kernels::nrm2sq(fit.beta.data(), fit.beta.size()));
    if (nrm > kBetaNormCap) {
      const double s = kBetaNormCap / nrm;
      for (double& b : fit.beta) b *= s;
    }
  }
  return fit;
}

double logistic_prob(const LogisticFit& fit, const Dataset& data,
                     const std::vector<int>& features, int row) {
  double e = fit.beta[0];
  for (std::size_t k = 0; k < features.size(); ++k) {
    e += fit.beta[k + 1] * data.col_x(features[k])[row];
  }
  return sigmoid(e);
}

}  // namespace mdlsel

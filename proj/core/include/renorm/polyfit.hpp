#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace renorm {

struct LinFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

inline LinFit linear_fit(const std::vector<double>& xs,
                         const std::vector<double>& ys) {
  std::size_t n = xs.size();
  if (n < 2 || ys.size() != n) throw std::invalid_argument("linear_fit: bad input");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double dn = static_cast<double>(n);
  double den = dn * sxx - sx * sx;
  LinFit f;
  f.slope = (dn * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / dn;
  double ss_res = 0, ss_tot = 0, ybar = sy / dn;
  for (std::size_t i = 0; i < n; ++i) {
    double e = ys[i] - (f.slope * xs[i] + f.intercept);
    ss_res += e * e;
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

// Least squares for y ~ design * c; rows index observations. Returns the
// coefficients; *resid_rms (optional) receives the root-mean-square residual.
inline std::vector<double> lsq_fit(const std::vector<std::vector<double>>& design,
                                   const std::vector<double>& rhs,
                                   double* resid_rms = nullptr) {
  std::size_t rows = design.size();
  if (rows == 0 || rhs.size() != rows) throw std::invalid_argument("lsq_fit: bad input");
  std::size_t cols = design[0].size();
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd b(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    if (design[i].size() != cols) throw std::invalid_argument("lsq_fit: ragged design");
    for (std::size_t j = 0; j < cols; ++j) A(i, j) = design[i][j];
    b(i) = rhs[i];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  if (resid_rms) {
    *resid_rms = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(rows));
  }
  std::vector<double> out(cols);
  for (std::size_t j = 0; j < cols; ++j) out[j] = c(j);
  return out;
}

// Fit y = sum_k c_k x^k, degree <= deg.
inline std::vector<double> polynomial_fit(const std::vector<double>& xs,
                                          const std::vector<double>& ys,
                                          int deg, double* resid_rms = nullptr) {
  std::vector<std::vector<double>> design(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double p = 1;
    for (int k = 0; k <= deg; ++k) {
      design[i].push_back(p);
      p *= xs[i];
    }
  }
  return lsq_fit(design, ys, resid_rms);
}

}  // namespace renorm

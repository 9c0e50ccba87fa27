#include "braidmin/spectral.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "braidmin/track.hpp"

namespace braidmin {

RootEnclosure spectral_radius(const TransMatrix& m, double tol) {
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  return largest_real_root(char_poly(m), tol);
}

std::vector<double> pf_eigenvector(const TransMatrix& m, double residual_tol) {
  if (!is_perron_frobenius(m)) throw DomainError("matrix is not Perron-Frobenius");
  const int n = m.dim();
  const RootEnclosure rho = spectral_radius(m, 1e-13);
  const double lambda = rho.mid();

  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = static_cast<double>(m(i, j));

  // Inverse iteration with a shift just above the simple Perron root.
  const double shift = rho.hi + 1e-9 * std::max(1.0, rho.hi);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a - shift * Eigen::MatrixXd::Identity(n, n));
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  for (int iter = 0; iter < 50; ++iter) {
    v = lu.solve(v);
    v /= v.sum();
    if ((a * v - lambda * v).cwiseAbs().maxCoeff() <= residual_tol * 1e-3) break;
  }
  // One power step removes the shift bias and keeps everything positive.
  v = a * v;
  v /= v.sum();
  const double residual = (a * v - lambda * v).cwiseAbs().maxCoeff();
  if (!(residual <= residual_tol) || (v.array() <= 0).any())
    throw std::runtime_error("Perron eigenvector did not converge (residual " + std::to_string(residual) + ")");
  return {v.data(), v.data() + n};
}

bool lemma31_check(const TransMatrix& m) {
  if (!is_perron_frobenius(m)) throw DomainError("matrix is not Perron-Frobenius");
  const int n = m.dim();
  const std::int64_t rhs = entry_sum(m) - n + 1;
  if (rhs <= 0) return true;
  // Spectral radius of M^n is lambda^n.
  return compare_largest_root(char_poly(power(m, n)), BigRational(rhs)) >= 0;
}

}  // namespace braidmin

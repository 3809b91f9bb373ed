#include "centerfocus/unipoly.hpp"

#include <Eigen/Dense>

namespace cf {

std::vector<std::complex<double>> uni_roots(const UniPoly<std::complex<double>>& p_in) {
  using C = std::complex<double>;
  UniPoly<C> p = p_in;
  uni_trim(p);
  int d = uni_degree(p);
  std::vector<C> roots;
  if (d <= 0) return roots;

  // Strip roots at the origin so the companion matrix stays nonsingular.
  int val = 0;
  while (val < d && is_zero(p[static_cast<size_t>(val)])) ++val;
  for (int k = 0; k < val; ++k) roots.push_back(C(0.0));
  if (val > 0) p.erase(p.begin(), p.begin() + val);
  d = uni_degree(p);
  if (d == 0) return roots;

  C lead = p[static_cast<size_t>(d)];
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < d; ++k) m(k, d - 1) = -p[static_cast<size_t>(k)] / lead;
  for (int k = 1; k < d; ++k) m(k, k - 1) = C(1.0);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, /*computeEigenvectors=*/false);
  UniPoly<C> dp = uni_derivative(p);
  for (int k = 0; k < d; ++k) {
    C z = es.eigenvalues()(k);
    for (int it = 0; it < 4; ++it) {
      C f = uni_eval_c(p, z), df = uni_eval_c(dp, z);
      if (std::abs(df) < 1e-300) break;
      C step = f / df;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
      if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(z))) break;
    }
    roots.push_back(z);
  }
  return roots;
}

}  // namespace cf

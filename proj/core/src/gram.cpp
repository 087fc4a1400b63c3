#include "anykernel/gram.hpp"

#include "anykernel/errors.hpp"

namespace anykernel {

GramMatrix gram_matrix(const Kernel& k, std::vector<Point> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = k(points[i], points[j]);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return GramMatrix{std::move(m), std::move(points)};
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw PsdError("eigenvalue solver failed");
  return solver.eigenvalues().minCoeff();
}

bool passes_psd_test(const Eigen::MatrixXd& m, double tol) {
  return min_eigenvalue(m) >= -tol * (1.0 + m.trace());
}

}  // namespace anykernel

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "anykernel/kernel.hpp"

namespace anykernel {

struct GramMatrix {
  Eigen::MatrixXd entries;
  std::vector<Point> points;
};

GramMatrix gram_matrix(const Kernel& k, std::vector<Point> points);

double min_eigenvalue(const Eigen::MatrixXd& m);

// min eigenvalue >= -tol * (1 + trace).
bool passes_psd_test(const Eigen::MatrixXd& m, double tol = 1e-8);

}  // namespace anykernel

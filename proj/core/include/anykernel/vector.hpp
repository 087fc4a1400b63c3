#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anykernel/kernel.hpp"
#include "anykernel/transcript.hpp"

namespace anykernel {

struct VectorPoint {
  Features x;
  Eigen::VectorXd p;
};

class MatrixKernelImpl {
 public:
  virtual ~MatrixKernelImpl() = default;
  virtual Eigen::MatrixXd evaluate(const VectorPoint& a, const VectorPoint& b) const = 0;
  virtual int dim() const = 0;
  virtual std::optional<double> op_norm_bound() const = 0;
  virtual bool depends_on_p() const = 0;
  virtual bool continuous_in_p() const = 0;
  virtual std::string describe() const = 0;
};

class MatrixKernel {
 public:
  explicit MatrixKernel(std::shared_ptr<const MatrixKernelImpl> impl);

  Eigen::MatrixXd operator()(const VectorPoint& a, const VectorPoint& b) const { return impl_->evaluate(a, b); }
  int dim() const { return impl_->dim(); }
  std::optional<double> op_norm_bound() const { return impl_->op_norm_bound(); }
  bool depends_on_p() const { return impl_->depends_on_p(); }
  bool continuous_in_p() const { return impl_->continuous_in_p(); }
  std::string describe() const { return impl_->describe(); }

 private:
  std::shared_ptr<const MatrixKernelImpl> impl_;
};

// k(x, x') * A for a scalar kernel that ignores predictions and a symmetric PSD matrix A.
MatrixKernel scalar_matrix_kernel(Kernel features_kernel, Eigen::MatrixXd a);
MatrixKernel identity_matrix_kernel(Kernel features_kernel, int d);
// exp(-gamma |p - p'|^2) * k(x, x') * A.
MatrixKernel gaussian_prediction_matrix_kernel(int d, double gamma, Eigen::MatrixXd a,
                                               Kernel features_kernel = constant_kernel(1.0));
// sum_i c_i(z) c_i(z')^T with sum_i |c_i(z)|^2 <= m.
using VectorFunction = std::function<Eigen::VectorXd(const VectorPoint&)>;
MatrixKernel finite_vector_family_kernel(std::vector<VectorFunction> family, int d, double m,
                                         bool depends_on_p = false, bool continuous_in_p = true);
MatrixKernel matrix_sum(std::vector<MatrixKernel> parts);
MatrixKernel matrix_scale(double c, MatrixKernel k);

// Block Gram matrix of size (n d) x (n d).
Eigen::MatrixXd block_gram(const MatrixKernel& k, const std::vector<VectorPoint>& points);

struct OutcomeBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  void validate() const;
  int dim() const { return static_cast<int>(lower.size()); }
  double diameter() const { return (upper - lower).squaredNorm(); }
  bool contains(const Eigen::VectorXd& p) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& p) const;
  Eigen::VectorXd midpoint() const { return (lower + upper) / 2.0; }
};

// sup over y in the box of (y - p)^T s, in closed form.
double vi_residual(const Eigen::VectorXd& p, const Eigen::VectorXd& s, const OutcomeBox& box);

struct VectorPrediction {
  Eigen::VectorXd p;
  double residual = 0.0;
  double epsilon = 0.0;
  bool approximate = false;
  int iterations = 0;
};

struct VectorSolverOptions {
  int max_iter = 500;
};

using VectorNatureFn =
    std::function<Eigen::VectorXd(std::int64_t t, const Features& x, const Eigen::VectorXd& p)>;

class VectorPredictor {
 public:
  VectorPredictor(MatrixKernel kernel, OutcomeBox box, VectorSolverOptions options = {});

  std::int64_t next_round() const { return static_cast<std::int64_t>(rounds_.size()) + 1; }
  const std::vector<VectorRound>& rounds() const { return rounds_; }
  const OutcomeBox& box() const { return box_; }
  const MatrixKernel& kernel() const { return kernel_; }

  // S_t(p) = sum_i K((x, p), (x_i, p_i)) (y_i - p_i); no self term.
  Eigen::VectorXd s_function(const Features& x, const Eigen::VectorXd& p) const;
  VectorPrediction predict(const Features& x) const;
  const VectorRound& step(const Features& x, const VectorNatureFn& nature);
  void observe(VectorRound r);

 private:
  MatrixKernel kernel_;
  OutcomeBox box_;
  VectorSolverOptions options_;
  std::vector<VectorRound> rounds_;
  std::vector<VectorPoint> points_;
  std::vector<Eigen::VectorXd> residuals_;
};

}  // namespace anykernel

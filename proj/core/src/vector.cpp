#include "anykernel/vector.hpp"

#include <algorithm>
#include <cmath>

#include "anykernel/errors.hpp"

namespace anykernel {

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void check_symmetric_psd(const Eigen::MatrixXd& a, int d) {
  if (a.rows() != d || a.cols() != d) throw DomainError("matrix factor has the wrong shape");
  if (!a.isApprox(a.transpose(), 0.0) && (a - a.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw DomainError("matrix factor must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12 * (1.0 + a.trace())) throw DomainError("matrix factor must be PSD");
}

double op_norm(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Point feature_point(const VectorPoint& z) { return Point{z.x, 0.0}; }

class ScalarMatrixImpl final : public MatrixKernelImpl {
 public:
  ScalarMatrixImpl(Kernel k, Eigen::MatrixXd a) : k_(std::move(k)), a_(std::move(a)) {}
  Eigen::MatrixXd evaluate(const VectorPoint& x, const VectorPoint& y) const override {
    return k_(feature_point(x), feature_point(y)) * a_;
  }
  int dim() const override { return static_cast<int>(a_.rows()); }
  std::optional<double> op_norm_bound() const override {
    auto b = k_.diag_bound();
    if (!b) return std::nullopt;
    return *b * op_norm(a_);
  }
  bool depends_on_p() const override { return false; }
  bool continuous_in_p() const override { return true; }
  std::string describe() const override { return "(matrix " + k_.describe() + ")"; }

 private:
  Kernel k_;
  Eigen::MatrixXd a_;
};

class GaussianPredictionImpl final : public MatrixKernelImpl {
 public:
  GaussianPredictionImpl(int d, double gamma, Eigen::MatrixXd a, Kernel k)
      : d_(d), gamma_(gamma), a_(std::move(a)), k_(std::move(k)) {}
  Eigen::MatrixXd evaluate(const VectorPoint& x, const VectorPoint& y) const override {
    if (x.p.size() != d_ || y.p.size() != d_) throw DomainError("prediction dimension mismatch");
    const double w = std::exp(-gamma_ * (x.p - y.p).squaredNorm()) * k_(feature_point(x), feature_point(y));
    return w * a_;
  }
  int dim() const override { return d_; }
  std::optional<double> op_norm_bound() const override {
    auto b = k_.diag_bound();
    if (!b) return std::nullopt;
    return *b * op_norm(a_);
  }
  bool depends_on_p() const override { return true; }
  bool continuous_in_p() const override { return true; }
  std::string describe() const override {
    return "(matrix-gaussian-p " + format_number(gamma_) + " " + k_.describe() + ")";
  }

 private:
  int d_;
  double gamma_;
  Eigen::MatrixXd a_;
  Kernel k_;
};

class VectorFamilyImpl final : public MatrixKernelImpl {
 public:
  VectorFamilyImpl(std::vector<VectorFunction> fam, int d, double m, bool dep, bool cont)
      : fam_(std::move(fam)), d_(d), m_(m), dep_(dep), cont_(cont) {}
  Eigen::MatrixXd evaluate(const VectorPoint& x, const VectorPoint& y) const override {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d_, d_);
    for (const auto& c : fam_) {
      const Eigen::VectorXd a = c(x);
      const Eigen::VectorXd b = c(y);
      if (a.size() != d_ || b.size() != d_) throw DomainError("family member has the wrong dimension");
      out += a * b.transpose();
    }
    return out;
  }
  int dim() const override { return d_; }
  std::optional<double> op_norm_bound() const override { return m_; }
  bool depends_on_p() const override { return dep_; }
  bool continuous_in_p() const override { return cont_; }
  std::string describe() const override { return "(matrix-family " + format_number(m_) + ")"; }

 private:
  std::vector<VectorFunction> fam_;
  int d_;
  double m_;
  bool dep_;
  bool cont_;
};

class MatrixSumImpl final : public MatrixKernelImpl {
 public:
  explicit MatrixSumImpl(std::vector<MatrixKernel> parts) : parts_(std::move(parts)) {}
  Eigen::MatrixXd evaluate(const VectorPoint& x, const VectorPoint& y) const override {
    Eigen::MatrixXd out = parts_[0](x, y);
    for (std::size_t i = 1; i < parts_.size(); ++i) out += parts_[i](x, y);
    return out;
  }
  int dim() const override { return parts_[0].dim(); }
  std::optional<double> op_norm_bound() const override {
    double s = 0.0;
    for (const auto& k : parts_) {
      auto b = k.op_norm_bound();
      if (!b) return std::nullopt;
      s += *b;
    }
    return s;
  }
  bool depends_on_p() const override {
    return std::any_of(parts_.begin(), parts_.end(), [](const MatrixKernel& k) { return k.depends_on_p(); });
  }
  bool continuous_in_p() const override {
    return std::all_of(parts_.begin(), parts_.end(), [](const MatrixKernel& k) { return k.continuous_in_p(); });
  }
  std::string describe() const override {
    std::string s = "(matrix-sum";
    for (const auto& k : parts_) s += " " + k.describe();
    return s + ")";
  }

 private:
  std::vector<MatrixKernel> parts_;
};

class MatrixScaleImpl final : public MatrixKernelImpl {
 public:
  MatrixScaleImpl(double c, MatrixKernel k) : c_(c), k_(std::move(k)) {}
  Eigen::MatrixXd evaluate(const VectorPoint& x, const VectorPoint& y) const override { return c_ * k_(x, y); }
  int dim() const override { return k_.dim(); }
  std::optional<double> op_norm_bound() const override {
    auto b = k_.op_norm_bound();
    if (!b) return std::nullopt;
    return c_ * *b;
  }
  bool depends_on_p() const override { return k_.depends_on_p(); }
  bool continuous_in_p() const override { return k_.continuous_in_p(); }
  std::string describe() const override { return "(matrix-scale " + format_number(c_) + " " + k_.describe() + ")"; }

 private:
  double c_;
  MatrixKernel k_;
};

}  // namespace

MatrixKernel::MatrixKernel(std::shared_ptr<const MatrixKernelImpl> impl) : impl_(std::move(impl)) {
  if (!impl_) throw DomainError("null matrix kernel");
}

MatrixKernel scalar_matrix_kernel(Kernel features_kernel, Eigen::MatrixXd a) {
  if (static_cast<int>(features_kernel.dependence()) & static_cast<int>(Dependence::kPrediction))
    throw DomainError("scalar factor of a matrix kernel must ignore predictions");
  check_symmetric_psd(a, static_cast<int>(a.rows()));
  return MatrixKernel(std::make_shared<ScalarMatrixImpl>(std::move(features_kernel), std::move(a)));
}

MatrixKernel identity_matrix_kernel(Kernel features_kernel, int d) {
  if (d < 1) throw DomainError("dimension must be positive");
  return scalar_matrix_kernel(std::move(features_kernel), Eigen::MatrixXd::Identity(d, d));
}

MatrixKernel gaussian_prediction_matrix_kernel(int d, double gamma, Eigen::MatrixXd a, Kernel features_kernel) {
  if (d < 1) throw DomainError("dimension must be positive");
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  if (static_cast<int>(features_kernel.dependence()) & static_cast<int>(Dependence::kPrediction))
    throw DomainError("feature factor must ignore predictions");
  check_symmetric_psd(a, d);
  return MatrixKernel(std::make_shared<GaussianPredictionImpl>(d, gamma, std::move(a), std::move(features_kernel)));
}

MatrixKernel finite_vector_family_kernel(std::vector<VectorFunction> family, int d, double m, bool depends_on_p,
                                         bool continuous_in_p) {
  if (d < 1) throw DomainError("dimension must be positive");
  return MatrixKernel(std::make_shared<VectorFamilyImpl>(std::move(family), d, m, depends_on_p, continuous_in_p));
}

MatrixKernel matrix_sum(std::vector<MatrixKernel> parts) {
  if (parts.empty()) throw DomainError("matrix sum needs at least one kernel");
  for (const auto& k : parts)
    if (k.dim() != parts[0].dim()) throw DomainError("matrix sum dimension mismatch");
  if (parts.size() == 1) return parts[0];
  return MatrixKernel(std::make_shared<MatrixSumImpl>(std::move(parts)));
}

MatrixKernel matrix_scale(double c, MatrixKernel k) {
  if (!(c >= 0.0)) throw DomainError("scale factor must be >= 0");
  return MatrixKernel(std::make_shared<MatrixScaleImpl>(c, std::move(k)));
}

Eigen::MatrixXd block_gram(const MatrixKernel& k, const std::vector<VectorPoint>& points) {
  const int d = k.dim();
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd g(n * d, n * d);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) g.block(a * d, b * d, d, d) = k(points[a], points[b]);
  return g;
}

void OutcomeBox::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size()) throw DomainError("box bounds must share a positive dimension");
  for (Eigen::Index j = 0; j < lower.size(); ++j)
    if (!(lower[j] < upper[j])) throw DomainError("box needs lower < upper componentwise");
}

bool OutcomeBox::contains(const Eigen::VectorXd& p) const {
  if (p.size() != lower.size()) return false;
  for (Eigen::Index j = 0; j < p.size(); ++j)
    if (!(p[j] >= lower[j] && p[j] <= upper[j])) return false;
  return true;
}

Eigen::VectorXd OutcomeBox::clamp(const Eigen::VectorXd& p) const { return p.cwiseMax(lower).cwiseMin(upper); }

double vi_residual(const Eigen::VectorXd& p, const Eigen::VectorXd& s, const OutcomeBox& box) {
  if (p.size() != s.size() || p.size() != box.lower.size()) throw DomainError("dimension mismatch");
  double r = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j)
    r += std::max((box.upper[j] - p[j]) * s[j], (box.lower[j] - p[j]) * s[j]);
  return r;
}

VectorPredictor::VectorPredictor(MatrixKernel kernel, OutcomeBox box, VectorSolverOptions options)
    : kernel_(std::move(kernel)), box_(std::move(box)), options_(options) {
  box_.validate();
  if (kernel_.dim() != box_.dim()) throw DomainError("kernel and box dimensions differ");
  if (options_.max_iter < 1) throw DomainError("max_iter must be positive");
}

Eigen::VectorXd VectorPredictor::s_function(const Features& x, const Eigen::VectorXd& p) const {
  if (p.size() != box_.dim()) throw DomainError("prediction dimension mismatch");
  const VectorPoint z{x, p};
  Eigen::VectorXd s = Eigen::VectorXd::Zero(box_.dim());
  for (std::size_t i = 0; i < points_.size(); ++i) s += kernel_(z, points_[i]) * residuals_[i];
  return s;
}

VectorPrediction VectorPredictor::predict(const Features& x) const {
  const auto t = static_cast<double>(next_round());
  VectorPrediction out;
  out.epsilon = 1.0 / (10.0 * t * t);
  const Eigen::VectorXd mid = box_.midpoint();

  auto vertex_rule = [&](const Eigen::VectorXd& s) {
    Eigen::VectorXd p = mid;
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      if (s[j] > 0.0) p[j] = box_.upper[j];
      if (s[j] < 0.0) p[j] = box_.lower[j];
    }
    return p;
  };

  if (!kernel_.depends_on_p()) {
    const Eigen::VectorXd s = s_function(x, mid);
    out.p = vertex_rule(s);
    out.residual = vi_residual(out.p, s, box_);
    return out;
  }

  Eigen::VectorXd p = mid;
  Eigen::VectorXd s = s_function(x, p);
  double res = vi_residual(p, s, box_);
  out.p = p;
  out.residual = res;
  double scale = std::max(s.norm(), 1e-300);
  const double d = box_.diameter();
  for (int k = 1; k <= options_.max_iter && out.residual > out.epsilon; ++k) {
    const double eta = d / (scale * std::sqrt(static_cast<double>(k)));
    p = box_.clamp(p + eta * s);
    s = s_function(x, p);
    scale = std::max(scale, s.norm());
    res = vi_residual(p, s, box_);
    out.iterations = k;
    if (res < out.residual) {
      out.residual = res;
      out.p = p;
    }
  }
  out.approximate = out.residual > out.epsilon;
  return out;
}

const VectorRound& VectorPredictor::step(const Features& x, const VectorNatureFn& nature) {
  const auto t = next_round();
  const VectorPrediction pred = predict(x);
  const Eigen::VectorXd y = nature(t, x, pred.p);
  if (!box_.contains(y)) throw ProtocolError(t, "outcome outside the box");
  VectorRound r;
  r.t = t;
  r.x = x;
  r.p = to_std(pred.p);
  r.y = to_std(y);
  r.residual = pred.residual;
  r.approximate = pred.approximate;
  r.iterations = pred.iterations;
  observe(std::move(r));
  return rounds_.back();
}

void VectorPredictor::observe(VectorRound r) {
  if (r.t != next_round()) throw ProtocolError(r.t, "round out of order");
  const Eigen::VectorXd p = to_eigen(r.p);
  const Eigen::VectorXd y = to_eigen(r.y);
  if (!box_.contains(p)) throw ProtocolError(r.t, "prediction outside the box");
  points_.push_back(VectorPoint{r.x, p});
  residuals_.push_back(y - p);
  rounds_.push_back(std::move(r));
}

}  // namespace anykernel

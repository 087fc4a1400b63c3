#include <cmath>
#include <numbers>

#include "anykernel/errors.hpp"
#include "anykernel/kernel.hpp"

namespace anykernel {

namespace {

void check_unit(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("prediction outside [0,1]");
}

double inner(const Features& a, const Features& b) {
  if (a.is_dense() && b.is_dense()) {
    const auto& x = a.dense();
    const auto& y = b.dense();
    if (x.size() != y.size()) throw DomainError("feature dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  }
  if (a.is_bits() && b.is_bits()) {
    const auto& x = a.bits().bits;
    const auto& y = b.bits().bits;
    if (x.size() != y.size()) throw DomainError("feature dimension mismatch");
    long s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return static_cast<double>(s);
  }
  throw DomainError("inner product needs two dense or two bit feature vectors");
}

double squared_distance(const Features& a, const Features& b) {
  const auto x = a.as_dense();
  const auto y = b.as_dense();
  if (x.size() != y.size()) throw DomainError("feature dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

class ConstantImpl final : public KernelImpl {
 public:
  explicit ConstantImpl(double c) : c_(c) {}
  double evaluate(const Point&, const Point&) const override { return c_; }
  bool continuous_in_p() const override { return true; }
  std::optional<double> diag_bound() const override { return c_; }
  Dependence dependence() const override { return Dependence::kNone; }
  std::string describe() const override {
    if (c_ == 0.0) return "(zero)";
    if (c_ == 1.0) return "(one)";
    return "(const " + format_number(c_) + ")";
  }
  void expand(double coef, std::vector<KernelTerm>& out,
              const std::shared_ptr<const KernelImpl>&) const override {
    if (c_ == 0.0) return;
    KernelTerm t;
    t.kind = KernelTerm::Kind::kSeparable;
    t.coef = coef * c_;
    out.push_back(std::move(t));
  }

 private:
  double c_;
};

class SobolevImpl final : public KernelImpl {
 public:
  double evaluate(const Point& a, const Point& b) const override { return sobolev_unit(a.p, b.p); }
  bool continuous_in_p() const override { return true; }
  // Maximum of the diagonal is at the endpoints: coth(1).
  std::optional<double> diag_bound() const override { return 1.0 / std::tanh(1.0); }
  Dependence dependence() const override { return Dependence::kPrediction; }
  std::string describe() const override { return "(sobolev)"; }
};

class GridImpl final : public KernelImpl {
 public:
  explicit GridImpl(int n) : n_(n) {}
  double evaluate(const Point& a, const Point& b) const override { return grid_bin(a.p, b.p, n_); }
  bool continuous_in_p() const override { return n_ == 1; }
  std::optional<double> diag_bound() const override { return 1.0; }
  Dependence dependence() const override { return Dependence::kPrediction; }
  std::string describe() const override { return "(grid " + std::to_string(n_) + ")"; }

 private:
  int n_;
};

class LaplaceImpl final : public KernelImpl {
 public:
  double evaluate(const Point& a, const Point& b) const override {
    return std::exp(-std::fabs(a.p - b.p));
  }
  bool continuous_in_p() const override { return true; }
  std::optional<double> diag_bound() const override { return 1.0; }
  Dependence dependence() const override { return Dependence::kPrediction; }
  std::string describe() const override { return "(laplace)"; }
};

class LinearPredictionImpl final : public KernelImpl {
 public:
  double evaluate(const Point& a, const Point& b) const override { return 1.0 + a.p * b.p; }
  bool continuous_in_p() const override { return true; }
  std::optional<double> diag_bound() const override { return 2.0; }
  Dependence dependence() const override { return Dependence::kPrediction; }
  std::string describe() const override { return "(linear-p)"; }
};

class PolynomialImpl final : public KernelImpl {
 public:
  explicit PolynomialImpl(int d) : d_(d) {}
  double evaluate(const Point& a, const Point& b) const override {
    double base = 1.0 + inner(a.x, b.x);
    double r = 1.0;
    for (int i = 0; i < d_; ++i) r *= base;
    return r;
  }
  bool continuous_in_p() const override { return true; }
  std::optional<double> diag_bound() const override { return std::nullopt; }
  Dependence dependence() const override { return Dependence::kFeatures; }
  std::string describe() const override { return "(poly " + std::to_string(d_) + ")"; }

 private:
  int d_;
};

class LinearFeaturesImpl final : public KernelImpl {
 public:
  double evaluate(const Point& a, const Point& b) const override { return inner(a.x, b.x); }
  bool continuous_in_p() const override { return true; }
  std::optional<double> diag_bound() const override { return std::nullopt; }
  Dependence dependence() const override { return Dependence::kFeatures; }
  std::string describe() const override { return "(linear-x)"; }
};

class LowDegreeImpl final : public KernelImpl {
 public:
  LowDegreeImpl(int n, int d) : n_(n), d_(d) {
    double bound = 0.0;
    double binom = 1.0;
    for (int k = 0; k <= d; ++k) {
      bound += binom;
      binom = binom * (n - k) / (k + 1);
    }
    bound_ = bound;
  }
  double evaluate(const Point& a, const Point& b) const override {
    const auto& x = a.x.bits();
    if (static_cast<int>(x.bits.size()) != n_) throw DomainError("low-degree kernel: wrong bit length");
    return low_degree_boolean(x, b.x.bits(), d_);
  }
  bool continuous_in_p() const override { return true; }
  std::optional<double> diag_bound() const override { return bound_; }
  Dependence dependence() const override { return Dependence::kFeatures; }
  std::string describe() const override {
    return "(lowdeg " + std::to_string(n_) + " " + std::to_string(d_) + ")";
  }
  double cost_hint() const override { return static_cast<double>(n_) * (d_ + 1); }

 private:
  int n_;
  int d_;
  double bound_;
};

class GaussianImpl final : public KernelImpl {
 public:
  explicit GaussianImpl(double gamma) : gamma_(gamma) {}
  double evaluate(const Point& a, const Point& b) const override {
    return std::exp(-gamma_ * squared_distance(a.x, b.x));
  }
  bool continuous_in_p() const override { return true; }
  std::optional<double> diag_bound() const override { return 1.0; }
  Dependence dependence() const override { return Dependence::kFeatures; }
  std::string describe() const override { return "(gaussian " + format_number(gamma_) + ")"; }

 private:
  double gamma_;
};

class FamilyImpl final : public KernelImpl {
 public:
  FamilyImpl(std::vector<FiniteFamily::Function> members, double m, FamilyTraits traits)
      : family_(std::move(members)), m_(m), traits_(std::move(traits)) {}
  double evaluate(const Point& a, const Point& b) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < family_.size(); ++i) s += family_[i](a) * family_[i](b);
    return s;
  }
  bool continuous_in_p() const override { return traits_.continuous_in_p; }
  std::optional<double> diag_bound() const override { return m_; }
  Dependence dependence() const override { return traits_.dependence; }
  std::string describe() const override {
    return "(family " + traits_.name + " " + format_number(m_) + ")";
  }
  double cost_hint() const override { return static_cast<double>(family_.size()); }
  void expand(double coef, std::vector<KernelTerm>& out,
              const std::shared_ptr<const KernelImpl>& self) const override {
    KernelTerm t;
    t.kind = KernelTerm::Kind::kFamily;
    t.coef = coef;
    t.kernel = Kernel(self);
    out.push_back(std::move(t));
  }
  const FiniteFamily* family() const override { return &family_; }

 private:
  FiniteFamily family_;
  double m_;
  FamilyTraits traits_;
};

}  // namespace

double sobolev_unit(double p, double q) {
  check_unit(p);
  check_unit(q);
  const double a = std::min(p, q);
  const double b = std::max(p, q);
  // (e^a + e^-a)(e^(1-b) + e^(b-1)) / (2(e - 1/e)) in hyperbolic form.
  return std::cosh(a) * std::cosh(1.0 - b) / std::sinh(1.0);
}

double low_degree_boolean(const BitVector& x, const BitVector& y, int d) {
  const std::size_t n = x.bits.size();
  if (y.bits.size() != n) throw DomainError("low-degree kernel: length mismatch");
  if (d < 0 || static_cast<std::size_t>(d) > n) throw DomainError("low-degree kernel: need 0 <= d <= n");
  // e[k] = elementary symmetric polynomial of degree k in z_1..z_i.
  std::vector<double> e(static_cast<std::size_t>(d) + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int xi = x.bits[i];
    const int yi = y.bits[i];
    if ((xi != 1 && xi != -1) || (yi != 1 && yi != -1)) throw DomainError("low-degree kernel: entries must be +-1");
    const double z = xi * yi;
    const std::size_t top = std::min<std::size_t>(i + 1, static_cast<std::size_t>(d));
    for (std::size_t k = top; k >= 1; --k) e[k] += z * e[k - 1];
  }
  double s = 0.0;
  for (double v : e) s += v;
  return s;
}

int grid_bin_index(double p, int n_bins) {
  if (n_bins < 1) throw DomainError("grid needs at least one bin");
  check_unit(p);
  if (p >= 1.0) return n_bins - 1;
  int r = static_cast<int>(std::floor(p * n_bins));
  return std::min(r, n_bins - 1);
}

double grid_bin(double p, double q, int n_bins) {
  return grid_bin_index(p, n_bins) == grid_bin_index(q, n_bins) ? 1.0 : 0.0;
}

Kernel zero_kernel() {
  static const Kernel k(std::make_shared<ConstantImpl>(0.0));
  return k;
}

Kernel constant_kernel(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("constant kernel needs finite c >= 0");
  return Kernel(std::make_shared<ConstantImpl>(c));
}

Kernel sobolev_unit_kernel() { return Kernel(std::make_shared<SobolevImpl>()); }

Kernel grid_bin_kernel(int n_bins) {
  if (n_bins < 1) throw DomainError("grid needs at least one bin");
  return Kernel(std::make_shared<GridImpl>(n_bins));
}

Kernel laplace_kernel() { return Kernel(std::make_shared<LaplaceImpl>()); }

Kernel linear_prediction_kernel() { return Kernel(std::make_shared<LinearPredictionImpl>()); }

Kernel polynomial_kernel(int degree) {
  if (degree < 0) throw DomainError("polynomial degree must be >= 0");
  return Kernel(std::make_shared<PolynomialImpl>(degree));
}

Kernel linear_features_kernel() { return Kernel(std::make_shared<LinearFeaturesImpl>()); }

Kernel low_degree_kernel(int n, int d) {
  if (n < 0 || d < 0 || d > n) throw DomainError("low-degree kernel: need 0 <= d <= n");
  return Kernel(std::make_shared<LowDegreeImpl>(n, d));
}

Kernel gaussian_kernel(double gamma) {
  if (!(gamma > 0.0)) throw DomainError("gaussian bandwidth must be positive");
  return Kernel(std::make_shared<GaussianImpl>(gamma));
}

Kernel finite_family_kernel(std::vector<FiniteFamily::Function> family, double m, FamilyTraits traits) {
  if (!(m >= 0.0)) throw DomainError("family bound m must be >= 0");
  return Kernel(std::make_shared<FamilyImpl>(std::move(family), m, std::move(traits)));
}

}  // namespace anykernel

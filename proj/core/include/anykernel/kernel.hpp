#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "anykernel/point.hpp"

namespace anykernel {

// Which coordinates of a Point a kernel reads. Bit flags: features = 1, prediction = 2.
enum class Dependence : std::uint8_t { kNone = 0, kFeatures = 1, kPrediction = 2, kJoint = 3 };

inline Dependence operator|(Dependence a, Dependence b) {
  return static_cast<Dependence>(static_cast<std::uint8_t>(a) | static_cast<std::uint8_t>(b));
}

struct KernelTerm;
class FiniteFamily;

class KernelImpl {
 public:
  virtual ~KernelImpl() = default;
  virtual double evaluate(const Point& a, const Point& b) const = 0;
  virtual bool continuous_in_p() const = 0;
  virtual std::optional<double> diag_bound() const = 0;
  virtual Dependence dependence() const = 0;
  virtual std::string describe() const = 0;
  virtual double cost_hint() const { return 1.0; }

  // Appends coef * this as a sum of terms the predictors can evaluate cheaply.
  virtual void expand(double coef, std::vector<KernelTerm>& out,
                      const std::shared_ptr<const KernelImpl>& self) const;

  virtual const FiniteFamily* family() const { return nullptr; }
};

// Value handle around an immutable kernel implementation. Default-constructed is the zero kernel.
class Kernel {
 public:
  Kernel();
  explicit Kernel(std::shared_ptr<const KernelImpl> impl);

  double operator()(const Point& a, const Point& b) const { return impl_->evaluate(a, b); }
  double diag(const Point& z) const { return impl_->evaluate(z, z); }

  bool continuous_in_p() const { return impl_->continuous_in_p(); }
  std::optional<double> diag_bound() const { return impl_->diag_bound(); }
  Dependence dependence() const { return impl_->dependence(); }
  std::string describe() const { return impl_->describe(); }
  double cost_hint() const { return impl_->cost_hint(); }

  std::vector<KernelTerm> expansion() const;

  const KernelImpl& impl() const { return *impl_; }
  const std::shared_ptr<const KernelImpl>& impl_ptr() const { return impl_; }

 private:
  std::shared_ptr<const KernelImpl> impl_;
};

// One summand of a kernel expansion.
//  kSeparable: coef * features(x, x') * prediction(p, p'); an absent factor is the constant 1.
//  kFamily:    coef * sum_i f_i(z) f_i(z') with the family exposed for cached evaluation.
//  kJoint:     coef * kernel(z, z').
struct KernelTerm {
  enum class Kind { kSeparable, kFamily, kJoint };
  Kind kind = Kind::kJoint;
  double coef = 1.0;
  std::optional<Kernel> features;
  std::optional<Kernel> prediction;
  std::optional<Kernel> kernel;
};

class FiniteFamily {
 public:
  using Function = std::function<double(const Point&)>;

  explicit FiniteFamily(std::vector<Function> members) : members_(std::move(members)) {}
  std::size_t size() const { return members_.size(); }
  const Function& operator[](std::size_t i) const { return members_[i]; }
  void values(const Point& z, double* out) const {
    for (std::size_t i = 0; i < members_.size(); ++i) out[i] = members_[i](z);
  }

 private:
  std::vector<Function> members_;
};

struct FamilyTraits {
  std::string name = "family";
  bool continuous_in_p = false;
  Dependence dependence = Dependence::kJoint;
};

// Map used by compose(): k o phi.
struct PointMap {
  std::function<Point(const Point&)> fn;
  std::string name;
  bool continuous_in_p = true;
  // phi keeps x and maps p through a function of p alone.
  bool prediction_only = false;
};

// Scalar building blocks.
double sobolev_unit(double p, double q);
double low_degree_boolean(const BitVector& x, const BitVector& y, int d);
int grid_bin_index(double p, int n_bins);
double grid_bin(double p, double q, int n_bins);

// Catalog.
Kernel zero_kernel();
Kernel constant_kernel(double c);
Kernel sobolev_unit_kernel();
Kernel grid_bin_kernel(int n_bins);
Kernel laplace_kernel();
Kernel linear_prediction_kernel();
Kernel polynomial_kernel(int degree);
Kernel linear_features_kernel();
Kernel low_degree_kernel(int n, int d);
Kernel gaussian_kernel(double gamma = 1.0);
Kernel finite_family_kernel(std::vector<FiniteFamily::Function> family, double m,
                            FamilyTraits traits = {});

// Combinators.
Kernel sum_kernel(std::vector<Kernel> parts);
Kernel product_kernel(std::vector<Kernel> parts);
Kernel scale_kernel(double c, Kernel k);
Kernel compose_kernel(Kernel base, PointMap phi);
// Affine map of p from [lo, hi] onto [0, 1] before the base kernel.
Kernel rescale_prediction(Kernel base, double lo, double hi);

inline Kernel operator+(Kernel a, Kernel b) { return sum_kernel({std::move(a), std::move(b)}); }
inline Kernel operator*(Kernel a, Kernel b) { return product_kernel({std::move(a), std::move(b)}); }

// Shortest round-trip text for a double, used in kernel descriptions.
std::string format_number(double v);

}  // namespace anykernel

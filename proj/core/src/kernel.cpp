#include "anykernel/kernel.hpp"

#include <charconv>
#include <cmath>

#include "anykernel/errors.hpp"

namespace anykernel {

namespace {

std::optional<Kernel> multiply(const std::optional<Kernel>& a, const std::optional<Kernel>& b) {
  if (!a) return b;
  if (!b) return a;
  return product_kernel({*a, *b});
}

class SumImpl final : public KernelImpl {
 public:
  explicit SumImpl(std::vector<Kernel> parts) : parts_(std::move(parts)) {}

  double evaluate(const Point& a, const Point& b) const override {
    double s = 0.0;
    for (const auto& k : parts_) s += k(a, b);
    return s;
  }
  bool continuous_in_p() const override {
    for (const auto& k : parts_)
      if (!k.continuous_in_p()) return false;
    return true;
  }
  std::optional<double> diag_bound() const override {
    double s = 0.0;
    for (const auto& k : parts_) {
      auto b = k.diag_bound();
      if (!b) return std::nullopt;
      s += *b;
    }
    return s;
  }
  Dependence dependence() const override {
    Dependence d = Dependence::kNone;
    for (const auto& k : parts_) d = d | k.dependence();
    return d;
  }
  std::string describe() const override {
    std::string s = "(sum";
    for (const auto& k : parts_) s += " " + k.describe();
    return s + ")";
  }
  double cost_hint() const override {
    double c = 0.0;
    for (const auto& k : parts_) c += k.cost_hint();
    return c;
  }
  void expand(double coef, std::vector<KernelTerm>& out,
              const std::shared_ptr<const KernelImpl>&) const override {
    for (const auto& k : parts_) k.impl().expand(coef, out, k.impl_ptr());
  }

 private:
  std::vector<Kernel> parts_;
};

class ProductImpl final : public KernelImpl {
 public:
  explicit ProductImpl(std::vector<Kernel> parts) : parts_(std::move(parts)) {}

  double evaluate(const Point& a, const Point& b) const override {
    double s = 1.0;
    for (const auto& k : parts_) {
      s *= k(a, b);
      if (s == 0.0) return 0.0;
    }
    return s;
  }
  bool continuous_in_p() const override {
    for (const auto& k : parts_)
      if (!k.continuous_in_p()) return false;
    return true;
  }
  std::optional<double> diag_bound() const override {
    double s = 1.0;
    for (const auto& k : parts_) {
      auto b = k.diag_bound();
      if (!b) return std::nullopt;
      s *= *b;
    }
    return s;
  }
  Dependence dependence() const override {
    Dependence d = Dependence::kNone;
    for (const auto& k : parts_) d = d | k.dependence();
    return d;
  }
  std::string describe() const override {
    std::string s = "(product";
    for (const auto& k : parts_) s += " " + k.describe();
    return s + ")";
  }
  double cost_hint() const override {
    double c = 0.0;
    for (const auto& k : parts_) c += k.cost_hint();
    return c;
  }
  void expand(double coef, std::vector<KernelTerm>& out,
              const std::shared_ptr<const KernelImpl>& self) const override {
    constexpr std::size_t kMaxTerms = 64;
    std::vector<KernelTerm> acc(1);
    acc[0].kind = KernelTerm::Kind::kSeparable;
    acc[0].coef = coef;
    for (const auto& k : parts_) {
      std::vector<KernelTerm> part;
      k.impl().expand(1.0, part, k.impl_ptr());
      bool separable = acc.size() * part.size() <= kMaxTerms;
      for (const auto& t : part) separable = separable && t.kind == KernelTerm::Kind::kSeparable;
      if (!separable) {
        KernelTerm t;
        t.kind = KernelTerm::Kind::kJoint;
        t.coef = coef;
        t.kernel = Kernel(self);
        out.push_back(std::move(t));
        return;
      }
      std::vector<KernelTerm> next;
      for (const auto& a : acc) {
        for (const auto& b : part) {
          KernelTerm t;
          t.kind = KernelTerm::Kind::kSeparable;
          t.coef = a.coef * b.coef;
          t.features = multiply(a.features, b.features);
          t.prediction = multiply(a.prediction, b.prediction);
          next.push_back(std::move(t));
        }
      }
      acc = std::move(next);
    }
    for (auto& t : acc) out.push_back(std::move(t));
  }

 private:
  std::vector<Kernel> parts_;
};

class ScaleImpl final : public KernelImpl {
 public:
  ScaleImpl(double c, Kernel base) : c_(c), base_(std::move(base)) {}

  double evaluate(const Point& a, const Point& b) const override { return c_ * base_(a, b); }
  bool continuous_in_p() const override { return base_.continuous_in_p(); }
  std::optional<double> diag_bound() const override {
    auto b = base_.diag_bound();
    if (!b) return std::nullopt;
    return c_ * *b;
  }
  Dependence dependence() const override { return base_.dependence(); }
  std::string describe() const override {
    return "(scale " + format_number(c_) + " " + base_.describe() + ")";
  }
  double cost_hint() const override { return base_.cost_hint(); }
  void expand(double coef, std::vector<KernelTerm>& out,
              const std::shared_ptr<const KernelImpl>&) const override {
    base_.impl().expand(coef * c_, out, base_.impl_ptr());
  }

 private:
  double c_;
  Kernel base_;
};

class ComposeImpl final : public KernelImpl {
 public:
  ComposeImpl(Kernel base, PointMap phi) : base_(std::move(base)), phi_(std::move(phi)) {}

  double evaluate(const Point& a, const Point& b) const override {
    return base_(phi_.fn(a), phi_.fn(b));
  }
  bool continuous_in_p() const override { return base_.continuous_in_p() && phi_.continuous_in_p; }
  std::optional<double> diag_bound() const override { return base_.diag_bound(); }
  Dependence dependence() const override {
    return phi_.prediction_only ? base_.dependence() : Dependence::kJoint;
  }
  std::string describe() const override {
    return "(compose " + phi_.name + " " + base_.describe() + ")";
  }
  double cost_hint() const override { return base_.cost_hint() + 1.0; }

 private:
  Kernel base_;
  PointMap phi_;
};

class RescaleImpl final : public KernelImpl {
 public:
  RescaleImpl(Kernel base, double lo, double hi) : base_(std::move(base)), lo_(lo), hi_(hi) {}

  double evaluate(const Point& a, const Point& b) const override {
    return base_(map(a), map(b));
  }
  bool continuous_in_p() const override { return base_.continuous_in_p(); }
  std::optional<double> diag_bound() const override { return base_.diag_bound(); }
  Dependence dependence() const override { return base_.dependence(); }
  std::string describe() const override {
    return "(rescale " + format_number(lo_) + " " + format_number(hi_) + " " + base_.describe() + ")";
  }
  double cost_hint() const override { return base_.cost_hint(); }

 private:
  Point map(const Point& z) const {
    if ((static_cast<int>(base_.dependence()) & static_cast<int>(Dependence::kPrediction)) == 0) return z;
    if (!(z.p >= lo_ && z.p <= hi_)) throw DomainError("prediction outside rescale range");
    double u = (z.p - lo_) / (hi_ - lo_);
    return Point{z.x, std::min(1.0, std::max(0.0, u))};
  }

  Kernel base_;
  double lo_;
  double hi_;
};

}  // namespace

void KernelImpl::expand(double coef, std::vector<KernelTerm>& out,
                        const std::shared_ptr<const KernelImpl>& self) const {
  KernelTerm t;
  t.coef = coef;
  switch (dependence()) {
    case Dependence::kNone:
    case Dependence::kFeatures:
      t.kind = KernelTerm::Kind::kSeparable;
      t.features = Kernel(self);
      break;
    case Dependence::kPrediction:
      t.kind = KernelTerm::Kind::kSeparable;
      t.prediction = Kernel(self);
      break;
    case Dependence::kJoint:
      t.kind = KernelTerm::Kind::kJoint;
      t.kernel = Kernel(self);
      break;
  }
  out.push_back(std::move(t));
}

Kernel::Kernel() : Kernel(zero_kernel()) {}

Kernel::Kernel(std::shared_ptr<const KernelImpl> impl) : impl_(std::move(impl)) {
  if (!impl_) throw DomainError("null kernel implementation");
}

std::vector<KernelTerm> Kernel::expansion() const {
  std::vector<KernelTerm> out;
  impl_->expand(1.0, out, impl_);
  return out;
}

Kernel sum_kernel(std::vector<Kernel> parts) {
  if (parts.empty()) return zero_kernel();
  if (parts.size() == 1) return parts[0];
  return Kernel(std::make_shared<SumImpl>(std::move(parts)));
}

Kernel product_kernel(std::vector<Kernel> parts) {
  if (parts.empty()) return constant_kernel(1.0);
  if (parts.size() == 1) return parts[0];
  return Kernel(std::make_shared<ProductImpl>(std::move(parts)));
}

Kernel scale_kernel(double c, Kernel k) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("scale factor must be a finite c >= 0");
  return Kernel(std::make_shared<ScaleImpl>(c, std::move(k)));
}

Kernel compose_kernel(Kernel base, PointMap phi) {
  if (!phi.fn) throw DomainError("compose needs a map");
  if (phi.name.empty()) phi.name = "map";
  return Kernel(std::make_shared<ComposeImpl>(std::move(base), std::move(phi)));
}

Kernel rescale_prediction(Kernel base, double lo, double hi) {
  if (!(lo < hi)) throw DomainError("rescale needs lo < hi");
  return Kernel(std::make_shared<RescaleImpl>(std::move(base), lo, hi));
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace anykernel

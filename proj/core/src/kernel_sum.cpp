#include "kernel_sum.hpp"

namespace anykernel::detail {

KernelSum::KernelSum(const Kernel& k) {
  for (auto& term : k.expansion()) {
    switch (term.kind) {
      case KernelTerm::Kind::kSeparable:
        separable_.push_back(SeparableTerm{term.coef, term.features, term.prediction, {}, {}, 0.0});
        break;
      case KernelTerm::Kind::kFamily: {
        const FiniteFamily* fam = term.kernel->impl().family();
        family_.push_back(FamilyTerm{term.coef, fam, *term.kernel, std::vector<double>(fam->size(), 0.0),
                                     std::vector<double>(fam->size(), 0.0)});
        break;
      }
      case KernelTerm::Kind::kJoint:
        joint_.push_back(JointTerm{term.coef, *term.kernel});
        break;
    }
  }
}

void KernelSum::append(const Point& z, double residual) {
  points_.push_back(z);
  residuals_.push_back(residual);
  for (auto& f : family_) {
    f.family->values(z, f.scratch.data());
    for (std::size_t l = 0; l < f.acc.size(); ++l) f.acc[l] += residual * f.scratch[l];
  }
}

void KernelSum::prepare(const Features& x) {
  probe_ = Point{x, 0.0};
  for (auto& term : separable_) {
    term.idx.clear();
    term.w.clear();
    term.constant = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      double w = term.coef * residuals_[i];
      if (term.features) w *= (*term.features)(probe_, points_[i]);
      if (!term.prediction) {
        term.constant += w;
      } else if (w != 0.0) {
        term.idx.push_back(static_cast<std::uint32_t>(i));
        term.w.push_back(w);
      }
    }
  }
}

double KernelSum::evaluate(double p) {
  probe_.p = p;
  double s = 0.0;
  for (const auto& term : separable_) {
    if (!term.prediction) {
      s += term.constant;
      continue;
    }
    const Kernel& kp = *term.prediction;
    double part = 0.0;
    for (std::size_t k = 0; k < term.idx.size(); ++k) part += term.w[k] * kp(probe_, points_[term.idx[k]]);
    s += part;
  }
  for (auto& f : family_) {
    f.family->values(probe_, f.scratch.data());
    double part = 0.0;
    for (std::size_t l = 0; l < f.acc.size(); ++l) part += f.scratch[l] * f.acc[l];
    s += f.coef * part;
  }
  for (const auto& j : joint_) {
    double part = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) part += j.kernel(probe_, points_[i]) * residuals_[i];
    s += j.coef * part;
  }
  return s;
}

double direct_sum(const Kernel& k, const std::vector<Point>& points, const std::vector<double>& residuals,
                  const Point& z) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) s += k(z, points[i]) * residuals[i];
  return s;
}

}  // namespace anykernel::detail

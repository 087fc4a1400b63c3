#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "anykernel/kernel.hpp"
#include "anykernel/transcript.hpp"

namespace anykernel::detail {

// Maintains sum_i k((x, p), z_i) r_i over a growing history, split along the kernel's
// expansion so that factors not depending on p are evaluated once per round.
class KernelSum {
 public:
  explicit KernelSum(const Kernel& k);

  void append(const Point& z, double residual);
  // Fixes x for the next evaluate() calls.
  void prepare(const Features& x);
  double evaluate(double p);
  std::size_t size() const { return points_.size(); }

 private:
  struct SeparableTerm {
    double coef;
    std::optional<Kernel> features;
    std::optional<Kernel> prediction;
    std::vector<std::uint32_t> idx;
    std::vector<double> w;
    double constant = 0.0;
  };
  struct FamilyTerm {
    double coef;
    const FiniteFamily* family;
    Kernel keep_alive;
    std::vector<double> acc;
    std::vector<double> scratch;
  };
  struct JointTerm {
    double coef;
    Kernel kernel;
  };

  std::vector<SeparableTerm> separable_;
  std::vector<FamilyTerm> family_;
  std::vector<JointTerm> joint_;
  std::vector<Point> points_;
  std::vector<double> residuals_;
  Point probe_;
};

// Direct O(t) evaluation of sum_i k(z, z_i) r_i, used as the reference in audits.
double direct_sum(const Kernel& k, const std::vector<Point>& points, const std::vector<double>& residuals,
                  const Point& z);

enum class EndpointRule { kBinary, kQuantile };

struct SearchResult {
  PredictionDistribution dist;
  double s_q = 0.0;
  double s_q2 = 0.0;
  double epsilon = 0.0;
  Branch branch = Branch::kSign;
  int evaluations = 0;
};

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Forecast-hedging search over [lo, hi]. s(p) must return S_t(p) and raise b to at least the
// kernel diagonal at (x, p).
template <class SFn>
SearchResult hedge_search(SFn&& s, double lo, double hi, std::int64_t t, double& b, bool continuous,
                          EndpointRule rule) {
  SearchResult r;
  const double td = static_cast<double>(t);
  auto epsilon = [&] { return b > 0.0 ? 1.0 / (10.0 * td * td * td * b) : INFINITY; };
  const double root_tol_cap = 1.0 / (10.0 * td * td);

  const double s_lo = s(lo);
  const double s_hi = s(hi);
  r.evaluations = 2;
  auto point = [&](double p, double sp, Branch br) {
    r.dist = PredictionDistribution::point_mass(p);
    r.s_q = r.s_q2 = sp;
    r.branch = br;
    r.epsilon = epsilon();
    return r;
  };

  if (rule == EndpointRule::kBinary) {
    if (sign_of(s_lo) != 0 && sign_of(s_lo) == sign_of(s_hi))
      return s_lo > 0.0 ? point(hi, s_hi, Branch::kSign) : point(lo, s_lo, Branch::kSign);
    if (s_lo == 0.0) return point(lo, s_lo, Branch::kZero);
    if (s_hi == 0.0) return point(hi, s_hi, Branch::kZero);
  } else {
    if (s_lo >= 0.0 && s_hi >= 0.0) return point(lo, s_lo, (s_lo == 0.0 || s_hi == 0.0) ? Branch::kZero : Branch::kSign);
    if (s_lo <= 0.0 && s_hi <= 0.0) return point(hi, s_hi, (s_lo == 0.0 || s_hi == 0.0) ? Branch::kZero : Branch::kSign);
  }

  // Opposite strict signs from here on; keep sign s(a) = sign s(lo), sign s(b) = sign s(hi).
  double a = lo;
  double c = hi;
  double sa = s_lo;
  double sc = s_hi;
  for (;;) {
    const double eps = epsilon();
    if (c - a <= eps) break;
    const double mid = a + (c - a) / 2.0;
    if (!(mid > a && mid < c)) break;
    const double sm = s(mid);
    ++r.evaluations;
    if (sm == 0.0) return point(mid, sm, Branch::kZero);
    if (continuous && std::fabs(sm) <= std::min(epsilon(), root_tol_cap)) return point(mid, sm, Branch::kRoot);
    if (sign_of(sm) == sign_of(sa)) {
      a = mid;
      sa = sm;
    } else {
      c = mid;
      sc = sm;
    }
  }
  const double tau = std::fabs(sc) / (std::fabs(sa) + std::fabs(sc));
  r.dist = PredictionDistribution::two_point(a, c, tau);
  r.s_q = sa;
  r.s_q2 = sc;
  r.epsilon = epsilon();
  r.branch = Branch::kHedge;
  return r;
}

}  // namespace anykernel::detail

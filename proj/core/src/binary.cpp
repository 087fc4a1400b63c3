#include "anykernel/binary.hpp"

#include <algorithm>
#include <cmath>

#include "anykernel/errors.hpp"
#include "kernel_sum.hpp"

namespace anykernel {

BinaryPredictor::BinaryPredictor(Kernel kernel, std::uint64_t seed)
    : kernel_(std::move(kernel)),
      rng_(seed, "predictor"),
      sum_(std::make_unique<detail::KernelSum>(kernel_)) {}

BinaryPredictor::~BinaryPredictor() = default;
BinaryPredictor::BinaryPredictor(BinaryPredictor&&) noexcept = default;
BinaryPredictor& BinaryPredictor::operator=(BinaryPredictor&&) noexcept = default;

BinaryPredictor BinaryPredictor::replay(Kernel kernel, const std::vector<Round>& prefix, std::uint64_t seed) {
  BinaryPredictor pred(std::move(kernel), seed);
  for (const auto& r : prefix) pred.observe(r);
  return pred;
}

double BinaryPredictor::s_value(double p, double& b) {
  const Point z{current_, p};
  const double diag = kernel_(z, z);
  b = std::max(b, diag);
  return sum_->evaluate(p) + 0.5 * diag * (1.0 - 2.0 * p);
}

double BinaryPredictor::s_function(const Features& x, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("prediction outside [0,1]");
  current_ = x;
  sum_->prepare(x);
  double b = b_;
  return s_value(p, b);
}

HedgeResult BinaryPredictor::predict(const Features& x) {
  current_ = x;
  sum_->prepare(x);
  double b = b_;
  const auto t = next_round();
  auto res = detail::hedge_search([&](double p) { return s_value(p, b); }, 0.0, 1.0, t, b,
                                  kernel_.continuous_in_p(), detail::EndpointRule::kBinary);
  return HedgeResult{res.dist, res.s_q, res.s_q2, res.epsilon, b, res.branch, res.evaluations};
}

const Round& BinaryPredictor::step(const Features& x, const BinaryNatureFn& nature) {
  const auto t = next_round();
  const HedgeResult h = predict(x);
  Round r;
  r.t = t;
  r.x = x;
  r.dist = h.dist;
  r.p = h.dist.sample(rng_.uniform(static_cast<std::uint64_t>(t)));
  r.y = nature(t, x, h.dist);
  if (r.y != 0.0 && r.y != 1.0) throw ProtocolError(t, "nature returned a non-binary outcome");
  r.s_q = h.s_q;
  r.s_q2 = h.s_q2;
  r.epsilon = h.epsilon;
  r.b = h.b;
  r.branch = h.branch;
  observe(std::move(r));
  return rounds_.back();
}

void BinaryPredictor::observe(Round r) {
  if (r.t != next_round()) throw ProtocolError(r.t, "round out of order");
  if (!(r.p >= 0.0 && r.p <= 1.0)) throw ProtocolError(r.t, "prediction outside [0,1]");
  sum_->append(Point{r.x, r.p}, r.y - r.p);
  b_ = std::max(b_, r.b);
  b_ = std::max(b_, kernel_(Point{r.x, r.p}, Point{r.x, r.p}));
  rounds_.push_back(std::move(r));
}

double reference_s(const Kernel& k, const std::vector<Round>& rounds, std::int64_t t, double p) {
  if (t < 1 || t > static_cast<std::int64_t>(rounds.size()) + 1) throw DomainError("round index out of range");
  const Round* self = t <= static_cast<std::int64_t>(rounds.size()) ? &rounds[static_cast<std::size_t>(t - 1)] : nullptr;
  if (self == nullptr) throw DomainError("reference_s needs the features of round t");
  const Point z{self->x, p};
  double s = 0.0;
  for (std::int64_t i = 0; i + 1 < t; ++i) {
    const auto& r = rounds[static_cast<std::size_t>(i)];
    s += k(z, Point{r.x, r.p}) * (r.y - r.p);
  }
  return s + 0.5 * k(z, z) * (1.0 - 2.0 * p);
}

double hedging_excess(const PredictionDistribution& d, double s_q, double s_q2) {
  double worst = -INFINITY;
  for (double y : {0.0, 1.0}) {
    const double v = d.is_point_mass() ? s_q * (y - d.q)
                                       : d.tau * s_q * (y - d.q) + (1.0 - d.tau) * s_q2 * (y - d.q2);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace anykernel

#include "anykernel/quantile.hpp"

#include <algorithm>
#include <cmath>

#include "anykernel/errors.hpp"
#include "kernel_sum.hpp"

namespace anykernel {

void QuantileConfig::validate() const {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0,1)");
  if (!(y_min < y_max)) throw DomainError("quantile range needs y_min < y_max");
}

QuantilePredictor::QuantilePredictor(Kernel kernel, QuantileConfig config, std::uint64_t seed)
    : kernel_(std::move(kernel)),
      config_(config),
      rng_(seed, "predictor"),
      sum_(std::make_unique<detail::KernelSum>(kernel_)) {
  config_.validate();
}

QuantilePredictor::~QuantilePredictor() = default;
QuantilePredictor::QuantilePredictor(QuantilePredictor&&) noexcept = default;
QuantilePredictor& QuantilePredictor::operator=(QuantilePredictor&&) noexcept = default;

double QuantilePredictor::s_value(double p, double& b) {
  const Point z{current_, p};
  const double diag = kernel_(z, z);
  b = std::max(b, diag);
  return sum_->evaluate(p) + 0.5 * diag * (1.0 - 2.0 * config_.q);
}

double QuantilePredictor::s_function(const Features& x, double p) {
  if (!(p >= config_.y_min && p <= config_.y_max)) throw DomainError("prediction outside [y_min, y_max]");
  current_ = x;
  sum_->prepare(x);
  double b = b_;
  return s_value(p, b);
}

HedgeResult QuantilePredictor::predict(const Features& x) {
  current_ = x;
  sum_->prepare(x);
  double b = b_;
  // No continuous shortcut: the per-round guarantee relies on the two-point width.
  auto res = detail::hedge_search([&](double p) { return s_value(p, b); }, config_.y_min, config_.y_max,
                                  next_round(), b, false, detail::EndpointRule::kQuantile);
  return HedgeResult{res.dist, res.s_q, res.s_q2, res.epsilon, b, res.branch, res.evaluations};
}

const Round& QuantilePredictor::step(const Features& x, const RealNatureFn& nature) {
  const auto t = next_round();
  const HedgeResult h = predict(x);
  Round r;
  r.t = t;
  r.x = x;
  r.dist = h.dist;
  r.p = h.dist.sample(rng_.uniform(static_cast<std::uint64_t>(t)));
  r.y = nature(t, x, h.dist);
  if (!(r.y >= config_.y_min && r.y <= config_.y_max)) throw ProtocolError(t, "outcome outside [y_min, y_max]");
  r.s_q = h.s_q;
  r.s_q2 = h.s_q2;
  r.epsilon = h.epsilon;
  r.b = h.b;
  r.branch = h.branch;
  observe(std::move(r));
  return rounds_.back();
}

void QuantilePredictor::observe(Round r) {
  if (r.t != next_round()) throw ProtocolError(r.t, "round out of order");
  sum_->append(Point{r.x, r.p}, quantile_residual(r.y, r.p, config_.q));
  b_ = std::max(b_, r.b);
  b_ = std::max(b_, kernel_(Point{r.x, r.p}, Point{r.x, r.p}));
  rounds_.push_back(std::move(r));
}

double reference_s_quantile(const Kernel& k, const std::vector<Round>& rounds, std::int64_t t, double p,
                            double q) {
  if (t < 1 || t > static_cast<std::int64_t>(rounds.size())) throw DomainError("round index out of range");
  const Point z{rounds[static_cast<std::size_t>(t - 1)].x, p};
  double s = 0.0;
  for (std::int64_t i = 0; i + 1 < t; ++i) {
    const auto& r = rounds[static_cast<std::size_t>(i)];
    s += k(z, Point{r.x, r.p}) * quantile_residual(r.y, r.p, q);
  }
  return s + 0.5 * k(z, z) * (1.0 - 2.0 * q);
}

}  // namespace anykernel

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "anykernel/binary.hpp"
#include "anykernel/kernel.hpp"
#include "anykernel/rng.hpp"
#include "anykernel/transcript.hpp"

namespace anykernel {

struct QuantileConfig {
  double q = 0.5;
  double y_min = 0.0;
  double y_max = 1.0;
  void validate() const;
};

using RealNatureFn = std::function<double(std::int64_t t, const Features& x, const PredictionDistribution& d)>;

// Forecaster for the q-quantile of real outcomes in [y_min, y_max]. The kernel sees raw
// predictions in [y_min, y_max]; wrap unit-interval kernels with rescale_prediction.
class QuantilePredictor {
 public:
  QuantilePredictor(Kernel kernel, QuantileConfig config, std::uint64_t seed = 0);
  ~QuantilePredictor();
  QuantilePredictor(QuantilePredictor&&) noexcept;
  QuantilePredictor& operator=(QuantilePredictor&&) noexcept;

  const QuantileConfig& config() const { return config_; }
  const Kernel& kernel() const { return kernel_; }
  std::int64_t next_round() const { return static_cast<std::int64_t>(rounds_.size()) + 1; }
  double running_b() const { return b_; }
  const std::vector<Round>& rounds() const { return rounds_; }

  double s_function(const Features& x, double p);
  HedgeResult predict(const Features& x);
  const Round& step(const Features& x, const RealNatureFn& nature);
  void observe(Round r);

 private:
  double s_value(double p, double& b);

  Kernel kernel_;
  QuantileConfig config_;
  CounterRng rng_;
  std::unique_ptr<detail::KernelSum> sum_;
  std::vector<Round> rounds_;
  Features current_;
  double b_ = 0.0;
};

// 1{y <= p} - q, closed at equality.
inline double quantile_residual(double y, double p, double q) { return (y <= p ? 1.0 : 0.0) - q; }

// Audit helper: S^q_t(p) recomputed directly.
double reference_s_quantile(const Kernel& k, const std::vector<Round>& rounds, std::int64_t t, double p,
                            double q);

}  // namespace anykernel

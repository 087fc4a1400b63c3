#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "anykernel/kernel.hpp"
#include "anykernel/rng.hpp"
#include "anykernel/transcript.hpp"

namespace anykernel {

namespace detail {
class KernelSum;
}

// Nature sees the round index, the features and the full distribution before choosing y.
using BinaryNatureFn = std::function<double(std::int64_t t, const Features& x, const PredictionDistribution& d)>;

struct HedgeResult {
  PredictionDistribution dist;
  double s_q = 0.0;
  double s_q2 = 0.0;
  double epsilon = 0.0;
  double b = 0.0;  // running B after the search
  Branch branch = Branch::kSign;
  int evaluations = 0;
};

// Sequential forecaster for binary outcomes with per-round forecast hedging.
class BinaryPredictor {
 public:
  explicit BinaryPredictor(Kernel kernel, std::uint64_t seed = 0);
  ~BinaryPredictor();
  BinaryPredictor(BinaryPredictor&&) noexcept;
  BinaryPredictor& operator=(BinaryPredictor&&) noexcept;

  // Rebuilds the state after the given rounds, restoring B from the last round.
  static BinaryPredictor replay(Kernel kernel, const std::vector<Round>& prefix, std::uint64_t seed = 0);

  const Kernel& kernel() const { return kernel_; }
  std::int64_t next_round() const { return static_cast<std::int64_t>(rounds_.size()) + 1; }
  double running_b() const { return b_; }
  const std::vector<Round>& rounds() const { return rounds_; }

  // S_t(p) for the upcoming round t.
  double s_function(const Features& x, double p);

  // Distribution for the upcoming round. Does not advance the state.
  HedgeResult predict(const Features& x);

  // predict, sample p with the counter RNG (one draw keyed by t), query nature, record.
  const Round& step(const Features& x, const BinaryNatureFn& nature);

  // Appends a finished round produced elsewhere.
  void observe(Round r);

 private:
  double s_value(double p, double& b);

  Kernel kernel_;
  CounterRng rng_;
  std::unique_ptr<detail::KernelSum> sum_;
  std::vector<Round> rounds_;
  Features current_;
  double b_ = 0.0;
};

// Audit helper: S_t(p) recomputed directly from rounds[0..t-2] without any caching.
double reference_s(const Kernel& k, const std::vector<Round>& rounds, std::int64_t t, double p);

// max over y in {0,1} of E_{p ~ dist}[S(p)(y - p)] from recorded support values.
double hedging_excess(const PredictionDistribution& d, double s_q, double s_q2);

}  // namespace anykernel

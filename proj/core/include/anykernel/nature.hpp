#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anykernel/graph.hpp"
#include "anykernel/rng.hpp"
#include "anykernel/transcript.hpp"
#include "anykernel/vector.hpp"

namespace anykernel {

// Every simulator is a deterministic function of its seed and the sequence of calls it receives.
class BinarySimulator {
 public:
  virtual ~BinarySimulator() = default;
  virtual Features features(std::int64_t t) = 0;
  virtual double outcome(std::int64_t t, const Features& x, const PredictionDistribution& d) = 0;
  virtual std::string describe() const = 0;
  // Called once after the last round.
  virtual void finish() {}
};

// bits > 0 attaches uniform features from {-1,+1}^bits; outcomes ignore them.
std::unique_ptr<BinarySimulator> make_iid_bernoulli(double theta, std::uint64_t seed, int bits = 0);
// y = 1 iff E p < 1/2.
std::unique_ptr<BinarySimulator> make_contrarian(std::uint64_t seed, int bits = 0);
// P(y = 1) = sigmoid(a + b E p).
std::unique_ptr<BinarySimulator> make_performative_sigmoid(double a, double b, std::uint64_t seed, int bits = 0);

class LogisticNature final : public BinarySimulator {
 public:
  // Uniform x in {-1,+1}^n, P(y = 1 | x) = sigmoid(bias + w.x).
  LogisticNature(std::vector<double> weights, double bias, std::uint64_t seed);
  Features features(std::int64_t t) override;
  double outcome(std::int64_t t, const Features& x, const PredictionDistribution& d) override;
  std::string describe() const override;
  double bayes(const Features& x) const;
  int dim() const { return static_cast<int>(w_.size()); }

 private:
  std::vector<double> w_;
  double bias_;
  RngStream rng_;
};

struct GraphEvolutionParams {
  int initial_nodes = 30;
  double arrival = 0.05;  // per-round probability of a new node
  int degree_cap = 4;
  int communities = 3;
  int roles = 3;
  double base = -2.0;        // logit intercept
  double attachment = 1.0;   // times (deg_i + deg_j) / (2 cap)
  double closure = 1.0;      // per common neighbor
  double homophily = 1.0;    // same community
  double triadic_proposal = 0.5;  // chance the candidate j is a friend of a friend
};

// Link formation on a growing graph. Round t proposes a non-adjacent pair (i, j) with spare
// degree, shows the radius-1 view, and adds the edge when y = 1. Node features are one-hot
// community followed by one-hot role.
class GraphEvolution final : public BinarySimulator {
 public:
  GraphEvolution(GraphEvolutionParams params, std::uint64_t seed, std::ostream* stream = nullptr);
  Features features(std::int64_t t) override;
  double outcome(std::int64_t t, const Features& x, const PredictionDistribution& d) override;
  std::string describe() const override;
  // Writes any buffered edge to the event stream.
  void finish() override;

  const EvolvingGraph& graph() const { return graph_; }
  const GraphEvolutionParams& params() const { return params_; }
  // Community and role indicators; each node belongs to exactly two groups.
  GroupFamily groups() const;
  double link_probability(const UniverseElement& u) const;

 private:
  void add_node();
  std::int64_t pick_eligible();

  GraphEvolutionParams params_;
  RngStream rng_;
  EvolvingGraph graph_;
  std::unique_ptr<GraphStreamWriter> writer_;
  std::vector<std::int64_t> eligible_;
  std::int64_t next_id_ = 0;
  std::int64_t pending_u_ = -1;
  std::int64_t pending_v_ = -1;
};

class RealSimulator {
 public:
  virtual ~RealSimulator() = default;
  virtual Features features(std::int64_t t) = 0;
  virtual double outcome(std::int64_t t, const Features& x, const PredictionDistribution& d) = 0;
  // Conditional CDF of the outcome given x.
  virtual double cdf(const Features& x, double y) const = 0;
  // Lipschitz constant of every conditional CDF.
  virtual double rho() const = 0;
  virtual double y_min() const = 0;
  virtual double y_max() const = 0;
  virtual std::string describe() const = 0;
};

struct BetaComponent {
  double a = 2.0;
  double b = 2.0;
};

// x = (u) with u uniform on [0,1].
// Truncated Gaussian: mean y_min + (y_max - y_min)(1/4 + u/2), fixed sigma, truncated to the range.
std::unique_ptr<RealSimulator> make_truncated_gaussian(double y_min, double y_max, double sigma, std::uint64_t seed);
// Beta mixture with weights (u, 1 - u) on two components (a, b >= 1), mapped onto the range.
std::unique_ptr<RealSimulator> make_beta_mixture(double y_min, double y_max, BetaComponent first, BetaComponent second,
                                                 std::uint64_t seed);

class VectorSimulator {
 public:
  virtual ~VectorSimulator() = default;
  virtual Features features(std::int64_t t) = 0;
  virtual Eigen::VectorXd outcome(std::int64_t t, const Features& x, const Eigen::VectorXd& p) = 0;
  virtual std::string describe() const = 0;
};

// x uniform on [0,1]^d; y_j = clamp(lower_j + (upper_j - lower_j) x_j + noise * N(0,1)).
std::unique_ptr<VectorSimulator> make_vector_noise(OutcomeBox box, double noise, std::uint64_t seed);

}  // namespace anykernel

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "anykernel/kernel.hpp"
#include "anykernel/rng.hpp"
#include "anykernel/transcript.hpp"

namespace anykernel {

struct LabeledSample {
  std::vector<Point> x;
  std::vector<double> y;  // labels in [-1, 1]

  std::size_t size() const { return y.size(); }
  void validate() const;
};

struct BallSolution {
  Eigen::VectorXd alpha;
  double value = 0.0;
};

// argmax (1/n) alpha^T K y subject to alpha^T K alpha <= B^2.
BallSolution rkhs_ball_learner(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double radius);
BallSolution rkhs_ball_learner(const LabeledSample& sample, const Kernel& k, double radius);

// Distribution of the predictor replayed against rounds 1..i-1 (i is 1-based), evaluated at x.
PredictionDistribution online_to_batch_at(const std::vector<Round>& rounds, const Kernel& k, const Features& x,
                                          std::size_t i);
// Draws i uniformly from 1..T with one draw of rng.
PredictionDistribution online_to_batch(const std::vector<Round>& rounds, const Kernel& k, const Features& x,
                                       RngStream& rng);
// Average over every i of the mean prediction.
double online_to_batch_mean(const std::vector<Round>& rounds, const Kernel& k, const Features& x);

// CSV with header "y,x1,...,xk" and dense features; p is set to 0.
LabeledSample read_sample_csv(std::istream& in);
void write_alpha_csv(std::ostream& out, const BallSolution& s);

}  // namespace anykernel

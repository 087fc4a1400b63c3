#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anykernel/kernel.hpp"
#include "anykernel/transcript.hpp"

namespace anykernel {

enum class PostProcess { kIdentity, kClosedForm, kConvexTernary, kGrid };

struct LossTags {
  bool proper_scoring = false;
  std::optional<double> strongly_convex;  // gamma
  bool finite_set_member = false;
  bool any() const { return proper_scoring || strongly_convex.has_value() || finite_set_member; }
};

// Loss l(x, yhat, y) with yhat in [0,1] and binary y. Values are clamped to [-1,1].
struct Loss {
  std::string name;
  std::function<double(const Features& x, double yhat, double y)> fn;
  PostProcess strategy = PostProcess::kGrid;
  // Used when strategy is kClosedForm.
  std::function<double(const Features& x, double p)> closed_form;
  LossTags tags;
  bool reads_features = false;

  double operator()(const Features& x, double yhat, double y) const;
  // l(x, yhat, 1) - l(x, yhat, 0).
  double derivative(const Features& x, double yhat) const;
};

Loss squared_loss();
// Closed form 1{p > 1/2}, ties to 0. Tagged as a finite-set member.
Loss absolute_loss();
// Log loss on yhat clipped to [delta, 1 - delta], divided by log(1/delta). Finite-set member.
Loss logistic_truncated_loss(double delta = 0.05);
Loss named_loss(const std::string& name);

// Smallest minimizer of p l(x, yhat, 1) + (1 - p) l(x, yhat, 0) over yhat in [0,1].
double post_process(const Loss& loss, const Features& x, double p);
// Same objective minimized on the uniform grid of m points.
double grid_argmin(const Loss& loss, const Features& x, double p, int m);

struct Comparator {
  std::string name;
  std::function<double(const Features&)> fn;
  double lo = -1.0;
  double hi = 1.0;
  // Evaluates and checks the declared range.
  double operator()(const Features& x) const;
};

struct TreeClass {
  int depth = 0;
  int arity = 0;  // number of boolean input coordinates
};

struct ComparatorSet {
  std::vector<Comparator> members;
  std::optional<TreeClass> trees;
};

// Canonical text key of a feature vector, used by tabulated comparators.
std::string feature_key(const Features& x);
Comparator tabulated_comparator(std::string name, std::vector<std::pair<std::string, double>> table,
                                double lo = -1.0, double hi = 1.0);
// CSV rows: name,x_ref,value (header line required).
std::vector<Comparator> read_tabulated_comparators(std::istream& in);

// A kernel together with the norm constant its builder reports.
struct BoundedKernel {
  Kernel kernel;
  double bound = 0.0;
};

BoundedKernel kdoi_kernel(const std::vector<Loss>& losses);
BoundedKernel khoi_kernel(const std::vector<Loss>& losses, const ComparatorSet& comparators);
// Pointwise product; the bound multiplies.
BoundedKernel separable_wrap(const BoundedKernel& feature_weight, const BoundedKernel& base);
// k(x, x') + p p' + 1.
Kernel online_regression_kernel(Kernel features_kernel);

struct RegretReport {
  double algorithm_loss = 0.0;
  double best_loss = 0.0;
  double regret = 0.0;
  std::size_t best_index = 0;
};

// Expected loss uses each round's two-point distribution.
RegretReport omni_regret(const std::vector<Round>& rounds, const Loss& loss, const std::vector<Comparator>& comparators);
// sum_t E (y_t - p_t) dl(x_t, pi(x_t, p_t)).
double decision_oi_error(const std::vector<Round>& rounds, const Loss& loss);
// sum_t E (y_t - p_t) dl(x_t, h(x_t)).
double hypothesis_oi_error(const std::vector<Round>& rounds, const Loss& loss, const Comparator& h);

}  // namespace anykernel

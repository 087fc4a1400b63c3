#pragma once

// Test-only reference implementations. Each one is written from the defining formula with no
// calls into the library code it checks.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include <anykernel/graph.hpp>
#include <anykernel/kernel.hpp>
#include <anykernel/transcript.hpp>

namespace oracle {

using anykernel::BitVector;
using anykernel::Point;
using anykernel::Round;

// 50-digit evaluation of the unit-interval Sobolev kernel.
double sobolev_mp(double p, double q);

// Sum over every subset S with |S| <= d of prod_{i in S} x_i y_i.
double low_degree_subsets(const BitVector& x, const BitVector& y, int d);

// Searches all bijections that send i to i' and j to j' and preserve adjacency.
bool isomorphic_marked(const anykernel::UniverseElement& a, const anykernel::UniverseElement& b);

// Max of (v - p)^T s over the 2^d vertices of the box.
double vi_residual_vertices(const Eigen::VectorXd& p, const Eigen::VectorXd& s, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper);

// Projected gradient ascent on beta = K^{1/2} alpha over the Euclidean ball of radius B.
// Returns the objective (1/n) sum_i f(x_i) y_i and the fitted values f(x_i).
struct PgaResult {
  double value = 0.0;
  Eigen::VectorXd fitted;
};
PgaResult rkhs_ball_pga(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, double radius, int steps,
                        std::uint64_t seed);

// argmin over a uniform grid of m points of p g(yhat, 1) + (1 - p) g(yhat, 0); first minimizer wins.
double grid_argmin(const std::function<double(double, double)>& g, double p, int m);

// S_t(p) for the binary predictor, summed directly over rounds[0..t-2].
double binary_s(const anykernel::Kernel& k, const std::vector<Round>& rounds, std::int64_t t,
                const anykernel::Features& x, double p);
double quantile_s(const anykernel::Kernel& k, const std::vector<Round>& rounds, std::int64_t t,
                  const anykernel::Features& x, double p, double q);

// sum_t sum_s w_t w_s k(z_t, z_s) in long double, w at the sampled p.
long double kce_squared(const std::vector<Round>& rounds, const anykernel::Kernel& k);

// Signed error of the (g, g', bin) cell by direct loops over rounds and support points.
double mc_cell(const std::vector<Round>& rounds, const anykernel::GroupFamily& groups, std::size_t g,
               std::size_t g2, int bin, int n_bins);

// Random element with |Gamma(i) u Gamma(j)| = n nodes.
anykernel::UniverseElement random_element(std::mt19937_64& rng, int n, double extra_edge_prob);
// Same structure under a random relabeling of node ids (i and j keep their roles).
anykernel::UniverseElement relabel(const anykernel::UniverseElement& u, std::mt19937_64& rng);

BitVector random_bits(std::mt19937_64& rng, int n);

}  // namespace oracle

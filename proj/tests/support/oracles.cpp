#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

double sobolev_mp(double p, double q) {
  using boost::multiprecision::cpp_bin_float_50;
  const cpp_bin_float_50 a = std::min(p, q);
  const cpp_bin_float_50 b = std::max(p, q);
  const cpp_bin_float_50 one = 1;
  const cpp_bin_float_50 e = exp(one);
  const cpp_bin_float_50 v = (exp(a) + exp(-a)) * (exp(one - b) + exp(b - one)) / (2 * (e - 1 / e));
  return static_cast<double>(v);
}

double low_degree_subsets(const BitVector& x, const BitVector& y, int d) {
  const int n = static_cast<int>(x.bits.size());
  double total = 0.0;
  for (std::uint32_t s = 0; s < (1U << n); ++s) {
    if (std::popcount(s) > d) continue;
    double prod = 1.0;
    for (int i = 0; i < n; ++i)
      if ((s >> i) & 1U) prod *= static_cast<double>(x.bits[i]) * y.bits[i];
    total += prod;
  }
  return total;
}

bool isomorphic_marked(const anykernel::UniverseElement& a, const anykernel::UniverseElement& b) {
  const int n = static_cast<int>(a.size());
  if (n != static_cast<int>(b.size()) || a.edges.size() != b.edges.size()) return false;
  std::set<std::pair<int, int>> eb(b.edges.begin(), b.edges.end());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    if (perm[a.local_i] != b.local_i || perm[a.local_j] != b.local_j) continue;
    bool ok = true;
    for (auto [u, v] : a.edges) {
      const int x = perm[u], y = perm[v];
      if (!eb.count({std::min(x, y), std::max(x, y)})) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

double vi_residual_vertices(const Eigen::VectorXd& p, const Eigen::VectorXd& s, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper) {
  const int d = static_cast<int>(p.size());
  double best = -INFINITY;
  for (std::uint32_t m = 0; m < (1U << d); ++m) {
    Eigen::VectorXd v(d);
    for (int j = 0; j < d; ++j) v[j] = (m >> j) & 1U ? upper[j] : lower[j];
    best = std::max(best, (v - p).dot(s));
  }
  return best;
}

PgaResult rkhs_ball_pga(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, double radius, int steps,
                        std::uint64_t seed) {
  const auto n = static_cast<double>(y.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  const double norm = std::max(ev.maxCoeff(), 1e-300);
  const Eigen::VectorXd grad = root * y / n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd beta(y.size());
  for (Eigen::Index i = 0; i < beta.size(); ++i) beta[i] = g(rng);
  beta *= 0.5 * radius / std::max(beta.norm(), 1e-300);
  for (int s = 0; s < steps; ++s) {
    beta += grad / norm;
    const double r = beta.norm();
    if (r > radius) beta *= radius / r;
  }
  return {grad.dot(beta), root * beta};
}

double grid_argmin(const std::function<double(double, double)>& g, double p, int m) {
  double best = INFINITY, arg = 0.0;
  for (int i = 0; i < m; ++i) {
    const double yhat = static_cast<double>(i) / (m - 1);
    const double v = p * g(yhat, 1.0) + (1.0 - p) * g(yhat, 0.0);
    if (v < best) best = v, arg = yhat;
  }
  return arg;
}

double binary_s(const anykernel::Kernel& k, const std::vector<Round>& rounds, std::int64_t t,
                const anykernel::Features& x, double p) {
  const Point z{x, p};
  double s = 0.5 * k(z, z) * (1.0 - 2.0 * p);
  for (std::int64_t i = 0; i + 1 < t; ++i) {
    const auto& r = rounds[static_cast<std::size_t>(i)];
    s += k(z, Point{r.x, r.p}) * (r.y - r.p);
  }
  return s;
}

double quantile_s(const anykernel::Kernel& k, const std::vector<Round>& rounds, std::int64_t t,
                  const anykernel::Features& x, double p, double q) {
  const Point z{x, p};
  double s = 0.5 * k(z, z) * (1.0 - 2.0 * q);
  for (std::int64_t i = 0; i + 1 < t; ++i) {
    const auto& r = rounds[static_cast<std::size_t>(i)];
    s += k(z, Point{r.x, r.p}) * ((r.y <= r.p ? 1.0 : 0.0) - q);
  }
  return s;
}

long double kce_squared(const std::vector<Round>& rounds, const anykernel::Kernel& k) {
  long double total = 0.0L;
  for (const auto& a : rounds)
    for (const auto& b : rounds)
      total += static_cast<long double>(a.y - a.p) * (b.y - b.p) * k(Point{a.x, a.p}, Point{b.x, b.p});
  return total;
}

double mc_cell(const std::vector<Round>& rounds, const anykernel::GroupFamily& groups, std::size_t g,
               std::size_t g2, int bin, int n_bins) {
  auto bin_of = [&](double p) { return std::min(static_cast<int>(std::floor(p * n_bins)), n_bins - 1); };
  double e = 0.0;
  for (const auto& r : rounds) {
    const auto& u = r.x.element();
    if (!groups.contains(g, u.features_i()) || !groups.contains(g2, u.features_j())) continue;
    const double w1 = r.dist.is_point_mass() ? 1.0 : r.dist.tau;
    if (bin_of(r.dist.q) == bin) e += w1 * (r.y - r.dist.q);
    if (!r.dist.is_point_mass() && bin_of(r.dist.q2) == bin) e += (1.0 - r.dist.tau) * (r.y - r.dist.q2);
  }
  return e;
}

anykernel::UniverseElement random_element(std::mt19937_64& rng, int n, double extra_edge_prob) {
  std::bernoulli_distribution coin(0.5), extra(extra_edge_prob);
  std::uniform_int_distribution<int> side(0, 2);
  anykernel::UniverseElement u;
  u.i = 0;
  u.j = 1;
  for (int v = 0; v < n; ++v) {
    u.nodes.push_back(v);
    u.node_features.push_back({static_cast<double>(v % 3)});
  }
  if (coin(rng)) u.edges.emplace_back(0, 1);
  for (int v = 2; v < n; ++v) {
    const int s = side(rng);
    if (s != 1) u.edges.emplace_back(0, v);
    if (s != 0) u.edges.emplace_back(1, v);
  }
  for (int a = 2; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (extra(rng)) u.edges.emplace_back(a, b);
  return u;
}

anykernel::UniverseElement relabel(const anykernel::UniverseElement& u, std::mt19937_64& rng) {
  const int n = static_cast<int>(u.nodes.size());
  std::vector<std::int64_t> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 100);
  std::shuffle(ids.begin(), ids.end(), rng);
  anykernel::UniverseElement out;
  out.nodes = ids;
  out.node_features = u.node_features;
  auto at = [&](std::int64_t id) {
    return static_cast<std::size_t>(std::find(u.nodes.begin(), u.nodes.end(), id) - u.nodes.begin());
  };
  out.i = ids[at(u.i)];
  out.j = ids[at(u.j)];
  // Shuffle the listing order as well so local indices change.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> pos(static_cast<std::size_t>(n));
  anykernel::UniverseElement listed = out;
  for (int k = 0; k < n; ++k) {
    listed.nodes[static_cast<std::size_t>(k)] = out.nodes[static_cast<std::size_t>(order[k])];
    listed.node_features[static_cast<std::size_t>(k)] = out.node_features[static_cast<std::size_t>(order[k])];
    pos[static_cast<std::size_t>(order[k])] = k;
  }
  for (auto [a, b] : u.edges) listed.edges.emplace_back(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(b)]);
  return listed;
}

BitVector random_bits(std::mt19937_64& rng, int n) {
  std::bernoulli_distribution coin(0.5);
  BitVector b;
  for (int i = 0; i < n; ++i) b.bits.push_back(coin(rng) ? 1 : -1);
  return b;
}

}  // namespace oracle

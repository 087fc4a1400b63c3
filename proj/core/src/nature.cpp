#include "anykernel/nature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>

#include "anykernel/errors.hpp"

namespace anykernel {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

Features random_bits(RngStream& rng, int n) {
  if (n <= 0) return {};
  BitVector b;
  b.bits.resize(static_cast<std::size_t>(n));
  for (auto& v : b.bits) v = rng.uniform() < 0.5 ? -1 : 1;
  return b;
}

class IidBernoulli final : public BinarySimulator {
 public:
  IidBernoulli(double theta, std::uint64_t seed, int bits) : theta_(theta), bits_(bits), rng_(seed, "nature") {}
  Features features(std::int64_t) override { return random_bits(rng_, bits_); }
  double outcome(std::int64_t, const Features&, const PredictionDistribution&) override {
    return rng_.bernoulli(theta_) ? 1.0 : 0.0;
  }
  std::string describe() const override { return "iid-bernoulli " + format_number(theta_); }

 private:
  double theta_;
  int bits_;
  RngStream rng_;
};

class Contrarian final : public BinarySimulator {
 public:
  Contrarian(std::uint64_t seed, int bits) : bits_(bits), rng_(seed, "nature") {}
  Features features(std::int64_t) override { return random_bits(rng_, bits_); }
  double outcome(std::int64_t, const Features&, const PredictionDistribution& d) override {
    return d.mean() < 0.5 ? 1.0 : 0.0;
  }
  std::string describe() const override { return "contrarian"; }

 private:
  int bits_;
  RngStream rng_;
};

class PerformativeSigmoid final : public BinarySimulator {
 public:
  PerformativeSigmoid(double a, double b, std::uint64_t seed, int bits) : a_(a), b_(b), bits_(bits), rng_(seed, "nature") {}
  Features features(std::int64_t) override { return random_bits(rng_, bits_); }
  double outcome(std::int64_t, const Features&, const PredictionDistribution& d) override {
    return rng_.bernoulli(sigmoid(a_ + b_ * d.mean())) ? 1.0 : 0.0;
  }
  std::string describe() const override { return "performative-sigmoid " + format_number(a_) + " " + format_number(b_); }

 private:
  double a_;
  double b_;
  int bits_;
  RngStream rng_;
};

class TruncatedGaussian final : public RealSimulator {
 public:
  TruncatedGaussian(double lo, double hi, double sigma, std::uint64_t seed)
      : lo_(lo), hi_(hi), sigma_(sigma), rng_(seed, "nature") {
    // The normalizer is smallest when the mean sits at either end of its range.
    const double mu = mean(0.0);
    rho_ = 1.0 / (sigma_ * std::sqrt(2.0 * std::numbers::pi) * mass(mu));
  }
  Features features(std::int64_t) override { return DenseVector{rng_.uniform()}; }
  double outcome(std::int64_t, const Features& x, const PredictionDistribution&) override {
    const double mu = mean(x.dense().at(0));
    const double a = boost::math::cdf(unit_, (lo_ - mu) / sigma_);
    const double b = boost::math::cdf(unit_, (hi_ - mu) / sigma_);
    const double u = a + rng_.uniform() * (b - a);
    const double y = mu + sigma_ * boost::math::quantile(unit_, std::min(std::max(u, 1e-300), 1.0 - 1e-16));
    return std::min(hi_, std::max(lo_, y));
  }
  double cdf(const Features& x, double y) const override {
    if (y <= lo_) return 0.0;
    if (y >= hi_) return 1.0;
    const double mu = mean(x.dense().at(0));
    const double a = boost::math::cdf(unit_, (lo_ - mu) / sigma_);
    return (boost::math::cdf(unit_, (y - mu) / sigma_) - a) / mass(mu);
  }
  double rho() const override { return rho_; }
  double y_min() const override { return lo_; }
  double y_max() const override { return hi_; }
  std::string describe() const override {
    return "truncated-gaussian " + format_number(lo_) + " " + format_number(hi_) + " " + format_number(sigma_);
  }

 private:
  double mean(double u) const { return lo_ + (hi_ - lo_) * (0.25 + 0.5 * u); }
  double mass(double mu) const {
    return boost::math::cdf(unit_, (hi_ - mu) / sigma_) - boost::math::cdf(unit_, (lo_ - mu) / sigma_);
  }

  double lo_;
  double hi_;
  double sigma_;
  double rho_ = 0.0;
  boost::math::normal unit_;
  RngStream rng_;
};

class BetaMixture final : public RealSimulator {
 public:
  BetaMixture(double lo, double hi, BetaComponent c1, BetaComponent c2, std::uint64_t seed)
      : lo_(lo), hi_(hi), d1_(c1.a, c1.b), d2_(c2.a, c2.b), c1_(c1), c2_(c2), rng_(seed, "nature") {
    // Mixture density is at most the larger component maximum.
    rho_ = std::max(peak(d1_, c1), peak(d2_, c2)) / (hi_ - lo_);
  }
  Features features(std::int64_t) override { return DenseVector{rng_.uniform()}; }
  double outcome(std::int64_t, const Features& x, const PredictionDistribution&) override {
    const double w = x.dense().at(0);
    const bool first = rng_.uniform() < w;
    const double u = std::min(std::max(rng_.uniform(), 1e-300), 1.0 - 1e-16);
    const double v = boost::math::quantile(first ? d1_ : d2_, u);
    return std::min(hi_, std::max(lo_, lo_ + (hi_ - lo_) * v));
  }
  double cdf(const Features& x, double y) const override {
    if (y <= lo_) return 0.0;
    if (y >= hi_) return 1.0;
    const double w = x.dense().at(0);
    const double v = (y - lo_) / (hi_ - lo_);
    return w * boost::math::cdf(d1_, v) + (1.0 - w) * boost::math::cdf(d2_, v);
  }
  double rho() const override { return rho_; }
  double y_min() const override { return lo_; }
  double y_max() const override { return hi_; }
  std::string describe() const override {
    return "beta-mixture " + format_number(c1_.a) + " " + format_number(c1_.b) + " " + format_number(c2_.a) + " " +
           format_number(c2_.b);
  }

 private:
  static double peak(const boost::math::beta_distribution<>& d, BetaComponent c) {
    if (c.a == 1.0 && c.b == 1.0) return 1.0;
    if (c.a == 1.0) return boost::math::pdf(d, 0.0);
    if (c.b == 1.0) return boost::math::pdf(d, 1.0);
    return boost::math::pdf(d, (c.a - 1.0) / (c.a + c.b - 2.0));
  }

  double lo_;
  double hi_;
  boost::math::beta_distribution<> d1_;
  boost::math::beta_distribution<> d2_;
  BetaComponent c1_;
  BetaComponent c2_;
  double rho_ = 0.0;
  RngStream rng_;
};

class VectorNoise final : public VectorSimulator {
 public:
  VectorNoise(OutcomeBox box, double noise, std::uint64_t seed) : box_(std::move(box)), noise_(noise), rng_(seed, "nature") {}
  Features features(std::int64_t) override {
    DenseVector x(static_cast<std::size_t>(box_.dim()));
    for (auto& v : x) v = rng_.uniform();
    return x;
  }
  Eigen::VectorXd outcome(std::int64_t, const Features& x, const Eigen::VectorXd&) override {
    const auto& z = x.dense();
    Eigen::VectorXd y(box_.dim());
    for (int j = 0; j < box_.dim(); ++j)
      y[j] = box_.lower[j] + (box_.upper[j] - box_.lower[j]) * z[static_cast<std::size_t>(j)] + noise_ * rng_.normal();
    return box_.clamp(y);
  }
  std::string describe() const override { return "vector-noise " + format_number(noise_); }

 private:
  OutcomeBox box_;
  double noise_;
  RngStream rng_;
};

}  // namespace

std::unique_ptr<BinarySimulator> make_iid_bernoulli(double theta, std::uint64_t seed, int bits) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("theta must lie in [0,1]");
  return std::make_unique<IidBernoulli>(theta, seed, bits);
}

std::unique_ptr<BinarySimulator> make_contrarian(std::uint64_t seed, int bits) {
  return std::make_unique<Contrarian>(seed, bits);
}

std::unique_ptr<BinarySimulator> make_performative_sigmoid(double a, double b, std::uint64_t seed, int bits) {
  return std::make_unique<PerformativeSigmoid>(a, b, seed, bits);
}

LogisticNature::LogisticNature(std::vector<double> weights, double bias, std::uint64_t seed)
    : w_(std::move(weights)), bias_(bias), rng_(seed, "nature") {
  if (w_.empty()) throw DomainError("logistic nature needs at least one weight");
}

Features LogisticNature::features(std::int64_t) { return random_bits(rng_, dim()); }

double LogisticNature::outcome(std::int64_t, const Features& x, const PredictionDistribution&) {
  return rng_.bernoulli(bayes(x)) ? 1.0 : 0.0;
}

std::string LogisticNature::describe() const {
  std::string s = "logistic " + format_number(bias_);
  for (double w : w_) s += " " + format_number(w);
  return s;
}

double LogisticNature::bayes(const Features& x) const {
  const auto& b = x.bits().bits;
  if (b.size() != w_.size()) throw DomainError("logistic nature: feature length mismatch");
  double v = bias_;
  for (std::size_t i = 0; i < w_.size(); ++i) v += w_[i] * b[i];
  return sigmoid(v);
}

GraphEvolution::GraphEvolution(GraphEvolutionParams params, std::uint64_t seed, std::ostream* stream)
    : params_(params), rng_(seed, "nature") {
  if (params_.initial_nodes < 2 || params_.degree_cap < 1 || params_.communities < 1 || params_.roles < 1)
    throw DomainError("graph evolution: invalid parameters");
  if (stream) writer_ = std::make_unique<GraphStreamWriter>(*stream, static_cast<std::size_t>(params_.communities + params_.roles));
  graph_.set_time(0);
  if (writer_) writer_->time(0);
  for (int k = 0; k < params_.initial_nodes; ++k) add_node();
}

void GraphEvolution::add_node() {
  DenseVector z(static_cast<std::size_t>(params_.communities + params_.roles), 0.0);
  z[rng_.index(static_cast<std::uint64_t>(params_.communities))] = 1.0;
  z[static_cast<std::size_t>(params_.communities) + rng_.index(static_cast<std::uint64_t>(params_.roles))] = 1.0;
  const std::int64_t id = next_id_++;
  graph_.add_node(id, z);
  if (writer_) writer_->node(id, z);
  eligible_.push_back(id);
}

std::int64_t GraphEvolution::pick_eligible() { return eligible_[rng_.index(eligible_.size())]; }

Features GraphEvolution::features(std::int64_t t) {
  graph_.set_time(t);
  if (writer_) {
    writer_->time(t);
    if (pending_u_ >= 0) writer_->edge(pending_u_, pending_v_);
  }
  pending_u_ = pending_v_ = -1;
  if (rng_.bernoulli(params_.arrival)) add_node();
  while (eligible_.size() < 2) add_node();

  const std::int64_t i = pick_eligible();
  const auto cap = static_cast<std::size_t>(params_.degree_cap);
  auto usable = [&](std::int64_t j) { return j != i && !graph_.has_edge(i, j) && graph_.degree(j) < cap; };
  std::int64_t j = -1;
  if (rng_.bernoulli(params_.triadic_proposal)) {
    std::vector<std::int64_t> fof;
    for (auto a : graph_.neighbors(i))
      for (auto b : graph_.neighbors(a))
        if (usable(b)) fof.push_back(b);
    std::sort(fof.begin(), fof.end());
    fof.erase(std::unique(fof.begin(), fof.end()), fof.end());
    if (!fof.empty()) j = fof[rng_.index(fof.size())];
  }
  for (int tries = 0; j < 0 && tries < 32; ++tries) {
    const std::int64_t c = pick_eligible();
    if (usable(c)) j = c;
  }
  if (j < 0) {
    add_node();
    j = next_id_ - 1;
  }
  return graph_.element(i, j);
}

double GraphEvolution::link_probability(const UniverseElement& u) const {
  const double deg_i = static_cast<double>(u.closed_neighborhood(u.local_i).size()) - 1.0;
  const double deg_j = static_cast<double>(u.closed_neighborhood(u.local_j).size()) - 1.0;
  const double common = static_cast<double>(embeddedness(u));
  const auto c = static_cast<std::ptrdiff_t>(params_.communities);
  const auto& zi = u.features_i();
  const auto& zj = u.features_j();
  const bool same = std::max_element(zi.begin(), zi.begin() + c) - zi.begin() ==
                    std::max_element(zj.begin(), zj.begin() + c) - zj.begin();
  const double logit = params_.base + params_.attachment * (deg_i + deg_j) / (2.0 * params_.degree_cap) +
                       params_.closure * common + (same ? params_.homophily : 0.0);
  return sigmoid(logit);
}

double GraphEvolution::outcome(std::int64_t, const Features& x, const PredictionDistribution&) {
  const auto& u = x.element();
  const double y = rng_.bernoulli(link_probability(u)) ? 1.0 : 0.0;
  if (y == 1.0) {
    graph_.add_edge(u.i, u.j);
    pending_u_ = u.i;
    pending_v_ = u.j;
    const auto cap = static_cast<std::size_t>(params_.degree_cap);
    std::erase_if(eligible_, [&](std::int64_t v) { return graph_.degree(v) >= cap; });
  }
  return y;
}

void GraphEvolution::finish() {
  if (writer_ && pending_u_ >= 0) {
    writer_->time(graph_.time() + 1);
    writer_->edge(pending_u_, pending_v_);
  }
  pending_u_ = pending_v_ = -1;
}

std::string GraphEvolution::describe() const {
  const auto& p = params_;
  return "graph-evolution " + std::to_string(p.initial_nodes) + " " + format_number(p.arrival) + " " +
         std::to_string(p.degree_cap) + " " + format_number(p.base) + " " + format_number(p.attachment) + " " +
         format_number(p.closure) + " " + format_number(p.homophily);
}

GroupFamily GraphEvolution::groups() const {
  std::vector<std::size_t> idx;
  for (int k = 0; k < params_.communities + params_.roles; ++k) idx.push_back(static_cast<std::size_t>(k));
  return GroupFamily::from_feature_indices(idx, 2);
}

std::unique_ptr<RealSimulator> make_truncated_gaussian(double y_min, double y_max, double sigma, std::uint64_t seed) {
  if (!(y_min < y_max) || !(sigma > 0.0)) throw DomainError("truncated gaussian: invalid parameters");
  return std::make_unique<TruncatedGaussian>(y_min, y_max, sigma, seed);
}

std::unique_ptr<RealSimulator> make_beta_mixture(double y_min, double y_max, BetaComponent first, BetaComponent second,
                                                 std::uint64_t seed) {
  if (!(y_min < y_max)) throw DomainError("beta mixture: empty range");
  for (const auto& c : {first, second})
    if (!(c.a >= 1.0 && c.b >= 1.0)) throw DomainError("beta mixture components need a, b >= 1");
  return std::make_unique<BetaMixture>(y_min, y_max, first, second, seed);
}

std::unique_ptr<VectorSimulator> make_vector_noise(OutcomeBox box, double noise, std::uint64_t seed) {
  box.validate();
  if (!(noise >= 0.0)) throw DomainError("noise must be >= 0");
  return std::make_unique<VectorNoise>(std::move(box), noise, seed);
}

}  // namespace anykernel

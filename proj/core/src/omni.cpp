#include "anykernel/omni.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "anykernel/errors.hpp"

namespace anykernel {

namespace {

double objective(const Loss& loss, const Features& x, double p, double yhat) {
  return p * loss(x, yhat, 1.0) + (1.0 - p) * loss(x, yhat, 0.0);
}

double ternary_argmin(const Loss& loss, const Features& x, double p) {
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-9) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (objective(loss, x, p, m1) <= objective(loss, x, p, m2))
      hi = m2;
    else
      lo = m1;
  }
  double best = lo + (hi - lo) / 2.0;
  double best_v = objective(loss, x, p, best);
  for (double e : {0.0, 1.0}) {
    const double v = objective(loss, x, p, e);
    if (v < best_v || (v == best_v && e < best)) {
      best = e;
      best_v = v;
    }
  }
  return best;
}

// sum_i sobolev(u_i(x), u_i(x')) with u_i the affine image of h_i(x) in [0,1].
class HypothesisImpl final : public KernelImpl {
 public:
  explicit HypothesisImpl(std::vector<Comparator> members) : members_(std::move(members)) {}

  double evaluate(const Point& a, const Point& b) const override {
    double s = 0.0;
    for (const auto& h : members_) s += sobolev_unit(unit(h, a.x), unit(h, b.x));
    return s;
  }
  bool continuous_in_p() const override { return true; }
  std::optional<double> diag_bound() const override {
    return static_cast<double>(members_.size()) / std::tanh(1.0);
  }
  Dependence dependence() const override { return Dependence::kFeatures; }
  std::string describe() const override {
    std::string s = "(hypotheses";
    for (const auto& h : members_) s += " " + h.name;
    return s + ")";
  }
  double cost_hint() const override { return static_cast<double>(members_.size()); }

 private:
  static double unit(const Comparator& h, const Features& x) {
    const double v = (h(x) - h.lo) / (h.hi - h.lo);
    return std::min(1.0, std::max(0.0, v));
  }

  std::vector<Comparator> members_;
};

void require_tags(const std::vector<Loss>& losses) {
  for (const auto& l : losses)
    if (!l.tags.any()) throw ConfigError("loss '" + l.name + "' has no class tag");
}

}  // namespace

double Loss::operator()(const Features& x, double yhat, double y) const {
  if (!(yhat >= 0.0 && yhat <= 1.0)) throw DomainError("loss evaluated outside [0,1]");
  return std::min(1.0, std::max(-1.0, fn(x, yhat, y)));
}

double Loss::derivative(const Features& x, double yhat) const { return (*this)(x, yhat, 1.0) - (*this)(x, yhat, 0.0); }

Loss squared_loss() {
  Loss l;
  l.name = "squared";
  l.fn = [](const Features&, double yhat, double y) { return (yhat - y) * (yhat - y); };
  l.strategy = PostProcess::kIdentity;
  l.tags.proper_scoring = true;
  return l;
}

Loss absolute_loss() {
  Loss l;
  l.name = "absolute";
  l.fn = [](const Features&, double yhat, double y) { return std::fabs(yhat - y); };
  l.strategy = PostProcess::kClosedForm;
  l.closed_form = [](const Features&, double p) { return p > 0.5 ? 1.0 : 0.0; };
  l.tags.finite_set_member = true;
  return l;
}

Loss logistic_truncated_loss(double delta) {
  if (!(delta > 0.0 && delta < 0.5)) throw DomainError("delta must lie in (0, 1/2)");
  const double scale = std::log(1.0 / delta);
  Loss l;
  l.name = "logistic-truncated";
  l.fn = [delta, scale](const Features&, double yhat, double y) {
    const double c = std::min(1.0 - delta, std::max(delta, yhat));
    return -(y * std::log(c) + (1.0 - y) * std::log(1.0 - c)) / scale;
  };
  l.strategy = PostProcess::kClosedForm;
  // The argmin set is [0, delta] below delta and [1 - delta, 1] above 1 - delta; take its smallest point.
  l.closed_form = [delta](const Features&, double p) {
    if (p <= delta) return 0.0;
    return std::min(p, 1.0 - delta);
  };
  l.tags.finite_set_member = true;
  return l;
}

Loss named_loss(const std::string& name) {
  if (name == "squared") return squared_loss();
  if (name == "absolute") return absolute_loss();
  if (name == "logistic-truncated") return logistic_truncated_loss();
  throw ConfigError("unknown loss '" + name + "'");
}

double grid_argmin(const Loss& loss, const Features& x, double p, int m) {
  if (m < 2) throw DomainError("grid needs at least two points");
  double best = 0.0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const double yhat = static_cast<double>(i) / (m - 1);
    const double v = objective(loss, x, p, yhat);
    if (v < best_v) {
      best_v = v;
      best = yhat;
    }
  }
  return best;
}

double post_process(const Loss& loss, const Features& x, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("prediction outside [0,1]");
  switch (loss.strategy) {
    case PostProcess::kIdentity:
      return p;
    case PostProcess::kClosedForm:
      if (!loss.closed_form) throw ConfigError("loss '" + loss.name + "' has no closed form");
      return loss.closed_form(x, p);
    case PostProcess::kConvexTernary:
      return ternary_argmin(loss, x, p);
    case PostProcess::kGrid:
      break;
  }
  return grid_argmin(loss, x, p, 1001);
}

double Comparator::operator()(const Features& x) const {
  const double v = fn(x);
  if (!(v >= lo && v <= hi)) throw DomainError("comparator '" + name + "' left its declared range");
  return v;
}

std::string feature_key(const Features& x) {
  if (x.empty()) return "";
  if (x.is_bits()) {
    std::string s;
    for (auto b : x.bits().bits) s += b > 0 ? '+' : '-';
    return s;
  }
  if (x.is_dense()) {
    std::string s;
    for (double v : x.dense()) {
      if (!s.empty()) s += ';';
      s += format_number(v);
    }
    return s;
  }
  throw DomainError("feature_key: graph elements have no tabulated key");
}

Comparator tabulated_comparator(std::string name, std::vector<std::pair<std::string, double>> table, double lo,
                                double hi) {
  auto map = std::make_shared<std::unordered_map<std::string, double>>();
  for (auto& [k, v] : table) {
    if (!(v >= lo && v <= hi)) throw DomainError("tabulated value outside the declared range");
    if (!map->emplace(k, v).second) throw DomainError("duplicate tabulated key '" + k + "'");
  }
  Comparator c;
  c.name = name;
  c.lo = lo;
  c.hi = hi;
  c.fn = [map, name](const Features& x) {
    auto it = map->find(feature_key(x));
    if (it == map->end()) throw DomainError("comparator '" + name + "' has no entry for " + feature_key(x));
    return it->second;
  };
  return c;
}

std::vector<Comparator> read_tabulated_comparators(std::istream& in) {
  std::string line;
  std::int64_t n = 0;
  if (!std::getline(in, line)) throw FormatError(1, "empty comparator table");
  ++n;
  if (line != "name,x_ref,value") throw FormatError(1, "expected header name,x_ref,value");
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<std::string, double>>> rows;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto a = line.find(',');
    const auto b = a == std::string::npos ? a : line.find(',', a + 1);
    if (b == std::string::npos || line.find(',', b + 1) != std::string::npos)
      throw FormatError(n, "expected three fields");
    const std::string name = line.substr(0, a);
    const std::string key = line.substr(a + 1, b - a - 1);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(line.substr(b + 1), &used);
      if (used != line.size() - b - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError(n, "bad value");
    }
    if (name.empty()) throw FormatError(n, "empty comparator name");
    if (!rows.count(name)) order.push_back(name);
    rows[name].emplace_back(key, v);
  }
  std::vector<Comparator> out;
  for (const auto& name : order) out.push_back(tabulated_comparator(name, rows[name]));
  return out;
}

BoundedKernel kdoi_kernel(const std::vector<Loss>& losses) {
  require_tags(losses);
  std::vector<Kernel> parts;
  double bound = 0.0;
  bool proper = false;
  std::optional<double> gamma;
  std::vector<FiniteFamily::Function> family;
  bool reads_x = false;
  std::string names;
  for (const auto& l : losses) {
    if (l.tags.proper_scoring) proper = true;
    if (l.tags.strongly_convex) {
      if (!(*l.tags.strongly_convex > 0.0)) throw ConfigError("strong convexity needs gamma > 0");
      gamma = gamma ? std::min(*gamma, *l.tags.strongly_convex) : *l.tags.strongly_convex;
    }
    if (l.tags.finite_set_member) {
      family.push_back([l](const Point& z) { return l.derivative(z.x, post_process(l, z.x, z.p)); });
      reads_x = reads_x || l.reads_features;
      names += (names.empty() ? "" : ",") + l.name;
    }
  }
  if (proper) {
    parts.push_back(sobolev_unit_kernel());
    bound += std::sqrt(3.0);
  }
  if (gamma) {
    parts.push_back(sobolev_unit_kernel());
    bound += 2.0 * std::sqrt(3.0) * (3.0 + 2.0 / *gamma);
  }
  if (!family.empty()) {
    const double m = static_cast<double>(family.size());
    FamilyTraits traits;
    traits.name = "decisions:" + names;
    traits.continuous_in_p = false;
    traits.dependence = reads_x ? Dependence::kJoint : Dependence::kPrediction;
    parts.push_back(finite_family_kernel(std::move(family), m, traits));
    bound += m;
  }
  return {sum_kernel(std::move(parts)), bound};
}

BoundedKernel khoi_kernel(const std::vector<Loss>& losses, const ComparatorSet& comparators) {
  require_tags(losses);
  std::vector<Kernel> parts;
  double bound = 0.0;
  if (comparators.trees) {
    const auto& tc = *comparators.trees;
    if (tc.depth < 0 || tc.arity < 1) throw ConfigError("tree class needs depth >= 0 and arity >= 1");
    parts.push_back(polynomial_kernel(tc.depth));
    bound += std::pow(tc.arity + 1.0, tc.depth / 2.0) * std::pow(2.0, tc.depth);
  }
  if (!comparators.members.empty()) {
    for (const auto& h : comparators.members)
      if (!(h.lo < h.hi)) throw ConfigError("comparator '" + h.name + "' has an empty range");
    parts.push_back(Kernel(std::make_shared<HypothesisImpl>(comparators.members)));
    bound += 2.0 * std::sqrt(static_cast<double>(comparators.members.size()));
  }
  return {sum_kernel(std::move(parts)), bound};
}

BoundedKernel separable_wrap(const BoundedKernel& feature_weight, const BoundedKernel& base) {
  if ((static_cast<int>(feature_weight.kernel.dependence()) & static_cast<int>(Dependence::kPrediction)) != 0)
    throw ConfigError("feature weight kernel must ignore predictions");
  return {product_kernel({feature_weight.kernel, base.kernel}), feature_weight.bound * base.bound};
}

Kernel online_regression_kernel(Kernel features_kernel) {
  return sum_kernel({std::move(features_kernel), linear_prediction_kernel()});
}

RegretReport omni_regret(const std::vector<Round>& rounds, const Loss& loss, const std::vector<Comparator>& comparators) {
  if (comparators.empty()) throw ConfigError("comparator set is empty");
  RegretReport r;
  for (const auto& rd : rounds)
    r.algorithm_loss += rd.dist.expect([&](double p) { return loss(rd.x, post_process(loss, rd.x, p), rd.y); });
  r.best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < comparators.size(); ++i) {
    double s = 0.0;
    for (const auto& rd : rounds) s += loss(rd.x, comparators[i](rd.x), rd.y);
    if (s < r.best_loss) {
      r.best_loss = s;
      r.best_index = i;
    }
  }
  r.regret = r.algorithm_loss - r.best_loss;
  return r;
}

double decision_oi_error(const std::vector<Round>& rounds, const Loss& loss) {
  double s = 0.0;
  for (const auto& rd : rounds)
    s += rd.dist.expect([&](double p) { return (rd.y - p) * loss.derivative(rd.x, post_process(loss, rd.x, p)); });
  return s;
}

double hypothesis_oi_error(const std::vector<Round>& rounds, const Loss& loss, const Comparator& h) {
  double s = 0.0;
  for (const auto& rd : rounds) s += (rd.y - rd.dist.mean()) * loss.derivative(rd.x, h(rd.x));
  return s;
}

}  // namespace anykernel

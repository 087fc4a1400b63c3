#include "anykernel/graph_kernels.hpp"

#include <algorithm>
#include <bit>

#include "anykernel/errors.hpp"

namespace anykernel {

namespace {

class NamedImpl final : public KernelImpl {
 public:
  NamedImpl(Kernel inner, std::string description)
      : inner_(std::move(inner)), description_(std::move(description)) {}
  double evaluate(const Point& a, const Point& b) const override { return inner_(a, b); }
  bool continuous_in_p() const override { return inner_.continuous_in_p(); }
  std::optional<double> diag_bound() const override { return inner_.diag_bound(); }
  Dependence dependence() const override { return inner_.dependence(); }
  std::string describe() const override { return description_; }
  double cost_hint() const override { return inner_.cost_hint(); }
  void expand(double coef, std::vector<KernelTerm>& out,
              const std::shared_ptr<const KernelImpl>&) const override {
    inner_.impl().expand(coef, out, inner_.impl_ptr());
  }
  const FiniteFamily* family() const override { return inner_.impl().family(); }

 private:
  Kernel inner_;
  std::string description_;
};

class GroupPairCountImpl final : public KernelImpl {
 public:
  explicit GroupPairCountImpl(GroupFamily groups) : groups_(std::move(groups)) {}
  double evaluate(const Point& a, const Point& b) const override {
    const auto& u = a.x.element();
    const auto& v = b.x.element();
    const auto ci = std::popcount(groups_.membership(u.features_i()) & groups_.membership(v.features_i()));
    if (ci == 0) return 0.0;
    const auto cj = std::popcount(groups_.membership(u.features_j()) & groups_.membership(v.features_j()));
    return static_cast<double>(ci * cj);
  }
  bool continuous_in_p() const override { return true; }
  std::optional<double> diag_bound() const override {
    return static_cast<double>(groups_.m()) * groups_.m();
  }
  Dependence dependence() const override { return Dependence::kFeatures; }
  std::string describe() const override { return "(intersection)"; }

 private:
  GroupFamily groups_;
};

class EmbeddednessEqualImpl final : public KernelImpl {
 public:
  double evaluate(const Point& a, const Point& b) const override {
    return embeddedness(a.x.element()) == embeddedness(b.x.element()) ? 1.0 : 0.0;
  }
  bool continuous_in_p() const override { return true; }
  std::optional<double> diag_bound() const override { return 1.0; }
  Dependence dependence() const override { return Dependence::kFeatures; }
  std::string describe() const override { return "(em-equal)"; }
};

class IsomorphicImpl final : public KernelImpl {
 public:
  explicit IsomorphicImpl(int max_nodes) : max_nodes_(max_nodes) {}
  double evaluate(const Point& a, const Point& b) const override {
    const auto& u = a.x.element();
    const auto& v = b.x.element();
    check(u);
    check(v);
    if (u.size() != v.size() || u.edges.size() != v.edges.size()) return 0.0;
    return u.canonical_form() == v.canonical_form() ? 1.0 : 0.0;
  }
  bool continuous_in_p() const override { return true; }
  std::optional<double> diag_bound() const override { return 1.0; }
  Dependence dependence() const override { return Dependence::kFeatures; }
  std::string describe() const override { return "(iso-equal " + std::to_string(max_nodes_) + ")"; }
  double cost_hint() const override { return 100.0; }

 private:
  void check(const UniverseElement& u) const {
    if (static_cast<int>(u.size()) > max_nodes_)
      throw SizeError("induced subgraph has " + std::to_string(u.size()) + " nodes, max_nodes is " +
                      std::to_string(max_nodes_));
  }
  int max_nodes_;
};

class RConvolutionImpl final : public KernelImpl {
 public:
  RConvolutionImpl(Kernel node, int cap) : node_(std::move(node)), cap_(cap) {}
  double evaluate(const Point& a, const Point& b) const override {
    const auto& u = a.x.element();
    const auto& v = b.x.element();
    if (static_cast<int>(u.size()) > cap_ || static_cast<int>(v.size()) > cap_)
      throw SizeError("neighborhood union exceeds the r-convolution size cap");
    return r_convolution(u.node_features, v.node_features, node_);
  }
  bool continuous_in_p() const override { return true; }
  std::optional<double> diag_bound() const override {
    auto b = node_.diag_bound();
    if (!b) return std::nullopt;
    return static_cast<double>(cap_) * cap_ * *b;
  }
  Dependence dependence() const override { return Dependence::kFeatures; }
  std::string describe() const override { return "(rconv " + std::to_string(cap_) + " " + node_.describe() + ")"; }
  double cost_hint() const override { return cap_ * cap_ * node_.cost_hint(); }

 private:
  Kernel node_;
  int cap_;
};

}  // namespace

Kernel named_kernel(Kernel inner, std::string description) {
  return Kernel(std::make_shared<NamedImpl>(std::move(inner), std::move(description)));
}

Kernel group_pair_count_kernel(GroupFamily groups) {
  return Kernel(std::make_shared<GroupPairCountImpl>(std::move(groups)));
}

Kernel pair_groups_kernel(GroupFamily groups, int n_bins) {
  return named_kernel(product_kernel({grid_bin_kernel(n_bins), group_pair_count_kernel(std::move(groups))}),
                      "(pair-groups " + std::to_string(n_bins) + ")");
}

Kernel embeddedness_kernel(int n_bins) {
  return named_kernel(product_kernel({grid_bin_kernel(n_bins), Kernel(std::make_shared<EmbeddednessEqualImpl>())}),
                      "(embeddedness " + std::to_string(n_bins) + ")");
}

Kernel isomorphism_kernel(int n_bins, int max_nodes) {
  if (max_nodes < 2) throw DomainError("max_nodes must be at least 2");
  return named_kernel(
      product_kernel({grid_bin_kernel(n_bins), Kernel(std::make_shared<IsomorphicImpl>(max_nodes))}),
      "(isomorphism " + std::to_string(n_bins) + " " + std::to_string(max_nodes) + ")");
}

Kernel r_convolution_kernel(Kernel node_kernel, int size_cap) {
  if (size_cap < 1) throw DomainError("size cap must be positive");
  return Kernel(std::make_shared<RConvolutionImpl>(std::move(node_kernel), size_cap));
}

double r_convolution(const std::vector<DenseVector>& a, const std::vector<DenseVector>& b,
                     const Kernel& node_kernel) {
  std::vector<double> terms;
  terms.reserve(a.size() * b.size());
  for (const auto& za : a) {
    const Point pa{Features(za), 0.0};
    for (const auto& zb : b) terms.push_back(node_kernel(pa, Point{Features(zb), 0.0}));
  }
  // Summing in sorted order makes k(u, u') and k(u', u) bit-identical.
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double v : terms) s += v;
  return s;
}

}  // namespace anykernel

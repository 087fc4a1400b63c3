#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "anykernel/point.hpp"

namespace anykernel {

struct CanonicalCache {
  std::once_flag once;
  std::string form;
};

// A pair (i, j) together with the part of the graph snapshot that radius-1 distinguishers can
// see: the induced subgraph on the closed neighborhoods Gamma(i) u Gamma(j).
struct UniverseElement {
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t time = 0;
  std::vector<std::int64_t> nodes;          // sorted ids
  std::vector<DenseVector> node_features;   // parallel to nodes
  std::vector<std::pair<int, int>> edges;   // local indices, first < second, sorted
  int local_i = 0;
  int local_j = 0;

  const DenseVector& features_i() const { return node_features[static_cast<std::size_t>(local_i)]; }
  const DenseVector& features_j() const { return node_features[static_cast<std::size_t>(local_j)]; }
  std::size_t size() const { return nodes.size(); }

  // Closed neighborhood of a local index, as sorted local indices.
  std::vector<int> closed_neighborhood(int local) const;

  // Canonical form of the structure with i and j marked; computed once and cached.
  const std::string& canonical_form() const;

  std::shared_ptr<CanonicalCache> cache = std::make_shared<CanonicalCache>();
};

// Validates and freezes a hand-built element (sorts nodes, checks invariants).
std::shared_ptr<const UniverseElement> make_element(UniverseElement u);

// |Gamma(i) n Gamma(j)| with closed neighborhoods: adjacent i, j count themselves.
int embeddedness(const UniverseElement& u);

// Canonical form of a small vertex-colored graph, via permutations inside (color, degree) classes.
std::string canonical_form(int n, const std::vector<int>& colors,
                           const std::vector<std::pair<int, int>>& edges);

class EvolvingGraph {
 public:
  std::int64_t time() const { return time_; }
  void set_time(std::int64_t t) { time_ = t; }

  void add_node(std::int64_t id, DenseVector z);
  void set_features(std::int64_t id, DenseVector z);
  // Returns false if the edge already existed.
  bool add_edge(std::int64_t u, std::int64_t v);

  bool has_node(std::int64_t id) const { return nodes_.count(id) != 0; }
  bool has_edge(std::int64_t u, std::int64_t v) const;
  const DenseVector& features(std::int64_t id) const;
  const std::set<std::int64_t>& neighbors(std::int64_t id) const;
  std::vector<std::int64_t> closed_neighborhood(std::int64_t id) const;
  std::size_t degree(std::int64_t id) const { return neighbors(id).size(); }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  std::size_t feature_dim() const { return dim_; }
  std::vector<std::int64_t> node_ids() const;
  std::vector<std::pair<std::int64_t, std::int64_t>> edges() const;

  std::shared_ptr<const UniverseElement> element(std::int64_t i, std::int64_t j) const;

 private:
  struct Node {
    DenseVector z;
    std::set<std::int64_t> nbrs;
  };
  const Node& node(std::int64_t id) const;

  std::int64_t time_ = 0;
  std::size_t dim_ = 0;
  std::size_t edge_count_ = 0;
  std::map<std::int64_t, Node> nodes_;
};

// Line-based event stream:
//   anykernel-graph 1
//   dim <k>
//   t <time>
//   n <id> <z_1> ... <z_k>
//   e <u> <v>
// A snapshot at time t is the replay of every event up to the last "t" line <= t.
class GraphStreamWriter {
 public:
  GraphStreamWriter(std::ostream& out, std::size_t dim);
  void time(std::int64_t t);
  void node(std::int64_t id, const DenseVector& z);
  void edge(std::int64_t u, std::int64_t v);

 private:
  std::ostream& out_;
  std::size_t dim_;
};

void write_snapshot(std::ostream& out, const EvolvingGraph& g);
EvolvingGraph read_graph(std::istream& in, std::optional<std::int64_t> until = std::nullopt);

class GroupFamily {
 public:
  using Indicator = std::function<bool(const DenseVector&)>;

  GroupFamily() = default;
  GroupFamily(std::vector<std::string> names, std::vector<Indicator> groups, int m);
  // Group g contains z iff z[indices[g]] > 0.5.
  static GroupFamily from_feature_indices(const std::vector<std::size_t>& indices, int m);

  std::size_t size() const { return groups_.size(); }
  int m() const { return m_; }
  const std::string& name(std::size_t g) const { return names_[g]; }
  bool contains(std::size_t g, const DenseVector& z) const { return groups_[g](z); }
  // Bit g set iff group g contains z. Throws DomainError if more than m groups match.
  std::uint64_t membership(const DenseVector& z) const;
  const std::vector<std::size_t>& feature_indices() const { return indices_; }

 private:
  std::vector<std::string> names_;
  std::vector<Indicator> groups_;
  std::vector<std::size_t> indices_;
  int m_ = 0;
};

}  // namespace anykernel

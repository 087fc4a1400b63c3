#include "anykernel/graph.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>

#include "anykernel/errors.hpp"
#include "anykernel/kernel.hpp"

namespace anykernel {

std::vector<int> UniverseElement::closed_neighborhood(int local) const {
  std::vector<int> out{local};
  for (const auto& [a, b] : edges) {
    if (a == local) out.push_back(b);
    if (b == local) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

const std::string& UniverseElement::canonical_form() const {
  std::call_once(cache->once, [this] {
    std::vector<int> colors(nodes.size(), 2);
    colors[static_cast<std::size_t>(local_i)] = 0;
    colors[static_cast<std::size_t>(local_j)] = 1;
    cache->form = anykernel::canonical_form(static_cast<int>(nodes.size()), colors, edges);
  });
  return cache->form;
}

std::shared_ptr<const UniverseElement> make_element(UniverseElement u) {
  if (u.i == u.j) throw DomainError("universe element needs i != j");
  if (u.nodes.size() != u.node_features.size()) throw DomainError("node feature count mismatch");
  // Sort nodes by id, remapping local indices.
  std::vector<std::size_t> order(u.nodes.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u.nodes[a] < u.nodes[b]; });
  std::vector<int> remap(order.size());
  UniverseElement out;
  out.i = u.i;
  out.j = u.j;
  out.time = u.time;
  for (std::size_t k = 0; k < order.size(); ++k) {
    remap[order[k]] = static_cast<int>(k);
    out.nodes.push_back(u.nodes[order[k]]);
    out.node_features.push_back(u.node_features[order[k]]);
  }
  for (std::size_t k = 1; k < out.nodes.size(); ++k)
    if (out.nodes[k] == out.nodes[k - 1]) throw DomainError("duplicate node id in element");
  auto find = [&](std::int64_t id) {
    auto it = std::lower_bound(out.nodes.begin(), out.nodes.end(), id);
    if (it == out.nodes.end() || *it != id) throw DomainError("pair node missing from element");
    return static_cast<int>(it - out.nodes.begin());
  };
  out.local_i = find(u.i);
  out.local_j = find(u.j);
  const int n = static_cast<int>(out.nodes.size());
  for (auto [a, b] : u.edges) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw DomainError("bad edge in element");
    int x = remap[static_cast<std::size_t>(a)];
    int y = remap[static_cast<std::size_t>(b)];
    out.edges.emplace_back(std::min(x, y), std::max(x, y));
  }
  std::sort(out.edges.begin(), out.edges.end());
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
  // Every node must sit in Gamma(i) or Gamma(j).
  const auto gi = out.closed_neighborhood(out.local_i);
  const auto gj = out.closed_neighborhood(out.local_j);
  for (int k = 0; k < n; ++k) {
    if (!std::binary_search(gi.begin(), gi.end(), k) && !std::binary_search(gj.begin(), gj.end(), k))
      throw DomainError("element node outside the closed neighborhoods of the pair");
  }
  return std::make_shared<const UniverseElement>(std::move(out));
}

int embeddedness(const UniverseElement& u) {
  const auto gi = u.closed_neighborhood(u.local_i);
  const auto gj = u.closed_neighborhood(u.local_j);
  std::vector<int> common;
  std::set_intersection(gi.begin(), gi.end(), gj.begin(), gj.end(), std::back_inserter(common));
  return static_cast<int>(common.size());
}

namespace {

struct CanonicalSearch {
  int n;
  std::vector<std::vector<char>> adj;
  std::vector<std::vector<int>> classes;
  std::vector<int> order;
  std::string best;
  std::string scratch;

  void leaf() {
    scratch.clear();
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) scratch.push_back(adj[order[a]][order[b]] ? '1' : '0');
    if (best.empty() || scratch < best) best = scratch;
  }

  void recurse(std::size_t c) {
    if (c == classes.size()) {
      leaf();
      return;
    }
    auto members = classes[c];
    std::sort(members.begin(), members.end());
    const std::size_t base = order.size();
    do {
      order.resize(base);
      order.insert(order.end(), members.begin(), members.end());
      recurse(c + 1);
    } while (std::next_permutation(members.begin(), members.end()));
    order.resize(base);
  }
};

}  // namespace

std::string canonical_form(int n, const std::vector<int>& colors,
                           const std::vector<std::pair<int, int>>& edges) {
  if (static_cast<int>(colors.size()) != n) throw DomainError("color count mismatch");
  CanonicalSearch s;
  s.n = n;
  s.adj.assign(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw DomainError("bad edge");
    if (s.adj[a][b]) continue;
    s.adj[a][b] = s.adj[b][a] = 1;
    ++degree[a];
    ++degree[b];
  }
  std::map<std::pair<int, int>, std::vector<int>> by_key;
  for (int v = 0; v < n; ++v) by_key[{colors[v], degree[v]}].push_back(v);
  std::ostringstream head;
  head << n << ':';
  for (const auto& [key, members] : by_key) {
    head << key.first << '/' << key.second << 'x' << members.size() << ';';
    s.classes.push_back(members);
  }
  s.recurse(0);
  return head.str() + "|" + s.best;
}

void EvolvingGraph::add_node(std::int64_t id, DenseVector z) {
  if (has_node(id)) throw DomainError("node " + std::to_string(id) + " already present");
  if (nodes_.empty()) {
    dim_ = z.size();
  } else if (z.size() != dim_) {
    throw DomainError("node feature dimension mismatch");
  }
  nodes_.emplace(id, Node{std::move(z), {}});
}

void EvolvingGraph::set_features(std::int64_t id, DenseVector z) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw DomainError("missing node " + std::to_string(id));
  if (z.size() != dim_) throw DomainError("node feature dimension mismatch");
  it->second.z = std::move(z);
}

bool EvolvingGraph::add_edge(std::int64_t u, std::int64_t v) {
  if (u == v) throw DomainError("self loops are not allowed");
  auto a = nodes_.find(u);
  auto b = nodes_.find(v);
  if (a == nodes_.end() || b == nodes_.end()) throw DomainError("edge endpoint missing");
  if (!a->second.nbrs.insert(v).second) return false;
  b->second.nbrs.insert(u);
  ++edge_count_;
  return true;
}

bool EvolvingGraph::has_edge(std::int64_t u, std::int64_t v) const {
  auto it = nodes_.find(u);
  return it != nodes_.end() && it->second.nbrs.count(v) != 0;
}

const EvolvingGraph::Node& EvolvingGraph::node(std::int64_t id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw DomainError("missing node " + std::to_string(id));
  return it->second;
}

const DenseVector& EvolvingGraph::features(std::int64_t id) const { return node(id).z; }

const std::set<std::int64_t>& EvolvingGraph::neighbors(std::int64_t id) const { return node(id).nbrs; }

std::vector<std::int64_t> EvolvingGraph::closed_neighborhood(std::int64_t id) const {
  const auto& nb = neighbors(id);
  std::vector<std::int64_t> out(nb.begin(), nb.end());
  out.insert(std::upper_bound(out.begin(), out.end(), id), id);
  return out;
}

std::vector<std::int64_t> EvolvingGraph::node_ids() const {
  std::vector<std::int64_t> out;
  out.reserve(nodes_.size());
  for (const auto& [id, _] : nodes_) out.push_back(id);
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> EvolvingGraph::edges() const {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto& [id, nd] : nodes_)
    for (auto v : nd.nbrs)
      if (id < v) out.emplace_back(id, v);
  return out;
}

std::shared_ptr<const UniverseElement> EvolvingGraph::element(std::int64_t i, std::int64_t j) const {
  if (i == j) throw DomainError("universe element needs i != j");
  const auto gi = closed_neighborhood(i);
  const auto gj = closed_neighborhood(j);
  UniverseElement u;
  u.i = i;
  u.j = j;
  u.time = time_;
  std::set_union(gi.begin(), gi.end(), gj.begin(), gj.end(), std::back_inserter(u.nodes));
  for (auto id : u.nodes) u.node_features.push_back(features(id));
  auto local = [&](std::int64_t id) {
    return static_cast<int>(std::lower_bound(u.nodes.begin(), u.nodes.end(), id) - u.nodes.begin());
  };
  u.local_i = local(i);
  u.local_j = local(j);
  for (std::size_t a = 0; a < u.nodes.size(); ++a) {
    for (auto v : neighbors(u.nodes[a])) {
      if (v <= u.nodes[a]) continue;
      if (std::binary_search(u.nodes.begin(), u.nodes.end(), v))
        u.edges.emplace_back(static_cast<int>(a), local(v));
    }
  }
  std::sort(u.edges.begin(), u.edges.end());
  return std::make_shared<const UniverseElement>(std::move(u));
}

GraphStreamWriter::GraphStreamWriter(std::ostream& out, std::size_t dim) : out_(out), dim_(dim) {
  out_ << "anykernel-graph 1\n" << "dim " << dim_ << "\n";
}

void GraphStreamWriter::time(std::int64_t t) { out_ << "t " << t << "\n"; }

void GraphStreamWriter::node(std::int64_t id, const DenseVector& z) {
  if (z.size() != dim_) throw DomainError("node feature dimension mismatch");
  out_ << "n " << id;
  for (double v : z) out_ << ' ' << format_number(v);
  out_ << "\n";
}

void GraphStreamWriter::edge(std::int64_t u, std::int64_t v) { out_ << "e " << u << ' ' << v << "\n"; }

void write_snapshot(std::ostream& out, const EvolvingGraph& g) {
  GraphStreamWriter w(out, g.feature_dim());
  w.time(g.time());
  for (auto id : g.node_ids()) w.node(id, g.features(id));
  for (auto [u, v] : g.edges()) w.edge(u, v);
}

EvolvingGraph read_graph(std::istream& in, std::optional<std::int64_t> until) {
  EvolvingGraph g;
  std::string line;
  std::int64_t lineno = 0;
  std::size_t dim = 0;
  bool header = false;
  bool have_dim = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (!header) {
      int version = 0;
      if (tag != "anykernel-graph" || !(ls >> version) || version != 1)
        throw FormatError(lineno, "expected 'anykernel-graph 1' header");
      header = true;
      continue;
    }
    if (tag == "dim") {
      if (!(ls >> dim)) throw FormatError(lineno, "bad dim line");
      have_dim = true;
      continue;
    }
    if (!have_dim) throw FormatError(lineno, "dim line must precede events");
    try {
      if (tag == "t") {
        std::int64_t t = 0;
        if (!(ls >> t)) throw FormatError(lineno, "bad time line");
        if (until && t > *until) break;
        g.set_time(t);
      } else if (tag == "n") {
        std::int64_t id = 0;
        if (!(ls >> id)) throw FormatError(lineno, "bad node line");
        DenseVector z(dim);
        for (auto& v : z) {
          std::string tok;
          if (!(ls >> tok)) throw FormatError(lineno, "node line has too few features");
          v = std::stod(tok);
        }
        g.add_node(id, std::move(z));
      } else if (tag == "e") {
        std::int64_t u = 0;
        std::int64_t v = 0;
        if (!(ls >> u >> v)) throw FormatError(lineno, "bad edge line");
        g.add_edge(u, v);
      } else {
        throw FormatError(lineno, "unknown record '" + tag + "'");
      }
    } catch (const DomainError& e) {
      throw FormatError(lineno, e.what());
    } catch (const std::logic_error& e) {
      throw FormatError(lineno, std::string("bad number: ") + e.what());
    }
  }
  if (!header) throw FormatError(lineno, "empty graph stream");
  return g;
}

GroupFamily::GroupFamily(std::vector<std::string> names, std::vector<Indicator> groups, int m)
    : names_(std::move(names)), groups_(std::move(groups)), m_(m) {
  if (names_.size() != groups_.size()) throw DomainError("group names and indicators differ in count");
  if (groups_.size() > 64) throw DomainError("at most 64 groups are supported");
  if (m_ < 1) throw DomainError("group family needs m >= 1");
}

GroupFamily GroupFamily::from_feature_indices(const std::vector<std::size_t>& indices, int m) {
  std::vector<std::string> names;
  std::vector<Indicator> groups;
  for (auto idx : indices) {
    names.push_back("z" + std::to_string(idx));
    groups.push_back([idx](const DenseVector& z) {
      if (idx >= z.size()) throw DomainError("group feature index out of range");
      return z[idx] > 0.5;
    });
  }
  GroupFamily f(std::move(names), std::move(groups), m);
  f.indices_ = indices;
  return f;
}

std::uint64_t GroupFamily::membership(const DenseVector& z) const {
  std::uint64_t mask = 0;
  for (std::size_t g = 0; g < groups_.size(); ++g)
    if (groups_[g](z)) mask |= std::uint64_t{1} << g;
  if (std::popcount(mask) > m_) throw DomainError("node belongs to more than m groups");
  return mask;
}

}  // namespace anykernel

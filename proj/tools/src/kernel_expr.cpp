#include "anykernel_cli/kernel_expr.hpp"

#include <cctype>
#include <charconv>
#include <vector>

#include <anykernel/errors.hpp>
#include <anykernel/graph_kernels.hpp>
#include <anykernel/omni.hpp>

namespace anykernel::cli {

namespace {

struct Token {
  std::string text;
  std::size_t column = 0;  // 1-based
};

struct Node {
  std::string atom;  // empty for lists
  std::vector<Node> items;
  std::size_t column = 0;
  bool is_list() const { return atom.empty(); }
};

[[noreturn]] void fail(std::size_t column, const std::string& what) {
  throw ConfigError("kernel expression, column " + std::to_string(column) + ": " + what);
}

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(' || c == ')') {
      out.push_back({std::string(1, c), i + 1});
      ++i;
    } else {
      const std::size_t start = i;
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' && s[i] != ')') ++i;
      out.push_back({s.substr(start, i - start), start + 1});
    }
  }
  return out;
}

Node parse_node(const std::vector<Token>& toks, std::size_t& pos, std::size_t end_column) {
  if (pos >= toks.size()) fail(end_column, "unexpected end of expression");
  const Token& t = toks[pos++];
  if (t.text == ")") fail(t.column, "unexpected ')'");
  if (t.text != "(") return Node{t.text, {}, t.column};
  Node list{"", {}, t.column};
  for (;;) {
    if (pos >= toks.size()) fail(end_column, "missing ')'");
    if (toks[pos].text == ")") {
      ++pos;
      break;
    }
    list.items.push_back(parse_node(toks, pos, end_column));
  }
  if (list.items.empty() || list.items[0].is_list()) fail(t.column, "list must start with a kernel name");
  return list;
}

double number(const Node& n) {
  if (n.is_list()) fail(n.column, "expected a number");
  double v = 0.0;
  const auto* b = n.atom.data();
  const auto* e = b + n.atom.size();
  auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e) fail(n.column, "expected a number, got '" + n.atom + "'");
  return v;
}

int integer(const Node& n) {
  const double v = number(n);
  if (v != static_cast<double>(static_cast<int>(v))) fail(n.column, "expected an integer, got '" + n.atom + "'");
  return static_cast<int>(v);
}

void arity(const Node& n, std::size_t lo, std::size_t hi) {
  const std::size_t a = n.items.size() - 1;
  if (a < lo || a > hi) {
    fail(n.column, "'" + n.items[0].atom + "' takes " +
                       (lo == hi ? std::to_string(lo) : std::to_string(lo) + " to " + std::to_string(hi)) +
                       " arguments, got " + std::to_string(a));
  }
}

const GroupFamily& groups(const Node& n, const KernelContext& ctx) {
  if (!ctx.groups) fail(n.column, "'" + (n.is_list() ? n.items[0].atom : n.atom) + "' needs a group family (linkpred mode)");
  return *ctx.groups;
}

Kernel build(const Node& n, const KernelContext& ctx);

Kernel preset(const Node& n, const KernelContext& ctx) {
  if (n.atom == "calibration") return constant_kernel(1.0);
  if (n.atom == "multicalibration") return pair_groups_kernel(groups(n, ctx), 10);
  if (n.atom == "online-regression") return online_regression_kernel(linear_features_kernel());
  fail(n.column, "unknown kernel preset '" + n.atom + "'");
}

Kernel build(const Node& n, const KernelContext& ctx) {
  if (!n.is_list()) return preset(n, ctx);
  const std::string& h = n.items[0].atom;
  const auto& a = n.items;
  try {
    if (h == "zero") return arity(n, 0, 0), zero_kernel();
    if (h == "one") return arity(n, 0, 0), constant_kernel(1.0);
    if (h == "const") return arity(n, 1, 1), constant_kernel(number(a[1]));
    if (h == "sobolev") return arity(n, 0, 0), sobolev_unit_kernel();
    if (h == "grid") return arity(n, 1, 1), grid_bin_kernel(integer(a[1]));
    if (h == "laplace") return arity(n, 0, 0), laplace_kernel();
    if (h == "linear-p") return arity(n, 0, 0), linear_prediction_kernel();
    if (h == "poly") return arity(n, 1, 1), polynomial_kernel(integer(a[1]));
    if (h == "linear-x") return arity(n, 0, 0), linear_features_kernel();
    if (h == "lowdeg") return arity(n, 2, 2), low_degree_kernel(integer(a[1]), integer(a[2]));
    if (h == "gaussian") return arity(n, 1, 1), gaussian_kernel(number(a[1]));
    if (h == "sum" || h == "product") {
      std::vector<Kernel> parts;
      for (std::size_t i = 1; i < a.size(); ++i) parts.push_back(build(a[i], ctx));
      if (parts.size() < 2) fail(n.column, "'" + h + "' needs at least two kernels");
      return h == "sum" ? sum_kernel(std::move(parts)) : product_kernel(std::move(parts));
    }
    if (h == "scale") return arity(n, 2, 2), scale_kernel(number(a[1]), build(a[2], ctx));
    if (h == "rescale") return arity(n, 3, 3), rescale_prediction(build(a[3], ctx), number(a[1]), number(a[2]));
    if (h == "intersection") return arity(n, 0, 0), group_pair_count_kernel(groups(n, ctx));
    if (h == "pair-groups") return arity(n, 1, 1), pair_groups_kernel(groups(n, ctx), integer(a[1]));
    if (h == "embeddedness") return arity(n, 1, 1), embeddedness_kernel(integer(a[1]));
    if (h == "isomorphism") {
      arity(n, 1, 2);
      return isomorphism_kernel(integer(a[1]), a.size() > 2 ? integer(a[2]) : 10);
    }
    if (h == "rconv") return arity(n, 2, 2), r_convolution_kernel(build(a[2], ctx), integer(a[1]));
    if (h == "online-regression") return arity(n, 1, 1), online_regression_kernel(build(a[1], ctx));
  } catch (const DomainError& e) {
    fail(n.column, e.what());
  }
  fail(n.items[0].column, "unknown kernel '" + h + "'");
}

}  // namespace

Kernel parse_kernel(const std::string& expr, const KernelContext& ctx) {
  const auto toks = tokenize(expr);
  if (toks.empty()) fail(1, "empty expression");
  std::size_t pos = 0;
  const Node root = parse_node(toks, pos, expr.size() + 1);
  if (pos != toks.size()) fail(toks[pos].column, "trailing input");
  return build(root, ctx);
}

}  // namespace anykernel::cli

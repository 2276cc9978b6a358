#pragma once

// Finite filtered probability space as a rooted tree, plus adapted
// processes living on its nodes.

#include "superhedge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace superhedge {

using Vector = std::vector<double>;

inline constexpr double kProbabilityTolerance = 1e-12;

struct NodeSpec {
  std::string id;
  std::optional<std::string> parent;
  double prob = 1.0; // unconditional probability of the node
};

struct Node {
  std::string id;
  int time = 0;
  int parent = -1;
  double prob = 1.0;
};

/// Immutable scenario tree. Nodes are indexed densely in (time, insertion
/// order), so index 0 is the root and every node's parent has a smaller
/// index.
class ScenarioTree {
public:
  ScenarioTree() : ScenarioTree(build({NodeSpec{"root", std::nullopt, 1.0}})) {}

  static ScenarioTree build(const std::vector<NodeSpec> &spec);

  std::size_t size() const { return nodes_.size(); }
  int horizon() const { return horizon_; }
  const Node &node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Node> &nodes() const { return nodes_; }
  const std::string &id(std::size_t i) const { return nodes_[i].id; }
  int time(std::size_t i) const { return nodes_[i].time; }
  int parent(std::size_t i) const { return nodes_[i].parent; }
  double prob(std::size_t i) const { return nodes_[i].prob; }
  std::span<const int> children(std::size_t i) const { return children_[i]; }
  bool is_terminal(std::size_t i) const { return children_[i].empty(); }
  std::span<const int> nodes_at(int t) const {
    if (t < 0 || t > horizon_)
      throw TimeOutOfRange("time " + std::to_string(t) + " outside [0, " +
                           std::to_string(horizon_) + "]");
    return levels_[static_cast<std::size_t>(t)];
  }

  std::optional<std::size_t> find(const std::string &id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const std::string &id) const {
    if (auto i = find(id))
      return *i;
    throw ShapeMismatch("unknown node id '" + id + "'");
  }

  std::vector<NodeSpec> to_spec() const {
    std::vector<NodeSpec> out;
    out.reserve(size());
    for (const auto &n : nodes_) {
      NodeSpec s{n.id, std::nullopt, n.prob};
      if (n.parent >= 0)
        s.parent = nodes_[static_cast<std::size_t>(n.parent)].id;
      out.push_back(std::move(s));
    }
    return out;
  }

private:
  struct Uninitialized {};
  explicit ScenarioTree(Uninitialized) {}

  std::vector<Node> nodes_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> levels_;
  std::unordered_map<std::string, std::size_t> index_;
  int horizon_ = 0;
};

inline ScenarioTree ScenarioTree::build(const std::vector<NodeSpec> &spec) {
  if (spec.empty())
    throw MalformedTree("empty node list");
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (!pos.emplace(spec[i].id, i).second)
      throw MalformedTree("duplicate node id '" + spec[i].id + "'");
    if (!(spec[i].prob > 0.0) || !std::isfinite(spec[i].prob))
      throw MalformedTree("node '" + spec[i].id + "' has nonpositive probability");
  }
  std::optional<std::size_t> root;
  std::vector<int> parent(spec.size(), -1);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (!spec[i].parent) {
      if (root)
        throw MalformedTree("multiple roots ('" + spec[*root].id + "', '" +
                            spec[i].id + "')");
      root = i;
      continue;
    }
    auto it = pos.find(*spec[i].parent);
    if (it == pos.end())
      throw MalformedTree("node '" + spec[i].id + "' has unknown parent '" +
                          *spec[i].parent + "'");
    parent[i] = static_cast<int>(it->second);
  }
  if (!root)
    throw MalformedTree("no root node");
  // Depths; a cycle shows up as a walk longer than the node count.
  std::vector<int> depth(spec.size(), -1);
  depth[*root] = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    std::vector<std::size_t> chain;
    std::size_t cur = i;
    while (depth[cur] < 0) {
      chain.push_back(cur);
      if (chain.size() > spec.size())
        throw MalformedTree("cyclic parent links at '" + spec[i].id + "'");
      cur = static_cast<std::size_t>(parent[cur]);
    }
    int d = depth[cur];
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      depth[*it] = ++d;
  }
  const int horizon = *std::max_element(depth.begin(), depth.end());

  ScenarioTree tree{Uninitialized{}};
  tree.horizon_ = horizon;
  tree.levels_.assign(static_cast<std::size_t>(horizon) + 1, {});
  std::vector<std::size_t> order;
  for (int t = 0; t <= horizon; ++t)
    for (std::size_t i = 0; i < spec.size(); ++i)
      if (depth[i] == t)
        order.push_back(i);
  std::vector<int> new_index(spec.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    new_index[order[k]] = static_cast<int>(k);
  tree.children_.assign(spec.size(), {});
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    Node n{spec[i].id, depth[i], parent[i] < 0 ? -1 : new_index[static_cast<std::size_t>(parent[i])],
           spec[i].prob};
    if (n.parent >= 0)
      tree.children_[static_cast<std::size_t>(n.parent)].push_back(static_cast<int>(k));
    tree.levels_[static_cast<std::size_t>(n.time)].push_back(static_cast<int>(k));
    tree.index_.emplace(n.id, k);
    tree.nodes_.push_back(std::move(n));
  }
  if (std::abs(tree.nodes_[0].prob - 1.0) > kProbabilityTolerance)
    throw MalformedTree("root probability must be 1");
  for (std::size_t k = 0; k < tree.size(); ++k) {
    const auto &kids = tree.children_[k];
    if (kids.empty()) {
      if (tree.nodes_[k].time != horizon)
        throw MalformedTree("leaf '" + tree.nodes_[k].id + "' at time " +
                            std::to_string(tree.nodes_[k].time) +
                            " before horizon " + std::to_string(horizon));
      continue;
    }
    double sum = 0.0;
    for (int c : kids)
      sum += tree.nodes_[static_cast<std::size_t>(c)].prob;
    if (std::abs(sum - tree.nodes_[k].prob) > kProbabilityTolerance)
      throw MalformedTree("children of '" + tree.nodes_[k].id +
                          "' carry probability " + std::to_string(sum) +
                          " instead of " + std::to_string(tree.nodes_[k].prob));
  }
  return tree;
}

/// Adapted scalar process: one value per node.
class ClaimProcess {
public:
  ClaimProcess() = default;
  explicit ClaimProcess(std::size_t n, double v = 0.0) : values_(n, v) {}
  explicit ClaimProcess(Vector values) : values_(std::move(values)) {}

  static ClaimProcess zero(const ScenarioTree &tree) {
    return ClaimProcess(tree.size());
  }
  static ClaimProcess constant(const ScenarioTree &tree, double v) {
    return ClaimProcess(tree.size(), v);
  }
  /// Indicator of the root, i.e. the premium (1, 0, ..., 0).
  static ClaimProcess initial_unit(const ScenarioTree &tree) {
    ClaimProcess p(tree.size());
    p[0] = 1.0;
    return p;
  }

  std::size_t size() const { return values_.size(); }
  double &operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  const Vector &values() const { return values_; }

  ClaimProcess &operator+=(const ClaimProcess &o) {
    check(o);
    for (std::size_t i = 0; i < size(); ++i)
      values_[i] += o.values_[i];
    return *this;
  }
  ClaimProcess &operator-=(const ClaimProcess &o) {
    check(o);
    for (std::size_t i = 0; i < size(); ++i)
      values_[i] -= o.values_[i];
    return *this;
  }
  ClaimProcess &operator*=(double a) {
    for (auto &v : values_)
      v *= a;
    return *this;
  }
  friend ClaimProcess operator+(ClaimProcess a, const ClaimProcess &b) { return a += b; }
  friend ClaimProcess operator-(ClaimProcess a, const ClaimProcess &b) { return a -= b; }
  friend ClaimProcess operator*(double s, ClaimProcess a) { return a *= s; }
  friend ClaimProcess operator-(ClaimProcess a) { return a *= -1.0; }

  bool is_zero() const {
    for (double v : values_)
      if (v != 0.0)
        return false;
    return true;
  }

private:
  void check(const ClaimProcess &o) const {
    if (o.size() != size())
      throw ShapeMismatch("claim processes on different trees");
  }
  Vector values_;
};

/// Adapted R^J-valued process (portfolios, dual processes, price processes).
class PortfolioProcess {
public:
  PortfolioProcess() = default;
  PortfolioProcess(std::size_t nodes, std::size_t dim)
      : dim_(dim), values_(nodes, Vector(dim, 0.0)) {}
  PortfolioProcess(std::size_t dim, std::vector<Vector> values)
      : dim_(dim), values_(std::move(values)) {
    for (const auto &v : values_)
      if (v.size() != dim_)
        throw ShapeMismatch("portfolio entry has wrong dimension");
  }

  std::size_t size() const { return values_.size(); }
  std::size_t dim() const { return dim_; }
  Vector &operator[](std::size_t i) { return values_[i]; }
  const Vector &operator[](std::size_t i) const { return values_[i]; }
  const std::vector<Vector> &values() const { return values_; }

  /// Portfolio held before node i was reached (x_{-1} = 0 at the root).
  const Vector &previous(const ScenarioTree &tree, std::size_t i) const {
    static thread_local Vector zero;
    const int p = tree.parent(i);
    if (p < 0) {
      zero.assign(dim_, 0.0);
      return zero;
    }
    return values_[static_cast<std::size_t>(p)];
  }

  /// True when x_T = 0, i.e. the process is liquidated at the horizon.
  bool liquidated(const ScenarioTree &tree, double tol = 0.0) const {
    for (int n : tree.nodes_at(tree.horizon()))
      for (double v : values_[static_cast<std::size_t>(n)])
        if (std::abs(v) > tol)
          return false;
    return true;
  }

private:
  std::size_t dim_ = 0;
  std::vector<Vector> values_;
};

namespace detail {
inline void require_time(const ScenarioTree &tree, int t) {
  if (t < 0 || t >= tree.horizon())
    throw TimeOutOfRange("conditional expectation needs 0 <= t < T, got t = " +
                         std::to_string(t));
}
} // namespace detail

/// E[proc_{t+1} | F_t] for a vector process; one entry per node in
/// tree.nodes_at(t), in that order.
inline std::vector<Vector> conditional_expectation(const ScenarioTree &tree,
                                                   const PortfolioProcess &proc,
                                                   int t) {
  detail::require_time(tree, t);
  if (proc.size() != tree.size())
    throw ShapeMismatch("process does not match tree");
  std::vector<Vector> out;
  for (int n : tree.nodes_at(t)) {
    Vector acc(proc.dim(), 0.0);
    const double pn = tree.prob(static_cast<std::size_t>(n));
    for (int m : tree.children(static_cast<std::size_t>(n))) {
      const double w = tree.prob(static_cast<std::size_t>(m)) / pn;
      const auto &v = proc[static_cast<std::size_t>(m)];
      for (std::size_t j = 0; j < acc.size(); ++j)
        acc[j] += w * v[j];
    }
    out.push_back(std::move(acc));
  }
  return out;
}

inline Vector conditional_expectation(const ScenarioTree &tree,
                                      const ClaimProcess &proc, int t) {
  detail::require_time(tree, t);
  if (proc.size() != tree.size())
    throw ShapeMismatch("process does not match tree");
  Vector out;
  for (int n : tree.nodes_at(t)) {
    double acc = 0.0;
    const double pn = tree.prob(static_cast<std::size_t>(n));
    for (int m : tree.children(static_cast<std::size_t>(n)))
      acc += tree.prob(static_cast<std::size_t>(m)) / pn * proc[static_cast<std::size_t>(m)];
    out.push_back(acc);
  }
  return out;
}

/// E sum_t c_t y_t.
inline double pairing(const ScenarioTree &tree, const ClaimProcess &c,
                      const ClaimProcess &y) {
  if (c.size() != tree.size() || y.size() != tree.size())
    throw ShapeMismatch("pairing of processes not defined on this tree");
  double s = 0.0;
  for (std::size_t i = 0; i < tree.size(); ++i)
    s += tree.prob(i) * (c[i] * y[i]);
  return s;
}

} // namespace superhedge

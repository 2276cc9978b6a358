#pragma once

// JSON reading and writing for trees, processes, models and reports.
//
// Tree:      {"nodes": [{"id": str, "parent": str | null, "prob": number}]}
// Process:   {"values": {nodeId: number | [number]}, "default": number?}
// Model:     {"tree": Tree, "assets": [str],
//             "default": Node?, "nodes": {nodeId: Node}}
// Node:      {"cost": Cost, "constraint": Constraint?, "carry": [number]?}
// Cost:      {"pieces": [Piece], "domain": [Row]?}
//          | {"terms": [[Piece]], "domain": [Row]?}
//          | {"linear": [number]}
//          | {"ladder": [{"asks": [Level], "bids": [Level]}]}
// Piece:     {"a": [number], "b": number}     Row: {"g": [number], "h": number}
// Level:     {"price": number, "depth": number | "inf" | null}
// Constraint: {"rows": [Row]} | {"lower": [number|null], "upper": [number|null]}
//
// Infinite values are written as the strings "inf" and "-inf".

#include "superhedge/diagnostics.hpp"
#include "superhedge/duality.hpp"
#include "superhedge/errors.hpp"
#include "superhedge/hedging.hpp"
#include "superhedge/market_model.hpp"
#include "superhedge/scenario_tree.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace superhedge::io {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Files and scalars.

inline Json read_json(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error &e) {
    throw IoError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_json(const std::string &path, const Json &j) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out)
    throw IoError("write to '" + path + "' failed");
}

inline Json number(double v) {
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  return v;
}

inline double to_number(const Json &j, const std::string &what) {
  if (j.is_number())
    return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf")
      return kInf;
    if (s == "-inf")
      return -kInf;
  }
  throw InvalidModel(what + " must be a number");
}

inline Vector to_vector(const Json &j, const std::string &what) {
  if (!j.is_array())
    throw InvalidModel(what + " must be an array");
  Vector v;
  for (const auto &e : j)
    v.push_back(to_number(e, what));
  return v;
}

inline Json vector_json(const Vector &v) {
  Json out = Json::array();
  for (double e : v)
    out.push_back(number(e));
  return out;
}

inline const Json &field(const Json &j, const char *key, const std::string &where) {
  if (!j.is_object() || !j.contains(key))
    throw InvalidModel(where + " lacks \"" + key + "\"");
  return j.at(key);
}

// ---------------------------------------------------------------------------
// Trees and processes.

inline ScenarioTree tree_from_json(const Json &j) {
  const auto &nodes = field(j, "nodes", "tree");
  if (!nodes.is_array())
    throw MalformedTree("\"nodes\" must be an array");
  std::vector<NodeSpec> spec;
  for (const auto &n : nodes) {
    NodeSpec s;
    s.id = field(n, "id", "tree node").get<std::string>();
    if (n.contains("parent") && !n.at("parent").is_null())
      s.parent = n.at("parent").get<std::string>();
    s.prob = to_number(field(n, "prob", "tree node '" + s.id + "'"), "prob");
    spec.push_back(std::move(s));
  }
  return ScenarioTree::build(spec);
}

inline Json tree_to_json(const ScenarioTree &tree) {
  Json nodes = Json::array();
  for (const auto &s : tree.to_spec()) {
    Json n{{"id", s.id}, {"prob", s.prob}};
    n["parent"] = s.parent ? Json(*s.parent) : Json(nullptr);
    nodes.push_back(std::move(n));
  }
  return {{"nodes", nodes}};
}

inline ClaimProcess claim_from_json(const ScenarioTree &tree, const Json &j) {
  const auto &values = field(j, "values", "process");
  std::vector<bool> seen(tree.size(), false);
  const bool has_default = j.contains("default");
  const double fallback = has_default ? to_number(j.at("default"), "default") : 0.0;
  ClaimProcess c(tree.size(), fallback);
  for (const auto &[id, v] : values.items()) {
    const auto i = tree.index_of(id);
    c[i] = to_number(v, "value at '" + id + "'");
    seen[i] = true;
  }
  if (!has_default)
    for (std::size_t n = 0; n < tree.size(); ++n)
      if (!seen[n])
        throw ShapeMismatch("process has no value at node '" + tree.id(n) + "'");
  return c;
}

inline Json claim_to_json(const ScenarioTree &tree, const ClaimProcess &c) {
  Json values = Json::object();
  for (std::size_t n = 0; n < tree.size(); ++n)
    values[tree.id(n)] = number(c[n]);
  return {{"values", values}};
}

inline PortfolioProcess portfolio_from_json(const ScenarioTree &tree, std::size_t dim,
                                            const Json &j) {
  const auto &values = field(j, "values", "process");
  PortfolioProcess x(tree.size(), dim);
  std::vector<bool> seen(tree.size(), false);
  for (const auto &[id, v] : values.items()) {
    const auto i = tree.index_of(id);
    x[i] = to_vector(v, "value at '" + id + "'");
    if (x[i].size() != dim)
      throw ShapeMismatch("value at '" + id + "' has " + std::to_string(x[i].size()) +
                          " entries, expected " + std::to_string(dim));
    seen[i] = true;
  }
  for (std::size_t n = 0; n < tree.size(); ++n)
    if (!seen[n])
      throw ShapeMismatch("process has no value at node '" + tree.id(n) + "'");
  return x;
}

inline Json portfolio_to_json(const ScenarioTree &tree, const PortfolioProcess &x) {
  Json values = Json::object();
  for (std::size_t n = 0; n < tree.size(); ++n)
    values[tree.id(n)] = vector_json(x[n]);
  return {{"values", values}};
}

// ---------------------------------------------------------------------------
// Costs, constraints, models.

inline std::vector<Halfspace> rows_from_json(const Json &j, std::size_t dim,
                                             const std::string &where) {
  std::vector<Halfspace> rows;
  for (const auto &r : j) {
    Halfspace h{to_vector(field(r, "g", where), where + " g"),
                to_number(field(r, "h", where), where + " h")};
    if (h.g.size() != dim)
      throw ShapeMismatch(where + " row has wrong dimension");
    rows.push_back(std::move(h));
  }
  return rows;
}

inline Json rows_to_json(const std::vector<Halfspace> &rows) {
  Json out = Json::array();
  for (const auto &r : rows)
    out.push_back({{"g", vector_json(r.g)}, {"h", number(r.h)}});
  return out;
}

inline std::vector<AffinePiece> pieces_from_json(const Json &j, std::size_t dim,
                                                 const std::string &where) {
  std::vector<AffinePiece> out;
  for (const auto &p : j) {
    AffinePiece a{to_vector(field(p, "a", where), where + " a"),
                  to_number(field(p, "b", where), where + " b")};
    if (a.a.size() != dim)
      throw ShapeMismatch(where + " piece has wrong dimension");
    out.push_back(std::move(a));
  }
  return out;
}

inline std::vector<LadderLevel> levels_from_json(const Json &j, const std::string &where) {
  std::vector<LadderLevel> out;
  for (const auto &l : j) {
    const double depth = !l.contains("depth") || l.at("depth").is_null()
                             ? kInf
                             : to_number(l.at("depth"), where + " depth");
    out.push_back({to_number(field(l, "price", where), where + " price"), depth});
  }
  return out;
}

inline PolyhedralCost cost_from_json(const Json &j, std::size_t dim,
                                     const std::string &where) {
  std::vector<Halfspace> domain;
  if (j.contains("domain"))
    domain = rows_from_json(j.at("domain"), dim, where + " domain");
  PolyhedralCost cost = [&] {
    if (j.contains("linear")) {
      const auto s = to_vector(j.at("linear"), where + " linear");
      if (s.size() != dim)
        throw ShapeMismatch(where + " linear cost has wrong dimension");
      return PolyhedralCost(dim, {{AffinePiece{s, 0.0}}}, domain);
    }
    if (j.contains("pieces"))
      return PolyhedralCost(dim, {pieces_from_json(j.at("pieces"), dim, where)}, domain);
    if (j.contains("terms")) {
      std::vector<PolyhedralCost::Term> terms;
      for (const auto &t : j.at("terms"))
        terms.push_back(pieces_from_json(t, dim, where));
      return PolyhedralCost(dim, std::move(terms), domain);
    }
    if (j.contains("ladder")) {
      std::vector<AssetLadder> books;
      for (const auto &b : j.at("ladder"))
        books.push_back({levels_from_json(field(b, "asks", where), where + " asks"),
                         levels_from_json(field(b, "bids", where), where + " bids")});
      if (books.size() != dim)
        throw ShapeMismatch(where + " ladder has " + std::to_string(books.size()) +
                            " books for " + std::to_string(dim) + " assets");
      auto c = cost_from_ladder(books);
      if (domain.empty())
        return c;
      auto rows = c.domain();
      rows.insert(rows.end(), domain.begin(), domain.end());
      return PolyhedralCost(dim, c.terms(), std::move(rows));
    }
    throw InvalidModel(where + " cost needs \"linear\", \"pieces\", \"terms\" or "
                               "\"ladder\"");
  }();
  return cost;
}

inline Json cost_to_json(const PolyhedralCost &c) {
  Json terms = Json::array();
  for (const auto &t : c.terms()) {
    Json pieces = Json::array();
    for (const auto &p : t)
      pieces.push_back({{"a", vector_json(p.a)}, {"b", number(p.b)}});
    terms.push_back(std::move(pieces));
  }
  Json out{{"terms", terms}};
  if (!c.domain().empty())
    out["domain"] = rows_to_json(c.domain());
  return out;
}

inline PolyhedralConstraint constraint_from_json(const Json &j, std::size_t dim,
                                                 const std::string &where) {
  if (j.contains("rows"))
    return PolyhedralConstraint(dim, rows_from_json(j.at("rows"), dim, where));
  std::vector<Halfspace> rows;
  auto bound = [&](const char *key, double sign) {
    if (!j.contains(key))
      return;
    const auto &b = j.at(key);
    if (!b.is_array() || b.size() != dim)
      throw ShapeMismatch(where + " \"" + key + "\" needs one entry per asset");
    for (std::size_t k = 0; k < dim; ++k) {
      if (b[k].is_null())
        continue;
      const double v = to_number(b[k], where + " bound");
      if (std::isinf(v))
        continue;
      Vector g(dim, 0.0);
      g[k] = sign;
      rows.push_back({g, sign * v});
    }
  };
  bound("lower", -1.0);
  bound("upper", 1.0);
  return PolyhedralConstraint(dim, std::move(rows));
}

inline Json constraint_to_json(const PolyhedralConstraint &d) {
  return {{"rows", rows_to_json(d.rows())}};
}

inline MarketModel model_from_json(const Json &j) {
  const auto tree = tree_from_json(field(j, "tree", "model"));
  std::vector<std::string> assets;
  for (const auto &a : field(j, "assets", "model"))
    assets.push_back(a.get<std::string>());
  const std::size_t dim = assets.size();
  if (dim == 0)
    throw InvalidModel("model without assets");
  const Json empty = Json::object();
  const Json &fallback = j.contains("default") ? j.at("default") : empty;
  const Json &nodes = j.contains("nodes") ? j.at("nodes") : empty;
  for (const auto &[id, v] : nodes.items())
    (void)tree.index_of(id);
  std::vector<PolyhedralCost> costs;
  std::vector<PolyhedralConstraint> cons;
  std::vector<Vector> carry;
  bool any_carry = false;
  for (std::size_t n = 0; n < tree.size(); ++n) {
    const auto &id = tree.id(n);
    const Json &node = nodes.contains(id) ? nodes.at(id) : fallback;
    const std::string where = "node '" + id + "'";
    auto pick = [&](const char *key) -> const Json * {
      if (node.contains(key))
        return &node.at(key);
      if (fallback.contains(key))
        return &fallback.at(key);
      return nullptr;
    };
    const Json *cost = pick("cost");
    if (!cost)
      throw InvalidModel(where + " has no cost");
    costs.push_back(cost_from_json(*cost, dim, where));
    const Json *con = pick("constraint");
    cons.push_back(con ? constraint_from_json(*con, dim, where)
                       : PolyhedralConstraint::unconstrained(dim));
    const Json *r = pick("carry");
    any_carry = any_carry || r;
    carry.push_back(r ? to_vector(*r, where + " carry") : Vector(dim, 1.0));
  }
  if (!any_carry)
    carry.clear();
  return MarketModel(tree, std::move(assets), std::move(costs), std::move(cons),
                     std::move(carry));
}

inline Json model_to_json(const MarketModel &m) {
  const auto &tree = m.tree();
  Json nodes = Json::object();
  for (std::size_t n = 0; n < tree.size(); ++n) {
    Json node{{"cost", cost_to_json(m.cost(n))},
              {"constraint", constraint_to_json(m.constraint(n))}};
    if (m.has_carry())
      node["carry"] = vector_json(m.carry(n));
    nodes[tree.id(n)] = std::move(node);
  }
  return {{"tree", tree_to_json(tree)}, {"assets", m.assets()}, {"nodes", nodes}};
}

// ---------------------------------------------------------------------------
// Reports.

inline Json price_to_json(const MarketModel &m, const ClaimProcess &c,
                          const ClaimProcess &p, const PriceResult &r) {
  Json out{{"kind", "price"},
           {"status", to_string(r.status)},
           {"value", number(r.value)},
           {"claim", claim_to_json(m.tree(), c)},
           {"premium", claim_to_json(m.tree(), p)}};
  if (r.status == PriceStatus::Finite) {
    out["portfolio"] = portfolio_to_json(m.tree(), r.portfolio);
    out["residual"] = r.residual;
  } else {
    out["diagnosis"] = r.diagnosis;
  }
  return out;
}

inline Json hedge_to_json(const MarketModel &m, const ClaimProcess &c,
                          const HedgeResult &r) {
  Json out{{"kind", "hedge"},
           {"status", to_string(r.status)},
           {"claim", claim_to_json(m.tree(), c)}};
  if (r.status == Membership::Member) {
    out["portfolio"] = portfolio_to_json(m.tree(), r.portfolio);
    out["residual"] = r.residual;
  }
  return out;
}

inline Json certificate_to_json(const MarketModel &m, const ClaimProcess &c,
                                const ClaimProcess &p, const DualCertificate &cert) {
  const auto &tree = m.tree();
  Json prices = Json::object();
  for (std::size_t n = 0; n < tree.size(); ++n)
    if (cert.prices[n])
      prices[tree.id(n)] = vector_json(*cert.prices[n]);
  Json out{{"kind", "certificate"},
           {"claim", claim_to_json(tree, c)},
           {"premium", claim_to_json(tree, p)},
           {"deflator", claim_to_json(tree, cert.y)},
           {"dual_process", portfolio_to_json(tree, cert.v)},
           {"marginal_prices", {{"values", prices}}},
           {"sigma", number(cert.sigma)},
           {"price", number(cert.price)},
           {"value", number(cert.value)},
           {"normalization", cert.normalization},
           {"gap", cert.gap}};
  if (cert.dual_lp_value)
    out["dual_lp_value"] = number(*cert.dual_lp_value);
  return out;
}

inline Json closedness_to_json(const ScenarioTree &tree, const ClosednessReport &r) {
  Json nodes = Json::object();
  for (std::size_t n = 0; n < tree.size(); ++n) {
    Json e{{"satisfied", r.nodes[n].satisfied}, {"time", tree.time(n)}};
    if (r.nodes[n].direction)
      e["direction"] = vector_json(*r.nodes[n].direction);
    nodes[tree.id(n)] = std::move(e);
  }
  Json out{{"satisfied", r.satisfied}, {"nodes", nodes}};
  if (!r.satisfied)
    out["first_violation_time"] = r.first_violation_time;
  return out;
}

inline Json positive_price_to_json(const ScenarioTree &tree, const PositivePriceReport &r) {
  Json eps = Json::object(), rec = Json::object();
  for (std::size_t n = 0; n < tree.size(); ++n) {
    eps[tree.id(n)] = r.epsilon[n];
    rec[tree.id(n)] = static_cast<bool>(r.recession_by_node[n]);
  }
  return {{"exists", r.exists},
          {"epsilon", eps},
          {"prices", portfolio_to_json(tree, r.prices)},
          {"recession_nonnegative", r.recession_nonnegative},
          {"recession_by_node", rec}};
}

} // namespace superhedge::io

#pragma once

// Polyhedral approximation of smooth convex data by sampling: tangent
// planes give outer approximations (costs from below, sets from outside),
// chords give inner approximations of epigraph-type sets.

#include "superhedge/errors.hpp"
#include "superhedge/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace superhedge {

using ScalarFunction = std::function<double(const Vector &)>;
using GradientFunction = std::function<Vector(const Vector &)>;

/// max over samples of the tangent planes of f, a minorant of f. The
/// origin is always sampled so the result vanishes at 0; f(0) must be 0.
inline PolyhedralCost tangent_cost(const ScalarFunction &f,
                                   const GradientFunction &grad,
                                   std::vector<Vector> samples,
                                   std::size_t dim) {
  if (std::abs(f(Vector(dim, 0.0))) > 1e-12)
    throw InvalidModel("cost to approximate must vanish at the origin");
  samples.insert(samples.begin(), Vector(dim, 0.0));
  std::vector<AffinePiece> pieces;
  for (const auto &x : samples) {
    if (x.size() != dim)
      throw ShapeMismatch("sample point has wrong dimension");
    const Vector g = grad(x);
    const double fx = f(x);
    if (!std::isfinite(fx))
      throw InvalidModel("cost is not finite at a sample point");
    double b = fx - detail::dot(g, x);
    // Convexity puts every tangent below f(0) = 0; clip rounding noise.
    b = std::min(b, 0.0);
    pieces.push_back({g, b});
  }
  pieces.front().b = 0.0;
  return PolyhedralCost::from_pieces(std::move(pieces));
}

/// Outer approximation of {x | phi(x) <= 0} by tangent halfspaces at the
/// samples (points where phi is finite). phi(0) <= 0 is required.
inline PolyhedralConstraint tangent_constraint(const ScalarFunction &phi,
                                               const GradientFunction &grad,
                                               const std::vector<Vector> &samples,
                                               std::size_t dim) {
  if (!(phi(Vector(dim, 0.0)) <= 1e-12))
    throw InvalidModel("constraint set to approximate must contain the origin");
  std::vector<Halfspace> rows;
  for (const auto &x : samples) {
    if (x.size() != dim)
      throw ShapeMismatch("sample point has wrong dimension");
    const Vector g = grad(x);
    if (detail::inf_norm(g) == 0.0)
      continue;
    rows.push_back({g, std::max(0.0, detail::dot(g, x) - phi(x))});
  }
  return PolyhedralConstraint(dim, std::move(rows));
}

/// Epigraph-type set {x | x_value >= f(x_arg)} for a convex f of one
/// variable with f(0) = 0, embedded in R^dim.
struct EpigraphCurve {
  std::size_t dim = 0;
  std::size_t value = 0; // coordinate bounded below by the curve
  std::size_t arg = 1;   // coordinate the curve depends on
  std::function<double(double)> f;
  std::function<double(double)> df;
};

namespace detail {

inline Vector unit_pair(std::size_t dim, std::size_t i, double vi, std::size_t j,
                        double vj) {
  Vector g(dim, 0.0);
  g[i] = vi;
  g[j] += vj;
  return g;
}

inline std::vector<double> sorted_samples(std::vector<double> ts) {
  ts.push_back(0.0);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

} // namespace detail

/// Outer approximation: tangent lines at the sample arguments, plus the
/// optional closed bounds arg >= lower, arg <= upper of the curve's domain.
inline PolyhedralConstraint epigraph_outer(const EpigraphCurve &c,
                                           const std::vector<double> &ts,
                                           double lower = -kInf,
                                           double upper = kInf) {
  std::vector<Halfspace> rows;
  for (double t : detail::sorted_samples(ts)) {
    const double slope = c.df(t);
    // f(t) + f'(t)(x_arg - t) <= x_value
    rows.push_back({detail::unit_pair(c.dim, c.value, -1.0, c.arg, slope),
                    std::max(0.0, slope * t - c.f(t))});
  }
  if (std::isfinite(lower))
    rows.push_back({detail::unit_pair(c.dim, c.value, 0.0, c.arg, -1.0), -lower});
  if (std::isfinite(upper))
    rows.push_back({detail::unit_pair(c.dim, c.value, 0.0, c.arg, 1.0), upper});
  return PolyhedralConstraint(c.dim, std::move(rows));
}

/// Inner approximation: the chords between consecutive samples and the
/// argument range [min, max] of the samples, i.e. the epigraph of the
/// piecewise linear interpolant.
inline PolyhedralConstraint epigraph_inner(const EpigraphCurve &c,
                                           const std::vector<double> &ts) {
  const auto s = detail::sorted_samples(ts);
  std::vector<Halfspace> rows;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double t0 = s[k], t1 = s[k + 1];
    const double f0 = c.f(t0), f1 = c.f(t1);
    const double slope = (f1 - f0) / (t1 - t0);
    rows.push_back({detail::unit_pair(c.dim, c.value, -1.0, c.arg, slope),
                    std::max(0.0, slope * t0 - f0)});
  }
  rows.push_back({detail::unit_pair(c.dim, c.value, 0.0, c.arg, -1.0), -s.front()});
  rows.push_back({detail::unit_pair(c.dim, c.value, 0.0, c.arg, 1.0), s.back()});
  return PolyhedralConstraint(c.dim, std::move(rows));
}

/// The curve of {(x_v + 1)(x_a + 1) >= 1} on its convex branch through the
/// origin: x_v >= 1 / (x_a + 1) - 1 for x_a > -1.
inline EpigraphCurve hyperbola_curve(std::size_t dim, std::size_t value,
                                     std::size_t arg) {
  EpigraphCurve c;
  c.dim = dim;
  c.value = value;
  c.arg = arg;
  c.f = [](double t) { return 1.0 / (t + 1.0) - 1.0; };
  c.df = [](double t) { return -1.0 / ((t + 1.0) * (t + 1.0)); };
  return c;
}

/// Geometric grid from -1 + delta up to `upper` through 0, dense near the
/// asymptote.
inline std::vector<double> hyperbola_samples(double delta, double upper,
                                             int per_side = 12) {
  if (!(delta > 0.0 && delta < 1.0) || !(upper > 0.0))
    throw InvalidModel("hyperbola samples need 0 < delta < 1 and upper > 0");
  std::vector<double> ts;
  for (int k = 0; k <= per_side; ++k) {
    const double w = static_cast<double>(k) / per_side;
    ts.push_back(-1.0 + std::pow(delta, 1.0 - w)); // -1 + delta ... 0
    ts.push_back(std::expm1(w * std::log1p(upper))); // 0 ... upper
  }
  return ts;
}

} // namespace superhedge

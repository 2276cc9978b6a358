#pragma once

// Command-line front end. `run` parses arguments, executes one subcommand
// and returns the process exit code:
//   0 success, 2 I/O, 3 validation, 4 solver, 5 verification.

#include "superhedge/approximation.hpp"
#include "superhedge/diagnostics.hpp"
#include "superhedge/duality.hpp"
#include "superhedge/errors.hpp"
#include "superhedge/hedging.hpp"
#include "superhedge/io.hpp"
#include "superhedge/lp.hpp"
#include "superhedge/market_model.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace superhedge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitSolver = 4;
inline constexpr int kExitVerification = 5;

inline int exit_code(ErrorCategory c) {
  switch (c) {
  case ErrorCategory::Io:
    return kExitIo;
  case ErrorCategory::Validation:
    return kExitValidation;
  case ErrorCategory::Solver:
    return kExitSolver;
  case ErrorCategory::Verification:
    return kExitVerification;
  }
  return kExitSolver;
}

/// Full precision followed by a rounded column.
inline std::string show(double v) {
  if (std::isinf(v))
    return v > 0 ? "+inf" : "-inf";
  char full[64], rounded[64];
  std::snprintf(full, sizeof full, "%.17g", v);
  std::snprintf(rounded, sizeof rounded, "%.6f", v);
  return std::string(full) + "  (" + rounded + ")";
}

inline std::string show_vector(const Vector &v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    os << (i ? ", " : "") << buf;
  }
  os << "]";
  return os.str();
}

namespace detail {

struct Inputs {
  std::string model, claim, premium, out, emit_lp, verify;
};

inline MarketModel load_model(const std::string &path) {
  try {
    return io::model_from_json(io::read_json(path));
  } catch (const io::Json::exception &e) {
    throw InvalidModel("model '" + path + "': " + e.what());
  }
}

inline ClaimProcess load_claim(const ScenarioTree &tree, const std::string &path,
                               const char *what) {
  if (path.empty())
    return ClaimProcess::initial_unit(tree);
  try {
    return io::claim_from_json(tree, io::read_json(path));
  } catch (const io::Json::exception &e) {
    throw InvalidModel(std::string(what) + " '" + path + "': " + e.what());
  }
}

inline void emit_lp(const lp::LinearProgram &prog, const std::string &path) {
  if (path.empty())
    return;
  std::ofstream os(path);
  if (!os)
    throw IoError("cannot write '" + path + "'");
  lp::write_lp_format(prog, os);
}

inline double hedge_tolerance() { return 1e-8; }

} // namespace detail

// ---------------------------------------------------------------------------
// Subcommands.

inline int cmd_price(const detail::Inputs &in, const Tolerances &tol, std::ostream &out,
                     std::ostream &err) {
  const auto model = detail::load_model(in.model);
  const auto &tree = model.tree();
  const auto c = detail::load_claim(tree, in.claim, "claim");
  const auto p = detail::load_claim(tree, in.premium, "premium");
  if (!in.verify.empty()) {
    const auto report = io::read_json(in.verify);
    const double value = io::to_number(io::field(report, "value", "price report"), "value");
    if (!report.contains("portfolio")) {
      err << "price report carries no portfolio to verify\n";
      return kExitVerification;
    }
    const auto x = io::portfolio_from_json(tree, model.dim(), report.at("portfolio"));
    const double res = hedge_residual(model, c - value * p, x);
    out << "verify: hedge residual " << show(res) << "\n";
    if (!(res <= detail::hedge_tolerance())) {
      err << "verification failed: residual above 1e-8\n";
      return kExitVerification;
    }
    const auto fresh = superhedge_cost(model, c, p, tol);
    out << "verify: recomputed pi " << show(fresh.value) << "\n";
    if (fresh.status != PriceStatus::Finite ||
        std::abs(fresh.value - value) > 1e-8 * std::max(1.0, std::abs(value))) {
      err << "verification failed: stored value differs from recomputed pi\n";
      return kExitVerification;
    }
    out << "verification: PASS\n";
    return kExitOk;
  }
  detail::emit_lp(pricing_lp(model, c, p), in.emit_lp);
  const auto r = superhedge_cost(model, c, p, tol);
  out << "status: " << to_string(r.status) << "\n";
  out << "pi: " << show(r.value) << "\n";
  if (!in.out.empty())
    io::write_json(in.out, io::price_to_json(model, c, p, r));
  if (r.status == PriceStatus::MinusInfinity) {
    err << "diagnosis: " << r.diagnosis << "\n";
    return kExitVerification;
  }
  if (r.status == PriceStatus::PlusInfinity) {
    out << "diagnosis: " << r.diagnosis << "\n";
    return kExitOk;
  }
  for (std::size_t n = 0; n < tree.size(); ++n)
    if (!tree.is_terminal(n))
      out << "hedge " << tree.id(n) << ": " << show_vector(r.portfolio[n]) << "\n";
  out << "residual: " << show(r.residual) << "\n";
  if (!(r.residual <= detail::hedge_tolerance())) {
    err << "hedge residual above 1e-8\n";
    return kExitVerification;
  }
  return kExitOk;
}

inline int cmd_hedge(const detail::Inputs &in, const Tolerances &tol, std::ostream &out,
                     std::ostream &err) {
  const auto model = detail::load_model(in.model);
  const auto &tree = model.tree();
  const auto c = detail::load_claim(tree, in.claim, "claim");
  if (!in.verify.empty()) {
    const auto report = io::read_json(in.verify);
    if (!report.contains("portfolio")) {
      err << "hedge report carries no portfolio to verify\n";
      return kExitVerification;
    }
    const auto x = io::portfolio_from_json(tree, model.dim(), report.at("portfolio"));
    const double res = hedge_residual(model, c, x);
    out << "verify: hedge residual " << show(res) << "\n";
    if (!(res <= detail::hedge_tolerance())) {
      err << "verification failed: residual above 1e-8\n";
      return kExitVerification;
    }
    out << "verification: PASS\n";
    return kExitOk;
  }
  detail::emit_lp(superhedge::detail::assemble_hedge(model, c, false).lp, in.emit_lp);
  const auto r = membership(model, c, tol);
  out << "membership: " << to_string(r.status) << "\n";
  auto report = io::hedge_to_json(model, c, r);
  if (r.status == Membership::Member) {
    for (std::size_t n = 0; n < tree.size(); ++n)
      if (!tree.is_terminal(n))
        out << "hedge " << tree.id(n) << ": " << show_vector(r.portfolio[n]) << "\n";
    out << "residual: " << show(r.residual) << "\n";
  } else {
    const auto sep = bipolar_separation(model, c, tol);
    out << "separating deflator: pairing " << show(sep.pairing) << ", sigma "
        << show(sep.sigma) << "\n";
    report["separating_deflator"] = io::claim_to_json(tree, sep.y);
    report["pairing"] = sep.pairing;
    report["sigma"] = sep.sigma;
  }
  if (!in.out.empty())
    io::write_json(in.out, report);
  if (r.status == Membership::Member && !(r.residual <= detail::hedge_tolerance())) {
    err << "hedge residual above 1e-8\n";
    return kExitVerification;
  }
  return kExitOk;
}

inline int cmd_dual(const detail::Inputs &in, bool dual_lp, const Tolerances &tol,
                    std::ostream &out, std::ostream &err) {
  const auto model = detail::load_model(in.model);
  const auto &tree = model.tree();
  const auto c = detail::load_claim(tree, in.claim, "claim");
  const auto p = detail::load_claim(tree, in.premium, "premium");
  if (!in.verify.empty()) {
    const auto report = io::read_json(in.verify);
    const auto y = io::claim_from_json(tree, io::field(report, "deflator", "certificate"));
    const double stored_sigma =
        io::to_number(io::field(report, "sigma", "certificate"), "sigma");
    const double stored_price =
        io::to_number(io::field(report, "price", "certificate"), "price");
    bool ok = true;
    for (double v : y.values())
      ok = ok && v >= 0.0;
    const double norm = pairing(tree, p, y);
    const double sigma = support_function_C1(model, y, tol).value;
    const double value = pairing(tree, c, y) - sigma;
    const auto fresh = superhedge_cost(model, c, p, tol);
    out << "verify: pairing(p, y) " << show(norm) << "\n";
    out << "verify: sigma(y) " << show(sigma) << " (stored " << show(stored_sigma) << ")\n";
    out << "verify: pairing(c, y) - sigma(y) " << show(value) << "\n";
    out << "verify: recomputed pi " << show(fresh.value) << " (stored "
        << show(stored_price) << ")\n";
    const double scale = std::max(1.0, std::abs(fresh.value));
    ok = ok && std::abs(norm - 1.0) <= 1e-8 && std::isfinite(sigma) &&
         std::abs(sigma - stored_sigma) <= tol.duality_gap * std::max(1.0, sigma) &&
         fresh.status == PriceStatus::Finite &&
         std::abs(value - fresh.value) <= tol.duality_gap * scale &&
         std::abs(stored_price - fresh.value) <= tol.duality_gap * scale;
    if (!ok) {
      err << "verification failed\n";
      return kExitVerification;
    }
    out << "verification: PASS\n";
    return kExitOk;
  }
  const auto cert = extract_deflator(model, c, p, tol, dual_lp);
  out << "pi: " << show(cert.price) << "\n";
  out << "sigma(y): " << show(cert.sigma) << "\n";
  out << "pairing(c, y) - sigma(y): " << show(cert.value) << "\n";
  out << "pairing(p, y): " << show(cert.normalization) << "\n";
  out << "duality gap: " << show(cert.gap) << "\n";
  if (cert.dual_lp_value)
    out << "dual LP: " << show(*cert.dual_lp_value) << "\n";
  for (std::size_t n = 0; n < tree.size(); ++n) {
    out << "y " << tree.id(n) << ": " << show(cert.y[n]);
    if (cert.prices[n])
      out << "  prices " << show_vector(*cert.prices[n]);
    out << "\n";
  }
  if (model.conical()) {
    std::vector<Vector> s(tree.size(), Vector(model.dim(), 0.0));
    bool complete = true;
    for (std::size_t n = 0; n < tree.size(); ++n) {
      if (cert.prices[n])
        s[n] = *cert.prices[n];
      else
        complete = false;
    }
    if (complete) {
      const auto mr =
          martingale_residual(model, cert.y, PortfolioProcess(model.dim(), s), tol);
      out << "martingale residual: " << show(mr.max) << "\n";
    }
  }
  if (!in.out.empty())
    io::write_json(in.out, io::certificate_to_json(model, c, p, cert));
  out << "verification: PASS\n";
  return kExitOk;
}

inline int cmd_check(const detail::Inputs &in, const Tolerances &tol, std::ostream &out,
                     std::ostream &) {
  const auto model = detail::load_model(in.model);
  const auto &tree = model.tree();
  const auto p = detail::load_claim(tree, in.premium, "premium");
  const auto adm = premium_admissibility(model, p, tol);
  out << "premium: " << adm.note << "\n";
  const auto arb = arbitrage_check(model, tol);
  if (arb.found)
    out << "arbitrage: FOUND (expected payout " << show(arb.value) << ")\n";
  else
    out << "arbitrage: none\n";
  const auto cl = closedness_condition(model, tol);
  if (cl.satisfied) {
    out << "closedness condition: satisfied\n";
  } else {
    out << "closedness condition: VIOLATED at t=" << cl.first_violation_time << "\n";
    for (std::size_t n = 0; n < tree.size(); ++n)
      if (!cl.nodes[n].satisfied)
        out << "  node " << tree.id(n) << " direction "
            << show_vector(*cl.nodes[n].direction) << "\n";
  }
  const auto pp = positive_price_exists(model, tol);
  out << "positive price process: " << (pp.exists ? "yes" : "no") << "\n";
  out << "recession cone of D in R^J_+: " << (pp.recession_nonnegative ? "yes" : "no")
      << "\n";
  if (!in.out.empty()) {
    io::Json arb_json{{"found", arb.found}, {"value", arb.value}};
    if (arb.found) {
      arb_json["claim"] = io::claim_to_json(tree, arb.claim);
      arb_json["portfolio"] = io::portfolio_to_json(tree, arb.portfolio);
    }
    io::Json adm_json{{"admissible", adm.admissible},
                      {"minus_p_in_rc", adm.minus_p_in_rc},
                      {"p_in_rc", adm.p_in_rc},
                      {"p_in_pos", adm.p_in_pos},
                      {"note", adm.note}};
    io::write_json(in.out, {{"kind", "check"},
                            {"premium", adm_json},
                            {"arbitrage", arb_json},
                            {"closedness", io::closedness_to_json(tree, cl)},
                            {"positive_price", io::positive_price_to_json(tree, pp)}});
  }
  return kExitOk;
}

struct SweepOptions {
  std::string param = "scale";
  double from = 0.0, to = 1.0;
  int steps = 11;
  int jobs = 1;
};

inline int cmd_sweep(const detail::Inputs &in, const SweepOptions &opt,
                     const Tolerances &tol, std::ostream &out, std::ostream &) {
  if (opt.steps < 1)
    throw InvalidModel("sweep needs at least one step");
  if (opt.param != "scale" && opt.param != "depth")
    throw InvalidModel("sweep parameter must be 'scale' or 'depth'");
  const auto model = detail::load_model(in.model);
  const auto &tree = model.tree();
  const auto c = detail::load_claim(tree, in.claim, "claim");
  const auto p = detail::load_claim(tree, in.premium, "premium");
  std::vector<double> grid(static_cast<std::size_t>(opt.steps));
  for (int k = 0; k < opt.steps; ++k)
    grid[static_cast<std::size_t>(k)] =
        opt.steps == 1 ? opt.from
                       : opt.from + (opt.to - opt.from) * k / (opt.steps - 1);
  if (opt.param == "depth")
    for (double a : grid)
      if (!(a > 0.0))
        throw InvalidModel("depth values must be positive");
  std::vector<PriceResult> results(grid.size());
  std::vector<std::string> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      try {
        if (opt.param == "scale")
          results[k] = superhedge_cost(model, grid[k] * c, p, tol);
        else
          results[k] = superhedge_cost(model.with_scaled_costs(grid[k]), c, p, tol);
      } catch (const std::exception &e) {
        errors[k] = e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(grid.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (!errors[k].empty())
      throw NumericalFailure("sweep point " + std::to_string(grid[k]) + ": " + errors[k]);

  std::ostringstream csv;
  csv << opt.param << ",status,pi,pi_rounded\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    char a[64], v[64], r[64];
    std::snprintf(a, sizeof a, "%.17g", grid[k]);
    const double x = results[k].value;
    if (std::isinf(x)) {
      std::snprintf(v, sizeof v, "%s", x > 0 ? "inf" : "-inf");
      std::snprintf(r, sizeof r, "%s", v);
    } else {
      std::snprintf(v, sizeof v, "%.17g", x);
      std::snprintf(r, sizeof r, "%.6f", x);
    }
    csv << a << "," << to_string(results[k].status) << "," << v << "," << r << "\n";
  }
  if (in.out.empty()) {
    out << csv.str();
  } else {
    std::ofstream f(in.out);
    if (!f)
      throw IoError("cannot write '" + in.out + "'");
    f << csv.str();
    out << "wrote " << grid.size() << " points to " << in.out << "\n";
  }
  return kExitOk;
}

namespace detail {

// Smooth convex families understood by `approx`.
//   cost "quadratic":   S(x) = s.x + 1/2 sum q_j x_j^2
//   cost "exponential": S(x) = sum s_j (exp(k_j x_j) - 1) / k_j
//   constraint "ball":  |x - center|^2 <= r^2 (center 0 unless given)
//   constraint "hyperbola": x_value >= 1 / (x_arg + 1) - 1
inline io::Json approximate_cost(const io::Json &spec, std::size_t dim) {
  const auto kind = io::field(spec, "kind", "cost").get<std::string>();
  std::vector<Vector> samples;
  for (const auto &s : io::field(spec, "samples", "cost"))
    samples.push_back(io::to_vector(s, "cost sample"));
  ScalarFunction f;
  GradientFunction g;
  if (kind == "quadratic") {
    const auto s = io::to_vector(io::field(spec, "linear", "cost"), "linear");
    const auto q = io::to_vector(io::field(spec, "diag", "cost"), "diag");
    if (s.size() != dim || q.size() != dim)
      throw ShapeMismatch("quadratic cost coefficients need one entry per asset");
    f = [=](const Vector &x) {
      double v = 0.0;
      for (std::size_t j = 0; j < dim; ++j)
        v += s[j] * x[j] + 0.5 * q[j] * x[j] * x[j];
      return v;
    };
    g = [=](const Vector &x) {
      Vector out(dim);
      for (std::size_t j = 0; j < dim; ++j)
        out[j] = s[j] + q[j] * x[j];
      return out;
    };
  } else if (kind == "exponential") {
    const auto s = io::to_vector(io::field(spec, "linear", "cost"), "linear");
    const auto k = io::to_vector(io::field(spec, "rate", "cost"), "rate");
    if (s.size() != dim || k.size() != dim)
      throw ShapeMismatch("exponential cost coefficients need one entry per asset");
    for (double r : k)
      if (!(r > 0.0))
        throw InvalidModel("exponential cost rates must be positive");
    f = [=](const Vector &x) {
      double v = 0.0;
      for (std::size_t j = 0; j < dim; ++j)
        v += s[j] * std::expm1(k[j] * x[j]) / k[j];
      return v;
    };
    g = [=](const Vector &x) {
      Vector out(dim);
      for (std::size_t j = 0; j < dim; ++j)
        out[j] = s[j] * std::exp(k[j] * x[j]);
      return out;
    };
  } else {
    throw InvalidModel("unknown cost kind '" + kind + "'");
  }
  return io::cost_to_json(tangent_cost(f, g, samples, dim));
}

inline io::Json approximate_constraint(const io::Json &spec, std::size_t dim,
                                       const std::vector<double> &deltas) {
  const auto kind = io::field(spec, "kind", "constraint").get<std::string>();
  if (kind == "ball") {
    const double r = io::to_number(io::field(spec, "radius", "constraint"), "radius");
    const Vector center = spec.contains("center")
                              ? io::to_vector(spec.at("center"), "center")
                              : Vector(dim, 0.0);
    if (center.size() != dim)
      throw ShapeMismatch("ball center has wrong dimension");
    std::vector<Vector> samples;
    for (const auto &s : io::field(spec, "samples", "constraint"))
      samples.push_back(io::to_vector(s, "constraint sample"));
    auto phi = [=](const Vector &x) {
      double v = -r * r;
      for (std::size_t j = 0; j < dim; ++j)
        v += (x[j] - center[j]) * (x[j] - center[j]);
      return v;
    };
    auto grad = [=](const Vector &x) {
      Vector out(dim);
      for (std::size_t j = 0; j < dim; ++j)
        out[j] = 2.0 * (x[j] - center[j]);
      return out;
    };
    return {{"outer", io::constraint_to_json(tangent_constraint(phi, grad, samples, dim))}};
  }
  if (kind == "hyperbola") {
    const auto value = io::field(spec, "value", "constraint").get<std::size_t>();
    const auto arg = io::field(spec, "arg", "constraint").get<std::size_t>();
    if (value >= dim || arg >= dim || value == arg)
      throw InvalidModel("hyperbola coordinates out of range");
    const auto curve = hyperbola_curve(dim, value, arg);
    std::vector<double> ts{0.0};
    if (spec.contains("samples"))
      ts = io::to_vector(spec.at("samples"), "constraint samples");
    const double upper =
        spec.contains("upper") ? io::to_number(spec.at("upper"), "upper") : 50.0;
    io::Json out{{"outer", io::constraint_to_json(epigraph_outer(curve, ts, -1.0))}};
    io::Json inner = io::Json::array();
    for (double d : deltas)
      inner.push_back({{"delta", d},
                       {"constraint", io::constraint_to_json(epigraph_inner(
                                          curve, hyperbola_samples(d, upper)))}});
    out["inner"] = inner;
    return out;
  }
  throw InvalidModel("unknown constraint kind '" + kind + "'");
}

} // namespace detail

inline int cmd_approx(const std::string &input, const std::string &output,
                      const std::vector<double> &deltas, std::ostream &out, std::ostream &) {
  const auto spec = io::read_json(input);
  io::Json result = io::Json::object();
  try {
    const auto dim = io::field(spec, "dim", "approximation spec").get<std::size_t>();
    if (dim == 0)
      throw InvalidModel("approximation needs dim >= 1");
    if (spec.contains("cost"))
      result["cost"] = detail::approximate_cost(spec.at("cost"), dim);
    if (spec.contains("constraint"))
      result["constraint"] = detail::approximate_constraint(spec.at("constraint"), dim, deltas);
  } catch (const io::Json::exception &e) {
    throw InvalidModel(std::string("approximation spec: ") + e.what());
  }
  if (output.empty())
    out << result.dump(2) << "\n";
  else
    io::write_json(output, result);
  if (result.contains("cost"))
    out << "cost pieces: " << result["cost"]["terms"][0].size() << "\n";
  if (result.contains("constraint"))
    out << "outer constraint rows: " << result["constraint"]["outer"]["rows"].size() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Superhedging prices, hedges and dual certificates on scenario trees",
               "superhedge"};
  app.set_config("--config", "", "Key-value file with default option values");
  app.require_subcommand(1);

  Tolerances tol;
  app.add_option("--feasibility", tol.feasibility, "Primal feasibility tolerance")
      ->capture_default_str();
  app.add_option("--pivot", tol.pivot, "Smallest admissible pivot")->capture_default_str();
  app.add_option("--duality-gap", tol.duality_gap, "Relative duality gap tolerance")
      ->capture_default_str();
  app.add_option("--positivity", tol.positivity, "Strict positivity threshold")
      ->capture_default_str();
  app.add_option("--bland-after", tol.bland_after,
                 "Degenerate pivots before switching to Bland's rule")
      ->capture_default_str();
  app.add_option("--restarts", tol.restarts, "Solver restarts after a failed check")
      ->capture_default_str();

  detail::Inputs in;
  bool dual_lp = false;
  SweepOptions sweep;
  std::string approx_input;
  std::vector<double> deltas{0.1, 0.01, 0.001};

  auto model_inputs = [&](CLI::App *sub, bool claim, bool premium) {
    sub->add_option("--model", in.model, "Model JSON")->required();
    if (claim)
      sub->add_option("--claim", in.claim, "Claim process JSON")->required();
    if (premium)
      sub->add_option("--premium", in.premium,
                      "Premium process JSON (default: one unit at the root)");
  };
  auto *price = app.add_subcommand("price", "Superhedging cost of a claim");
  model_inputs(price, true, true);
  std::string price_out = "hedge.json";
  price->add_option("--out", price_out, "Write price report and hedge here ('' to skip)")
      ->capture_default_str();
  price->add_option("--emit-lp", in.emit_lp, "Dump the pricing LP in LP text format");
  price->add_option("--verify", in.verify, "Re-verify a stored price report");

  auto *hedge = app.add_subcommand("hedge", "Membership in C with certificate");
  model_inputs(hedge, true, false);
  hedge->add_option("--out", in.out, "Write hedge report here");
  hedge->add_option("--emit-lp", in.emit_lp, "Dump the membership LP in LP text format");
  hedge->add_option("--verify", in.verify, "Re-verify a stored hedge report");

  auto *dual = app.add_subcommand("dual", "Deflator certificate for the price");
  model_inputs(dual, true, true);
  dual->add_option("--out", in.out, "Write certificate here");
  dual->add_flag("--dual-lp", dual_lp, "Also solve the dual pricing LP as a cross-check");
  dual->add_option("--verify", in.verify, "Re-verify a stored certificate");

  auto *check = app.add_subcommand("check", "Admissibility, arbitrage and closedness");
  model_inputs(check, false, true);
  check->add_option("--out", in.out, "Write report here");

  auto *sw = app.add_subcommand("sweep", "CSV of pi over a parameter grid");
  model_inputs(sw, true, true);
  sw->add_option("--param", sweep.param, "scale (claim multiple) or depth (cost scaling)")
      ->check(CLI::IsMember({"scale", "depth"}))
      ->capture_default_str();
  sw->add_option("--from", sweep.from, "First grid value")->capture_default_str();
  sw->add_option("--to", sweep.to, "Last grid value")->capture_default_str();
  sw->add_option("--steps", sweep.steps, "Number of grid points")->capture_default_str();
  sw->add_option("--jobs", sweep.jobs, "Parallel solves")->capture_default_str();
  sw->add_option("--out", in.out, "CSV file (default: stdout)");

  auto *ap = app.add_subcommand("approx", "Polyhedral approximation of smooth data");
  ap->add_option("--input", approx_input, "Approximation spec JSON")->required();
  ap->add_option("--delta", deltas, "Inner approximation schedule")->capture_default_str();
  ap->add_option("--out", in.out, "Write approximation here (default: stdout)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (price->parsed()) {
      in.out = price_out;
      return cmd_price(in, tol, out, err);
    }
    if (hedge->parsed())
      return cmd_hedge(in, tol, out, err);
    if (dual->parsed())
      return cmd_dual(in, dual_lp, tol, out, err);
    if (check->parsed())
      return cmd_check(in, tol, out, err);
    if (sw->parsed())
      return cmd_sweep(in, sweep, tol, out, err);
    if (ap->parsed())
      return cmd_approx(approx_input, in.out, deltas, out, err);
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const io::Json::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

} // namespace superhedge::cli

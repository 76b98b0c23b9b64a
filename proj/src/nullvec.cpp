/**
 * @file nullvec.cpp
 * @brief Finite-difference application of the null-vector operators and the
 *        derived estimators / consistency checks.
 *
 * Stencil hygiene: every estimator routes evaluations through a memoizing
 * wrapper so overlapping stencils (the center point, shared first-derivative
 * probes) are computed once, and nested applications place the outer stencil
 * at three times the inner step so the outer difference does not resolve the
 * inner truncation error.
 */
#include "radsle/nullvec.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace radsle {

namespace {

double min_circular_gap(const std::vector<double>& theta) {
  double best = kTwoPi;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    for (std::size_t j = i + 1; j < theta.size(); ++j) {
      double d = std::fmod(std::fabs(theta[i] - theta[j]), kTwoPi);
      d = std::min(d, kTwoPi - d);
      best = std::min(best, d);
    }
  }
  return best;
}

void check_operator_args(const std::vector<double>& theta, int j, double kappa,
                         const FiniteDiffScheme& scheme) {
  if (!(kappa > 0.0)) throw std::domain_error("nullvec: kappa must be positive");
  if (j < 0 || j >= static_cast<int>(theta.size()))
    throw std::domain_error("nullvec: angle index out of range");
  if (theta.size() > 1) {
    const double gap = min_circular_gap(theta);
    if (2.0 * scheme.step >= 0.5 * gap)
      throw std::domain_error(
          "nullvec: finite-difference step too large for the angular gaps; "
          "the stencil could collide two angles");
  }
}

double diameter(const std::vector<cplx>& readings) {
  double d = 0.0;
  for (std::size_t i = 0; i < readings.size(); ++i)
    for (std::size_t j = i + 1; j < readings.size(); ++j)
      d = std::max(d, std::abs(readings[i] - readings[j]));
  return d;
}

cplx safe_center(const PsiFn& psi, const std::vector<double>& theta) {
  const cplx v = psi(theta);
  if (std::abs(v) < 1e-300)
    throw std::domain_error(
        "nullvec: |psi| vanishes at a sample configuration (degenerate "
        "normalization); choose different sample points");
  return v;
}

Estimate pool(const std::vector<cplx>& readings) {
  Estimate e;
  e.samples = static_cast<int>(readings.size());
  cplx mean = 0.0;
  for (const cplx& r : readings) mean += r;
  mean /= static_cast<double>(readings.size());
  e.value = mean.real();
  e.spread = diameter(readings);
  return e;
}

/** M_i F with analytic F derivatives and a supplied drift field. */
cplx apply_generator_analytic(const TestFunction& F, const std::vector<double>& theta,
                              int i, double kappa,
                              const std::function<cplx(const std::vector<double>&, int)>& drift) {
  const int n = static_cast<int>(theta.size());
  cplx acc = 0.5 * kappa * F.d2(theta, i, i);
  acc += drift(theta, i) * F.d1(theta, i);
  for (int k = 0; k < n; ++k) {
    if (k == i) continue;
    acc += 1.0 / std::tan(0.5 * (theta[k] - theta[i])) * F.d1(theta, k);
  }
  return acc;
}

/** M_i applied to a numeric field G by plain order-4 stencils at step h. */
cplx apply_generator_numeric(const PsiFn& G, const std::vector<double>& theta, int i,
                             double kappa, double h,
                             const std::function<cplx(const std::vector<double>&, int)>& drift) {
  const int n = static_cast<int>(theta.size());
  cplx acc = 0.5 * kappa * fd_partial2_single(G, theta, i, h, 4);
  acc += drift(theta, i) * fd_partial_single(G, theta, i, h, 4);
  for (int k = 0; k < n; ++k) {
    if (k == i) continue;
    acc += 1.0 / std::tan(0.5 * (theta[k] - theta[i])) * fd_partial_single(G, theta, k, h, 4);
  }
  return acc;
}

} // namespace

cplx apply_nullvec_operator(const PsiFn& psi, const std::vector<double>& theta, int j,
                            double kappa, const FiniteDiffScheme& scheme) {
  check_operator_args(theta, j, kappa, scheme);
  const int n = static_cast<int>(theta.size());
  cplx acc = 0.5 * kappa * fd_partial2(psi, theta, j, scheme);
  if (n == 1) return acc;
  const cplx center = psi(theta);
  const double pot = 0.25 * (1.0 - 6.0 / kappa);
  for (int k = 0; k < n; ++k) {
    if (k == j) continue;
    const double half = 0.5 * (theta[k] - theta[j]);
    acc += 1.0 / std::tan(half) * fd_partial(psi, theta, k, scheme);
    const double s = std::sin(half);
    acc += pot / (s * s) * center;
  }
  return acc;
}

Estimate estimate_h(const PsiFn& psi, double kappa,
                    const std::vector<std::vector<double>>& configs,
                    const FiniteDiffScheme& scheme) {
  if (configs.empty()) throw std::invalid_argument("estimate_h: no configurations supplied");
  const std::size_t n = configs.front().size();
  if (configs.size() * n < 3)
    throw std::invalid_argument(
        "estimate_h: need at least 3 pooled readings; supply more configurations");
  std::vector<cplx> readings;
  readings.reserve(configs.size() * n);
  for (const std::vector<double>& theta : configs) {
    if (theta.size() != n)
      throw std::invalid_argument("estimate_h: configurations must share one arity");
    const CachedPsi cached(psi);
    const PsiFn f = [&cached](const std::vector<double>& t) { return cached(t); };
    const cplx center = safe_center(f, theta);
    for (int j = 0; j < static_cast<int>(n); ++j)
      readings.push_back(apply_nullvec_operator(f, theta, j, kappa, scheme) / center);
  }
  return pool(readings);
}

Estimate estimate_omega(const PsiFn& psi, const std::vector<std::vector<double>>& configs,
                        const FiniteDiffScheme& scheme, double rigid_shift) {
  if (configs.empty()) throw std::invalid_argument("estimate_omega: no configurations supplied");
  std::vector<cplx> readings;
  for (const std::vector<double>& theta : configs) {
    const CachedPsi cached(psi);
    const PsiFn f = [&cached](const std::vector<double>& t) { return cached(t); };
    const cplx center = safe_center(f, theta);
    cplx grad = 0.0;
    for (int j = 0; j < static_cast<int>(theta.size()); ++j)
      grad += fd_partial(f, theta, j, scheme);
    readings.push_back(grad / center);
    if (rigid_shift > 0.0) {
      std::vector<double> shifted = theta;
      for (double& t : shifted) t += rigid_shift;
      readings.push_back(std::log(f(shifted) / center) / rigid_shift);
    }
  }
  return pool(readings);
}

WardReport check_ward(const WardEvaluator& ev, const std::vector<double>& xs, cplx u,
                      const FiniteDiffScheme& scheme, double lambda_interior_shift) {
  if (2.0 * scheme.step > ev.probe_radius())
    throw std::domain_error("check_ward: stencil exceeds the evaluator's probe radius");
  const int n = static_cast<int>(xs.size());
  const cplx us = std::conj(u);
  WardReport rep;
  rep.lambda_boundary = ev.lambda_boundary();
  rep.lambda_interior = ev.lambda_interior() + lambda_interior_shift;
  rep.value = ev.eval(xs, u, us);
  const double scale = std::abs(rep.value);
  if (scale < 1e-300)
    throw std::domain_error("check_ward: |J| vanishes at the evaluation point");

  const PsiFn on_x = [&](const std::vector<double>& x) { return ev.eval(x, u, us); };
  const CachedPsi cached(on_x);
  const PsiFn f = [&cached](const std::vector<double>& t) { return cached(t); };
  std::vector<cplx> dx(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) dx[static_cast<std::size_t>(j)] = fd_partial(f, xs, j, scheme);
  const cplx du = fd_path_d1([&](double t) { return ev.eval(xs, u + t, us); }, scheme);
  const cplx dus = fd_path_d1([&](double t) { return ev.eval(xs, u, us + t); }, scheme);

  const double lx = rep.lambda_boundary;
  const double lu = rep.lambda_interior;
  cplx trans = du + dus;
  cplx dil = u * du + lu * rep.value + us * dus + lu * rep.value;
  cplx spec = u * u * du + 2.0 * lu * u * rep.value + us * us * dus + 2.0 * lu * us * rep.value;
  for (int j = 0; j < n; ++j) {
    const cplx d = dx[static_cast<std::size_t>(j)];
    trans += d;
    dil += xs[static_cast<std::size_t>(j)] * d + lx * rep.value;
    spec += xs[static_cast<std::size_t>(j)] * xs[static_cast<std::size_t>(j)] * d +
            2.0 * lx * xs[static_cast<std::size_t>(j)] * rep.value;
  }
  rep.translation = std::abs(trans) / scale;
  rep.dilation = std::abs(dil) / scale;
  rep.special = std::abs(spec) / scale;
  return rep;
}

std::vector<TestFunction> default_test_functions() {
  std::vector<TestFunction> fam;
  { // exp of a trigonometric polynomial
    auto c = [](int k) { return 0.3 / (1.0 + k); };
    auto p = [](int k) { return 0.4 * k; };
    TestFunction f;
    f.value = [c, p](const std::vector<double>& th) {
      double s = 0.0;
      for (std::size_t k = 0; k < th.size(); ++k)
        s += c(static_cast<int>(k)) * std::sin(th[k] + p(static_cast<int>(k)));
      return std::exp(s);
    };
    f.d1 = [c, p, v = f.value](const std::vector<double>& th, int i) {
      return v(th) * c(i) * std::cos(th[static_cast<std::size_t>(i)] + p(i));
    };
    f.d2 = [c, p, v = f.value](const std::vector<double>& th, int i, int j) {
      const double gi = c(i) * std::cos(th[static_cast<std::size_t>(i)] + p(i));
      const double gj = c(j) * std::cos(th[static_cast<std::size_t>(j)] + p(j));
      double out = gi * gj;
      if (i == j) out += -c(i) * std::sin(th[static_cast<std::size_t>(i)] + p(i));
      return v(th) * out;
    };
    fam.push_back(std::move(f));
  }
  { // product of shifted sines, bounded away from zero
    auto r = [](int k) { return 0.25 + 0.3 * k; };
    auto g = [r](const std::vector<double>& th, int k) {
      return 2.0 + std::sin(th[static_cast<std::size_t>(k)] + r(k));
    };
    auto gp = [r](const std::vector<double>& th, int k) {
      return std::cos(th[static_cast<std::size_t>(k)] + r(k));
    };
    TestFunction f;
    f.value = [g](const std::vector<double>& th) {
      double v = 1.0;
      for (std::size_t k = 0; k < th.size(); ++k) v *= g(th, static_cast<int>(k));
      return v;
    };
    f.d1 = [g, gp, v = f.value](const std::vector<double>& th, int i) {
      return v(th) * gp(th, i) / g(th, i);
    };
    f.d2 = [g, gp, r, v = f.value](const std::vector<double>& th, int i, int j) {
      if (i != j) return v(th) * gp(th, i) / g(th, i) * gp(th, j) / g(th, j);
      const double gpp = -std::sin(th[static_cast<std::size_t>(i)] + r(i));
      return v(th) * gpp / g(th, i);
    };
    fam.push_back(std::move(f));
  }
  return fam;
}

CommutatorReport commutator_check_nullvec(const PsiFn& F, double kappa,
                                          const std::vector<std::vector<double>>& configs,
                                          const FiniteDiffScheme& inner) {
  CommutatorReport rep;
  // Outer stencil: plain (no Richardson).  Halving the outer step would
  // amplify the inner evaluation noise as delta_G / h^2 faster than it
  // removes truncation error, so accuracy comes from the inner scheme.
  const FiniteDiffScheme outer{3.0 * inner.step, inner.order, 1};
  for (const std::vector<double>& theta : configs) {
    const int n = static_cast<int>(theta.size());
    const CachedPsi cached(F);
    const PsiFn f = [&cached](const std::vector<double>& t) { return cached(t); };
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const PsiFn field_j = [&f, j, kappa, &inner](const std::vector<double>& t) {
          return apply_nullvec_operator(f, t, j, kappa, inner);
        };
        const PsiFn field_k = [&f, k, kappa, &inner](const std::vector<double>& t) {
          return apply_nullvec_operator(f, t, k, kappa, inner);
        };
        const cplx lhs = apply_nullvec_operator(field_k, theta, j, kappa, outer) -
                         apply_nullvec_operator(field_j, theta, k, kappa, outer);
        const double s = std::sin(0.5 * (theta[static_cast<std::size_t>(k)] -
                                         theta[static_cast<std::size_t>(j)]));
        const cplx rhs = (field_k(theta) - field_j(theta)) / (s * s);
        const double resid = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
        rep.max_residual = std::max(rep.max_residual, resid);
        ++rep.cases;
      }
    }
  }
  return rep;
}

CommutatorReport commutator_check_generators(const PsiFn& psi, double kappa,
                                             const std::vector<std::vector<double>>& configs,
                                             const FiniteDiffScheme& inner, bool zero_drift) {
  CommutatorReport rep;
  const double h_out = 3.0 * inner.step;
  const std::vector<TestFunction> fam = default_test_functions();
  for (const std::vector<double>& theta : configs) {
    const int n = static_cast<int>(theta.size());
    const CachedPsi cached(psi);
    const PsiFn f = [&cached](const std::vector<double>& t) { return cached(t); };
    const auto drift = [&f, kappa, zero_drift, &inner](const std::vector<double>& t,
                                                       int i) -> cplx {
      if (zero_drift) return 0.0;
      return kappa * fd_partial(f, t, i, inner) / f(t);
    };
    for (const TestFunction& F : fam) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const PsiFn field_i = [&](const std::vector<double>& t) {
            return apply_generator_analytic(F, t, i, kappa, drift);
          };
          const PsiFn field_j = [&](const std::vector<double>& t) {
            return apply_generator_analytic(F, t, j, kappa, drift);
          };
          const cplx lhs = apply_generator_numeric(field_j, theta, i, kappa, h_out, drift) -
                           apply_generator_numeric(field_i, theta, j, kappa, h_out, drift);
          const double s = std::sin(0.5 * (theta[static_cast<std::size_t>(j)] -
                                           theta[static_cast<std::size_t>(i)]));
          const cplx rhs = (field_j(theta) - field_i(theta)) / (s * s);
          const double resid = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
          rep.max_residual = std::max(rep.max_residual, resid);
          ++rep.cases;
        }
      }
    }
  }
  return rep;
}

} // namespace radsle

/**
 * @file quadrature.cpp
 * @brief Gauss-Legendre, periodic trapezoid, and tanh-sinh quadrature kernels.
 */
#include "radsle/quadrature.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace radsle {

namespace {

GaussRule compute_gauss_legendre(int n) {
  // Newton iteration on P_n with the Chebyshev-like initial guess; standard
  // Golub-Welsch alternatives are overkill for fixed small n.
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int mid = (n + 1) / 2;
  for (int i = 0; i < mid; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

cplx gl_panel(const std::function<cplx(double)>& f, const GaussRule& rule, double a, double b,
              long& evals) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx s{0.0, 0.0};
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    s += rule.weights[k] * f(c + h * rule.nodes[k]);
    ++evals;
  }
  return h * s;
}

struct AdaptiveState {
  const std::function<cplx(double)>* f;
  const GaussRule* rule;
  double rel_tol;
  double mag_floor; // running magnitude for relative acceptance
  long evals = 0;
  bool converged = true;
};

cplx adapt(AdaptiveState& st, double a, double b, cplx whole, double abs_tol, int depth) {
  const double m = 0.5 * (a + b);
  const cplx left = gl_panel(*st.f, *st.rule, a, m, st.evals);
  const cplx right = gl_panel(*st.f, *st.rule, m, b, st.evals);
  const double err = std::abs(whole - left - right);
  const double scale = std::max(st.mag_floor, std::abs(left) + std::abs(right));
  if (err <= abs_tol || err <= st.rel_tol * scale) return left + right;
  if (depth <= 0) {
    st.converged = false;
    return left + right;
  }
  return adapt(st, a, m, left, 0.5 * abs_tol, depth - 1) +
         adapt(st, m, b, right, 0.5 * abs_tol, depth - 1);
}

} // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 2) throw std::invalid_argument("gauss_legendre: need n >= 2");
  static std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

QuadResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                              double abs_tol, double rel_tol, int max_depth, int points) {
  QuadResult out;
  if (a == b) return out;
  const GaussRule& rule = gauss_legendre(points);
  AdaptiveState st{&f, &rule, rel_tol, 0.0, 0, true};
  const cplx whole = gl_panel(f, rule, a, b, st.evals);
  st.mag_floor = std::abs(whole);
  out.value = adapt(st, a, b, whole, abs_tol, max_depth);
  out.evals = st.evals;
  out.converged = st.converged;
  // Conservative estimate: repeat the top-level split on the final value.
  out.abs_error = abs_tol;
  return out;
}

QuadResult integrate_periodic(const std::function<void(int, std::vector<cplx>&)>& eval_pass,
                              double period, double abs_tol, int n0, int max_n) {
  QuadResult out;
  std::vector<cplx> vals;
  cplx prev{0.0, 0.0};
  bool have_prev = false;
  int stable = 0;
  for (int n = n0; n <= max_n; n *= 2) {
    vals.clear();
    eval_pass(n, vals);
    if (static_cast<int>(vals.size()) != n)
      throw std::logic_error("integrate_periodic: pass returned wrong point count");
    cplx s{0.0, 0.0};
    for (const cplx& v : vals) s += v;
    s *= period / static_cast<double>(n);
    out.evals += n;
    if (have_prev) {
      out.abs_error = std::abs(s - prev);
      if (out.abs_error <= abs_tol)
        ++stable;
      else
        stable = 0;
      if (stable >= 1) { // one clean doubling after agreement
        out.value = s;
        out.converged = true;
        return out;
      }
    }
    prev = s;
    have_prev = true;
  }
  out.value = prev;
  out.converged = false;
  return out;
}

QuadResult integrate_tanh_sinh(const std::function<cplx(double, double, double)>& f,
                               double a, double b, double abs_tol, int max_level) {
  QuadResult out;
  if (a == b) return out;
  const double half = 0.5 * (b - a);
  const double center = 0.5 * (a + b);

  auto level_sum = [&](double h) {
    // Sum over k of w_k f(x_k); terms decay double-exponentially in |k|.
    cplx s{0.0, 0.0};
    for (int sign = -1; sign <= 1; sign += 2) {
      int k = (sign < 0) ? -1 : 0;
      int dead = 0;
      while (true) {
        const double u = kPi / 2.0 * std::sinh(k * h);
        const double x = std::tanh(u);            // node on (-1, 1)
        const double ch = std::cosh(u);
        const double w = h * (kPi / 2.0) * std::cosh(k * h) / (ch * ch);
        // Distances to the endpoints without cancellation: 1 -+ x = 2/(e^{+-2u}+1).
        const double dist_b = half * 2.0 / (std::exp(2.0 * u) + 1.0);   // b - t
        const double dist_a = half * 2.0 / (std::exp(-2.0 * u) + 1.0);  // t - a
        if (dist_a <= 0.0 || dist_b <= 0.0) break; // underflow to the endpoint
        const double t = center + half * x;
        const cplx term = w * f(t, dist_a, dist_b);
        ++out.evals;
        s += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(s))) {
          if (++dead >= 3) break;
        } else {
          dead = 0;
        }
        if (std::abs(k) > 8.0 / h) break;
        k += sign;
      }
    }
    return half * s;
  };

  double h = 1.0;
  cplx prev = level_sum(h);
  for (int lvl = 1; lvl <= max_level; ++lvl) {
    h *= 0.5;
    const cplx cur = level_sum(h);
    out.abs_error = std::abs(cur - prev);
    if (out.abs_error <= abs_tol) {
      out.value = cur;
      out.converged = true;
      return out;
    }
    prev = cur;
  }
  out.value = prev;
  out.converged = false;
  return out;
}

} // namespace radsle

/**
 * @file quadrature.hpp
 * @brief Complex-valued quadrature: adaptive Gauss-Legendre panels, periodic
 *        trapezoid sums with N-doubling, and tanh-sinh for endpoint singularities.
 */
#pragma once

#include <array>
#include <functional>
#include <vector>

#include "radsle/params.hpp"

namespace radsle {

/** Result of a one-dimensional quadrature pass. */
struct QuadResult {
  cplx value{0.0, 0.0};
  double abs_error = 0.0; ///< internal error estimate (whole-vs-halves or pass difference)
  long evals = 0;         ///< number of integrand evaluations
  bool converged = true;
};

/** Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]. */
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/** Computes (and caches) the n-point Gauss-Legendre rule via Newton iteration. */
const GaussRule& gauss_legendre(int n);

/**
 * Adaptive composite Gauss-Legendre integration of f over [a, b].
 *
 * A panel is accepted when |GL(whole) - GL(left) - GL(right)| falls below the
 * local absolute tolerance (halved per level) or below rel_tol times the
 * running magnitude estimate; otherwise it is split. Evaluation points inside a
 * panel are ordered left-to-right so branch-walking integrands can continue
 * from panel-start snapshots.
 */
QuadResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                              double abs_tol = 1e-9, double rel_tol = 1e-10,
                              int max_depth = 28, int points = 16);

/**
 * Periodic trapezoid rule with N-doubling (spectrally convergent for analytic
 * periodic integrands). Each pass asks eval_pass(N, out) to fill out with the
 * integrand at t_k = period * k / N, k = 0..N-1, in increasing order; passes are
 * independent so callers may re-walk branch data from scratch every time.
 * Convergence: |I_N - I_{2N}| <= abs_tol for two consecutive doublings.
 */
QuadResult integrate_periodic(const std::function<void(int, std::vector<cplx>&)>& eval_pass,
                              double period, double abs_tol = 1e-9, int n0 = 16,
                              int max_n = 1 << 16);

/**
 * Tanh-sinh (double-exponential) integration over (a, b) tolerating integrable
 * endpoint singularities (t-a)^alpha, (b-t)^beta with Re alpha, Re beta > -1.
 * The integrand receives (t, da, db) where da = t - a and db = b - t are
 * computed in a cancellation-free way so singular factors stay accurate near
 * the endpoints.
 */
QuadResult integrate_tanh_sinh(const std::function<cplx(double, double, double)>& f,
                               double a, double b, double abs_tol = 1e-9, int max_level = 12);

} // namespace radsle

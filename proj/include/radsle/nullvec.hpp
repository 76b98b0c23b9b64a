/**
 * @file nullvec.hpp
 * @brief Null-vector differential operators, weight and rotation estimators,
 *        Ward-identity residuals, and commutator consistency checks.
 *
 * The second-order operator attached to the j-th marked angle is
 *
 *   L_j = (kappa/2) d_j^2
 *         + sum_{k != j} [ cot((theta_k - theta_j)/2) d_k
 *                          + (1 - 6/kappa) / (4 sin^2((theta_k - theta_j)/2)) ],
 *
 * with the sum absent for n = 1.  A correlation function of n one-leg
 * boundary fields solves the eigenproblem L_j psi = h psi for every j
 * simultaneously, h being the common weight; the rotation eigenvalue is
 * omega = sum_j d_j log psi (psi(theta + s 1) = e^{omega s} psi(theta)).
 *
 * Two exact commutation relations back the estimators:
 *   [L_j, L_k]   = csc^2((theta_k - theta_j)/2) (L_k - L_j)      (any smooth F),
 *   [M_i, M_j]   = csc^2((theta_j - theta_i)/2) (M_j - M_i)
 * where M_i = (kappa/2) d_i^2 + b_i d_i + sum_{k != i} cot((theta_k-theta_i)/2) d_k
 * and b_i = kappa d_i log psi.  The second holds precisely when psi is a
 * simultaneous eigenfunction (psi^{-1} L_i psi = M_i + h), which makes it a
 * sharp detector: with b = 0 it holds only at kappa = 6, where psi = 1 is an
 * eigenfunction of every L_i with h = 0.
 */
#pragma once

#include "radsle/fd.hpp"
#include "radsle/params.hpp"
#include "radsle/screening.hpp"

#include <functional>
#include <vector>

namespace radsle {

/**
 * Apply L_j to psi at theta by finite differences.  Throws std::domain_error
 * if the stencil could collide two angles (step too large for the chamber) or
 * if j is out of range.
 */
cplx apply_nullvec_operator(const PsiFn& psi, const std::vector<double>& theta,
                            int j, double kappa,
                            const FiniteDiffScheme& scheme = {});

/** A pooled scalar estimate together with the scatter of its readings. */
struct Estimate {
  double value = 0.0;  ///< mean of the real parts of all pooled readings
  double spread = 0.0; ///< diameter of the readings in the complex plane
  int samples = 0;     ///< number of pooled readings
};

/**
 * Estimate the weight h from the eigenvalue readings L_j psi / psi, pooled
 * over every j and every supplied configuration.  At least three readings are
 * required; configurations where |psi| < 1e-300 are rejected as degenerate.
 */
Estimate estimate_h(const PsiFn& psi, double kappa,
                    const std::vector<std::vector<double>>& configs,
                    const FiniteDiffScheme& scheme = {});

/**
 * Estimate the rotation eigenvalue omega = sum_j d_j psi / psi.  Each
 * configuration contributes the partial-derivative reading and, when
 * rigid_shift > 0, a second reading log(psi(theta + s 1)/psi(theta))/s that
 * cross-checks the stencils against a plain rigid rotation.
 */
Estimate estimate_omega(const PsiFn& psi,
                        const std::vector<std::vector<double>>& configs,
                        const FiniteDiffScheme& scheme = {},
                        double rigid_shift = 1e-2);

/** Scaled residuals of the three projective Ward identities. */
struct WardReport {
  double translation = 0.0; ///< |(sum_j d_j + d_u + d_u*) J| / |J|
  double dilation = 0.0;    ///< |(sum_j (x_j d_j + lam_x) + (u d_u + lam_u) + c.c.) J| / |J|
  double special = 0.0;     ///< |(sum_j (x_j^2 d_j + 2 lam_x x_j) + (u^2 d_u + 2 lam_u u) + c.c.) J| / |J|
  double lambda_boundary = 0.0;
  double lambda_interior = 0.0;
  cplx value{}; ///< J at the evaluation point
};

/**
 * Evaluate the translation / dilation / special-conformal residuals of the
 * half-plane master function at (xs, u, u* = conj u), differentiating u and
 * u* as independent variables.  lambda_interior_shift perturbs the interior
 * weight used in the generators (a falsification lever: a wrong weight must
 * produce a visibly nonzero dilation residual).
 */
WardReport check_ward(const WardEvaluator& ev, const std::vector<double>& xs,
                      cplx u, const FiniteDiffScheme& scheme = {1e-2, 4, 2},
                      double lambda_interior_shift = 0.0);

/** Smooth test function with analytic first and second partials. */
struct TestFunction {
  std::function<double(const std::vector<double>&)> value;
  std::function<double(const std::vector<double>&, int)> d1;
  std::function<double(const std::vector<double>&, int, int)> d2;
};

/** A small fixed family of generic smooth 2pi-periodic test functions. */
std::vector<TestFunction> default_test_functions();

struct CommutatorReport {
  double max_residual = 0.0; ///< max over cases of |lhs - rhs| / max(1, |rhs|)
  int cases = 0;
};

/**
 * Check the operator identity [L_j, L_k] F = csc^2((theta_k - theta_j)/2)
 * (L_k - L_j) F on the supplied smooth function F (any F: the identity does
 * not require F to be an eigenfunction).  Outer applications use a plain
 * stencil at three times the inner step so the two differentiations do not
 * share cancellation error; the default inner step 1e-2 balances the inner
 * truncation against its noise amplification through the outer stencil.
 */
CommutatorReport commutator_check_nullvec(const PsiFn& F, double kappa,
                                          const std::vector<std::vector<double>>& configs,
                                          const FiniteDiffScheme& inner = {1e-2, 4, 2});

/**
 * Check [M_i, M_j] = csc^2((theta_j - theta_i)/2) (M_j - M_i) applied to the
 * default test functions, with drifts b_i = kappa d_i log psi obtained from
 * psi by finite differences (or b = 0 when zero_drift is set, the negative
 * control that must fail away from kappa = 6).
 */
CommutatorReport commutator_check_generators(const PsiFn& psi, double kappa,
                                             const std::vector<std::vector<double>>& configs,
                                             const FiniteDiffScheme& inner = {1e-2, 4, 2},
                                             bool zero_drift = false);

} // namespace radsle

/**
 * @file screening.hpp
 * @brief Screened partition functions in the angular chart: four solution
 *        families assembled from a common Coulomb-gas integrand,
 *
 *          GroundJ   prefactor prod_{i<j} sin((theta_j-theta_i)/2)^{a^2},
 *                    one screening contour integral per link of the pattern
 *                    with puncture exponents -2a^2 and coupling exponents 4a^2;
 *          SpinJ     GroundJ times prod_i e^{(eta a^2/2) theta_i} and
 *                    e^{-eta a^2 zeta} per screening variable;
 *          ExcitedK  GroundJ times one extra variable w on a horizontal line
 *                    Im w = log(1/excited_radius) with factors
 *                    sin((w-theta_i)/2)^{+1} and sin((zeta-w)/2)^{-2}
 *                    (n must be even so the w-integrand is 2 pi periodic);
 *          ChordalL  n = 2k points with the last angle distinguished
 *                    (theta_c, charge 2b-a), pair exponent a(2b-a) = 1-6/kappa
 *                    towards it, m = k-1 screening integrals with
 *                    zeta-theta_c exponent 12/kappa - 2; the link pattern must
 *                    not attach to theta_c.
 *
 * Geometry is frozen at construction from the base configuration: screening
 * contours are planned once (clearance r = 0.1 x minimal circular gap,
 * Pochhammer depth (1+3L) r by nesting level L, rectangle fallback of
 * half-height r (1+0.8 L) when -4/kappa is an integer and every exponent at
 * the variable is integral). Subsequent evaluations may move each angle by at
 * most r/2, keeping every singularity on its own side of the frozen contours,
 * so finite-difference probes differentiate one smooth function.
 */
#pragma once

#include "radsle/fd.hpp"
#include "radsle/integrand.hpp"
#include "radsle/linkpattern.hpp"
#include "radsle/params.hpp"

#include <memory>
#include <string>
#include <vector>

namespace radsle {

enum class Family { GroundJ, ExcitedK, SpinJ, ChordalL };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

struct ScreeningSpec {
  Family family = Family::GroundJ;
  int n = 2;
  int m = 0;
  double kappa = 4.0;
  double eta = 0.0;            ///< SpinJ interior spin
  double excited_radius = 0.5; ///< ExcitedK: radius of the w-circle, in (0,1)
  LinkPattern pattern;         ///< optional; default = adjacent links (1 2)(3 4)...
  bool has_pattern = false;
  double quad_abs_tol = 1e-9;
  double quad_rel_tol = 1e-10;

  /** Family/argument validation; returns a human-readable warning or "". */
  std::string validate() const;
};

/** One-shot evaluation at theta (builds and discards the frozen geometry). */
cplx eval_psi(const ScreeningSpec& spec, const std::vector<double>& theta);

class ScreeningEvaluator {
 public:
  ScreeningEvaluator(const ScreeningSpec& spec, std::vector<double> base_theta);
  ~ScreeningEvaluator();
  ScreeningEvaluator(ScreeningEvaluator&&) noexcept;

  /** Evaluate at theta; every |theta_j - base_j| must be <= probe_radius(). */
  cplx eval(const std::vector<double>& theta) const;

  double probe_radius() const; ///< r/2
  double clearance() const;    ///< r = 0.1 x min circular gap of the base angles
  double last_abs_error() const;
  int num_integration_vars() const;
  const std::vector<Contour>& contours() const;
  const ScreeningSpec& spec() const;

  /** PsiFn view of this evaluator (no caching; wrap in CachedPsi as needed). */
  PsiFn as_psifn() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/** Fermionic ground product prod_{i<j} sin((theta_j-theta_i)/2)^{2/kappa}. */
cplx fermionic_ground(const std::vector<double>& theta, double kappa);

/** Analytic drift identity kappa d_j log psi = sum_{k != j} cot((theta_j-theta_k)/2). */
std::vector<double> fermionic_drift(const std::vector<double>& theta, double kappa);

/** Chordal two-point closed form sin((theta_2-theta_1)/2)^{1-6/kappa}. */
cplx chordal_two_point(const std::vector<double>& theta, double kappa);

/**
 * Endpoint-reduction prefactor (1 - e^{2 pi i alpha})(1 - e^{2 pi i beta}) for
 * collapsing a Pochhammer double loop around adjacent branch points onto the
 * open interval between them. Valid only if Re alpha, Re beta > -1 (throws
 * otherwise); an integral exponent makes the prefactor vanish identically.
 */
cplx reduction_prefactor(cplx alpha, cplx beta);

/**
 * Ward-identity master function in the half-plane chart with one interior
 * point u (and its mirror u*, treated as an independent variable): boundary
 * charges a at x_1..x_n, interior charge sigma_u = b - (n-2m) a / 2 at u and
 * u*, and m in {0, 1} screening integrals over a Pochhammer contour around
 * (x_1, x_2) in the plane chart.
 */
class WardEvaluator {
 public:
  WardEvaluator(std::vector<double> base_x, cplx base_u, double kappa, int m);
  ~WardEvaluator();

  cplx eval(const std::vector<double>& xs, cplx u, cplx ustar) const;
  double probe_radius() const;
  double lambda_boundary() const; ///< (6 - kappa) / (2 kappa)
  double lambda_interior() const; ///< lambda_b(sigma_u)

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace radsle

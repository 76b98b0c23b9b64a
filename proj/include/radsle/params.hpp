/**
 * @file params.hpp
 * @brief kappa-derived constants, charge divisors, neutrality checks and direct
 *        Coulomb-gas correlation products in sphere / half-plane / disk / angular
 *        coordinates.
 *
 * Conventions (pinned by the dimension table):
 *   a = sqrt(2/kappa),  b = a*(kappa/4 - 1),
 *   lambda_b(sigma) = sigma^2/2 - sigma*b,
 *   central charge  c = (3k-8)(6-k)/(2k),
 *   fugacity        n(k) = -2 cos(4*pi/k).
 * These give lambda_b(a) = (6-k)/(2k) and lambda_b(-2a) = lambda_b(2(a+b)) = 1,
 * i.e. both screening charges have conformal dimension one.
 */
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace radsle {

using cplx = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

/** kappa-derived constants; immutable after derive_params. */
struct KappaParams {
  double kappa = 0.0;
  double a = 0.0;              ///< sqrt(2/kappa)
  double b = 0.0;              ///< a*(kappa/4 - 1)
  double central_charge = 0.0; ///< (3k-8)(6-k)/(2k)
  double fugacity = 0.0;       ///< -2 cos(4*pi/kappa)
};

/** Derive all kappa constants. Throws std::domain_error for kappa <= 0. */
KappaParams derive_params(double kappa);

/** lambda_b(sigma) = sigma^2/2 - sigma*b (quadratic, symmetric about sigma = b). */
cplx conformal_dimension(cplx sigma, const KappaParams& p);

/**
 * Classical (kappa = 0) dimension. Primary normalization lambda0 = sigma^2 + 2*sigma;
 * the halved variant sigma^2/2 + 2*sigma sits behind the flag.
 */
double classical_dimension(double sigma, bool halved = false);

/** Where a charged point lives; Origin/Infinity are the special interior points. */
enum class PointKind { Boundary, Interior, Origin, Infinity };

/**
 * One charged point. For Boundary points in angular geometry `location.real()`
 * is the angle; elsewhere `location` is the complex coordinate. Origin/Infinity
 * ignore `location`.
 */
struct ChargedPoint {
  PointKind kind = PointKind::Boundary;
  cplx location{0.0, 0.0};
  cplx charge{0.0, 0.0};
};

/** Divisor sigma = sum sigma_j . z_j with pairwise distinct support. */
struct Divisor {
  std::vector<ChargedPoint> points;
  cplx total_charge() const;
};

/** Pair of divisors; sigma_minus is supported in the open domain (no boundary charge). */
struct DoubleDivisor {
  Divisor sigma_plus;
  Divisor sigma_minus;
};

enum class NeutralityMode { KappaPositive, Classical };

/** defect = sum(sigma) - 2b (kappa mode) or sum(sigma) + 2 (classical mode). */
struct NeutralityReport {
  bool ok = false;
  cplx defect{0.0, 0.0};
};

NeutralityReport check_neutrality(const Divisor& d, const KappaParams& p,
                                  NeutralityMode mode, double tol = 1e-12);

/** Ordered angle configuration theta_1 < ... < theta_n < theta_1 + 2*pi. */
struct ThetaConfig {
  std::vector<double> angles;

  ThetaConfig() = default;
  explicit ThetaConfig(std::vector<double> a) : angles(std::move(a)) {}

  int n() const { return static_cast<int>(angles.size()); }
  bool in_chamber() const;
  /** Smallest cyclic gap min(theta_{j+1}-theta_j, wraparound). */
  double min_gap() const;
  /** Throws std::invalid_argument unless strictly ordered within one period. */
  static ThetaConfig validated(std::vector<double> a);
};

enum class Geometry { Sphere, HalfPlane, Disk, Angular };

/**
 * Canonical-branch correlation product.
 *
 * angular:    prod_{j<k} sin((th_k-th_j)/2)^{s_j s_k} (canonical order j<k, positive
 *             base on the chamber) times the spin factor
 *             prod_j exp(i s_j (s_0 - s_inf) th_j / 2) when Origin/Infinity charges
 *             are present.
 * sphere:     prod_{j<k} (z_j - z_k)^{s_j s_k}, Infinity points contribute no factor.
 * half_plane: prod_{j<k} (z_j - z_k)^{s_j s_k} over the listed points.
 * disk:       boundary angles become e^{i th}; Origin charge sigma_0 contributes
 *             prod_j z_j^{s_j s_0}; Infinity contributes no factor.
 *
 * Complex powers use the principal log (canonical branch); coincident points raise
 * std::invalid_argument.
 */
cplx eval_correlation(const Divisor& d, Geometry geom);

/**
 * Double-divisor correlation with the reflection convention.
 * half_plane: upper points z_j (sigma_plus) against reflected points conj(z_k)
 *             (sigma_minus); the self-pair factor is (2 Im z_j)^{s_j^+ s_j^-} with the
 *             real positive base.
 * disk:       reflection z -> 1/conj(z); self-pair base the real positive 1 - |z_j|^2.
 */
cplx eval_correlation(const DoubleDivisor& dd, Geometry geom);

} // namespace radsle

/**
 * @file loewner.hpp
 * @brief Multiple radial Loewner chains: driving SDE with partition-function
 *        drifts, covering-map evolution, backward tip tracing, capacity
 *        diagnostics, and the statistics helpers used to verify them.
 *
 * Driving (Euler-Maruyama, capacity speeds nu_j >= 0):
 *
 *   d theta_j = nu_j kappa d_j log psi dt
 *             + sum_{k != j} nu_k cot((theta_j - theta_k)/2) dt
 *             + sqrt(kappa nu_j) dW_j,
 *
 * with independent per-curve noise streams derived from (seed, label_j), so
 * permuting (angle, label) pairs permutes the output paths identically.
 * Marked boundary points are passive: they follow the covering flow
 * d q = sum_j nu_j cot((q - theta_j)/2) dt.
 *
 * Covering map: d h_t(z)/dt = sum_j nu_j cot((h_t(z) - theta_j)/2), h_0 = id.
 * The capacity diagnostic log CR(t) = Im h_t(i Y) - Y (Y = proxy_y) decays at
 * rate -sum_j nu_j.  Tips are reconstructed by the reverse flow started at
 * theta_j(t) + i delta and reported in disk coordinates e^{i z}.
 */
#pragma once

#include "radsle/fd.hpp"
#include "radsle/params.hpp"
#include "radsle/rng.hpp"
#include "radsle/screening.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace radsle {

enum class DriftMode {
  ClosedFormFermionic, ///< kappa d_j log psi = sum_{k != j} cot((theta_j - theta_k)/2)
  NumericPsi,          ///< kappa d_j log psi by finite differences on cfg.psi
  RationalDivisor,     ///< marked charges sigma_q: terms (kappa a sigma_q / 2) cot
  SleKappaRho,         ///< user rho_q (resolved half convention): terms rho_q cot
  KappaZero            ///< kappa = 0, classical charges: terms 2 sigma_q cot
};

const char* drift_mode_name(DriftMode mode);
DriftMode drift_mode_from_name(const std::string& name);

struct MarkedPoint {
  double angle = 0.0;
  double sigma = 0.0; ///< kappa-units charge (RationalDivisor) or classical (KappaZero)
};

struct SimConfig {
  double kappa = 2.0;
  std::vector<double> theta0;  ///< initial angles, ascending, span < 2 pi
  std::vector<double> nu;      ///< capacity speeds; empty = all ones
  std::vector<int> labels;     ///< per-curve noise labels; empty = 0..n-1
  double t_end = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  DriftMode mode = DriftMode::ClosedFormFermionic;

  PsiFn psi;                              ///< NumericPsi only
  FiniteDiffScheme psi_scheme{2e-2, 4, 2};///< scheme for d_j log psi
  std::vector<MarkedPoint> marked;        ///< divisor / rho modes
  std::vector<double> rho;                ///< SleKappaRho: one per marked point

  double collision_eps = 1e-3; ///< halt when a circular gap falls below this
  double blowup_guard = 1e8;   ///< halt when |drift| exceeds this
  double proxy_y = 10.0;       ///< height of the capacity proxy point i Y
  double tip_offset = 1e-4;    ///< delta of the backward tip start theta + i delta
  int sample_stride = 10;      ///< tips / log CR recorded every stride-th step
  bool want_tips = true;
  bool want_log_cr = true;
};

struct SimResult {
  std::vector<double> times;               ///< fine grid (steps+1 entries)
  std::vector<std::vector<double>> theta;  ///< [time][curve] driving angles
  std::vector<std::vector<double>> marked; ///< [time][q] marked-point angles
  std::vector<double> sample_times;        ///< coarse grid for tips / log CR
  std::vector<double> log_cr;              ///< Im h_t(iY) - Y per sample
  std::vector<std::vector<cplx>> tips;     ///< [sample][curve] disk coords; NaN = missing
  std::vector<int> labels;                 ///< curve labels as simulated
  std::string halt_reason = "horizon";     ///< horizon | collision | blowup
  double t_halt = 0.0;
  int steps = 0;
  std::uint64_t rng_draws = 0;             ///< gaussians consumed (0 when kappa = 0)
};

/** Drift vector of the driving SDE at (theta, marked) under cfg's mode. */
std::vector<double> drift_vector(const SimConfig& cfg, const std::vector<double>& theta,
                                 const std::vector<double>& marked_angles);

/** Full pipeline: driving SDE, capacity series, tip traces. Deterministic. */
SimResult run_simulation(const SimConfig& cfg);

/**
 * Same as run_simulation but with caller-supplied standard-normal increments
 * gauss[step][curve] (noise = sqrt(kappa nu_j dt) gauss[i][j]), used by the
 * coupled strong-order test.  RNG streams are not touched.
 */
SimResult run_with_increments(const SimConfig& cfg,
                              const std::vector<std::vector<double>>& gauss);

/**
 * Evolve complex points under the covering flow along a simulated driving
 * path from t = 0 to the halt time.  A point is marked swallowed (NaN) once
 * it comes within tip_offset of a driving angle on the real axis.
 */
std::vector<cplx> evolve_covering_points(const SimResult& sim, const SimConfig& cfg,
                                         std::vector<cplx> points);

/**
 * PsiFn view of a screening evaluator that rebuilds its frozen geometry
 * whenever the requested configuration drifts to within rebuild_margin of the
 * probe radius (reserve 2 x the finite-difference step so whole stencils stay
 * inside the trusted patch).
 */
PsiFn adaptive_screening_psi(const ScreeningSpec& spec, double rebuild_margin = 0.0);

struct DriftEquivalenceReport {
  double ratio = 0.0;          ///< mean of per-config ratios (expected 1/2)
  double ratio_spread = 0.0;   ///< max - min of the ratios
  int configs = 0;
  double additivity_err = 0.0; ///< two marked points: |joint - sum of singles|
  double zero_sigma = 0.0;     ///< |kappa d_theta log Z| at sigma = 0
};

/**
 * Measure the ratio of kappa d_theta log Z (finite differences on the
 * Coulomb-gas angular correlation, one growth point and one marked point of
 * charge sigma) to the reference drift kappa a sigma cot((theta - q)/2),
 * over randomized configurations.
 */
DriftEquivalenceReport drift_equivalence_check(double kappa, int n_configs,
                                               std::uint64_t seed);

// --- statistics helpers -----------------------------------------------------

struct MomentReport {
  double mean = 0.0;
  double variance = 0.0; ///< unbiased sample variance
  double mean_z = 0.0;   ///< mean / (sigma_expected / sqrt(N))
  double var_z = 0.0;    ///< Wilson-Hilferty normal deviate of (N-1) s^2 / var
  int n = 0;
  /** Both deviates within the two-sided normal quantile (99%: 2.5758). */
  bool pass(double z_crit = 2.5758) const;
};

/** Test a sample against mean 0 and the expected variance. */
MomentReport moment_test(const std::vector<double>& xs, double var_expected);

/** Two-sample Kolmogorov-Smirnov statistic D = sup |F_a - F_b|. */
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/** Least-squares line fit y ~ slope x + intercept. */
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace radsle

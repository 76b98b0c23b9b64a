/**
 * @file constants.hpp
 * @brief Closed-form eigenvalues of the four solution families, the related
 *        Calogero-Sutherland energy law, and resolved convention constants.
 *
 * Null-vector eigenvalues (L_j psi = h psi) and rotation eigenvalues
 * (sum_j d_j psi = i omega psi, reported as the real coefficient omega):
 *
 *   GroundJ   h = (1 - (n - 2m)^2) / (2 kappa),            omega = 0
 *   ExcitedK  h = (1 - (n - 2m + kappa/2)^2) / (2 kappa),  omega = 0
 *   SpinJ     h = (1 + eta^2 - (n - 2m)^2) / (2 kappa),    omega = eta (n - 2m) / kappa
 *   ChordalL  h = (6 - kappa)(kappa - 2) / (8 kappa),      omega = 0
 *
 * Calogero-Sutherland energy of the gauged state psi~ = prod sin^{2/kappa} psi:
 *   E(h) = (n / kappa) (-h + (n^2 - 1) / (6 kappa)),
 * linear in h with slope -n/kappa; the intertwining gauge sign is +
 * (prod sin^{+2/kappa}; the opposite sign does not intertwine).
 */
#pragma once

#include "radsle/screening.hpp"

namespace radsle {

/** Library version reported in manifests. */
inline constexpr const char* kLibraryVersion = "0.1.0";

/** Resolved ratio of the measured drift kappa d log Z to kappa a sigma cot. */
inline constexpr double kResolvedDriftRatio = 0.5;

/** Gauge sign of the Calogero-Sutherland intertwiner prod sin^{sign 2/kappa}. */
inline constexpr int kResolvedCsGaugeSign = +1;

/** Closed-form null-vector eigenvalue h of a family. Throws on kappa <= 0. */
double family_h(Family family, int n, int m, double kappa, double eta = 0.0);

/** Closed-form rotation eigenvalue omega of a family. Throws on kappa <= 0. */
double family_omega(Family family, int n, int m, double kappa, double eta = 0.0);

/** Human-readable formula for family_h (plain text, no markup). */
const char* family_h_formula(Family family);

/** Human-readable formula for family_omega. */
const char* family_omega_formula(Family family);

/** Calogero-Sutherland energy law E(h) = (n/kappa)(-h + (n^2-1)/(6 kappa)). */
double cs_energy(int n, double kappa, double h);

} // namespace radsle

/**
 * @file constants.cpp
 * @brief Closed-form family eigenvalues and the Calogero-Sutherland energy law.
 */
#include "radsle/constants.hpp"

#include <stdexcept>

namespace radsle {

namespace {

void check_family_args(int n, int m, double kappa) {
  if (!(kappa > 0.0)) throw std::domain_error("family eigenvalue: kappa must be > 0");
  if (n < 1) throw std::invalid_argument("family eigenvalue: n must be >= 1");
  if (m < 0) throw std::invalid_argument("family eigenvalue: m must be >= 0");
}

} // namespace

double family_h(Family family, int n, int m, double kappa, double eta) {
  check_family_args(n, m, kappa);
  const double s = static_cast<double>(n - 2 * m);
  switch (family) {
    case Family::GroundJ: return (1.0 - s * s) / (2.0 * kappa);
    case Family::ExcitedK: {
      const double se = s + 0.5 * kappa;
      return (1.0 - se * se) / (2.0 * kappa);
    }
    case Family::SpinJ: return (1.0 + eta * eta - s * s) / (2.0 * kappa);
    case Family::ChordalL: return (6.0 - kappa) * (kappa - 2.0) / (8.0 * kappa);
  }
  throw std::invalid_argument("family_h: unknown family");
}

double family_omega(Family family, int n, int m, double kappa, double eta) {
  check_family_args(n, m, kappa);
  if (family == Family::SpinJ) return eta * static_cast<double>(n - 2 * m) / kappa;
  return 0.0;
}

const char* family_h_formula(Family family) {
  switch (family) {
    case Family::GroundJ: return "h = (1 - (n-2m)^2) / (2 kappa)";
    case Family::ExcitedK: return "h = (1 - (n-2m+kappa/2)^2) / (2 kappa)";
    case Family::SpinJ: return "h = (1 + eta^2 - (n-2m)^2) / (2 kappa)";
    case Family::ChordalL: return "h = (6-kappa)(kappa-2) / (8 kappa)";
  }
  return "";
}

const char* family_omega_formula(Family family) {
  if (family == Family::SpinJ) return "omega = eta (n-2m) / kappa";
  return "omega = 0";
}

double cs_energy(int n, double kappa, double h) {
  if (!(kappa > 0.0)) throw std::domain_error("cs_energy: kappa must be > 0");
  if (n < 1) throw std::invalid_argument("cs_energy: n must be >= 1");
  const double nn = static_cast<double>(n);
  return (nn / kappa) * (-h + (nn * nn - 1.0) / (6.0 * kappa));
}

} // namespace radsle

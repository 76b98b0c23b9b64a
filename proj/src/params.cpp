/**
 * @file params.cpp
 * @brief Implementation of kappa constants, neutrality and correlation products.
 */
#include "radsle/params.hpp"

#include <algorithm>
#include <cmath>

namespace radsle {

KappaParams derive_params(double kappa) {
  if (!(kappa > 0.0)) throw std::domain_error("derive_params: kappa must be positive");
  KappaParams p;
  p.kappa = kappa;
  p.a = std::sqrt(2.0 / kappa);
  p.b = p.a * (kappa / 4.0 - 1.0);
  p.central_charge = (3.0 * kappa - 8.0) * (6.0 - kappa) / (2.0 * kappa);
  p.fugacity = -2.0 * std::cos(4.0 * kPi / kappa);
  return p;
}

cplx conformal_dimension(cplx sigma, const KappaParams& p) {
  return sigma * sigma / 2.0 - sigma * p.b;
}

double classical_dimension(double sigma, bool halved) {
  return (halved ? sigma * sigma / 2.0 : sigma * sigma) + 2.0 * sigma;
}

cplx Divisor::total_charge() const {
  cplx s{0.0, 0.0};
  for (const auto& pt : points) s += pt.charge;
  return s;
}

NeutralityReport check_neutrality(const Divisor& d, const KappaParams& p,
                                  NeutralityMode mode, double tol) {
  NeutralityReport r;
  const cplx target = (mode == NeutralityMode::KappaPositive) ? cplx(2.0 * p.b, 0.0)
                                                              : cplx(-2.0, 0.0);
  r.defect = d.total_charge() - target;
  r.ok = std::abs(r.defect) <= tol;
  return r;
}

bool ThetaConfig::in_chamber() const {
  if (angles.size() < 2) return !angles.empty();
  for (std::size_t j = 1; j < angles.size(); ++j)
    if (!(angles[j] > angles[j - 1])) return false;
  return angles.back() < angles.front() + kTwoPi;
}

double ThetaConfig::min_gap() const {
  if (angles.size() < 2) return kTwoPi;
  double g = angles.front() + kTwoPi - angles.back();
  for (std::size_t j = 1; j < angles.size(); ++j)
    g = std::min(g, angles[j] - angles[j - 1]);
  return g;
}

ThetaConfig ThetaConfig::validated(std::vector<double> a) {
  ThetaConfig c(std::move(a));
  if (!c.in_chamber())
    throw std::invalid_argument("ThetaConfig: angles must satisfy th_1 < ... < th_n < th_1 + 2*pi");
  return c;
}

namespace {

cplx cpow_principal(cplx base, cplx expo) {
  if (base == cplx(0.0, 0.0)) throw std::invalid_argument("eval_correlation: coincident points");
  return std::exp(expo * std::log(base));
}

void require_distinct(const cplx& zj, const cplx& zk) {
  if (std::abs(zj - zk) < 1e-14)
    throw std::invalid_argument("eval_correlation: coincident points");
}

} // namespace

cplx eval_correlation(const Divisor& d, Geometry geom) {
  const auto& pts = d.points;
  cplx val{1.0, 0.0};

  if (geom == Geometry::Angular) {
    cplx sigma0{0.0, 0.0}, sigma_inf{0.0, 0.0};
    std::vector<const ChargedPoint*> bnd;
    for (const auto& pt : pts) {
      switch (pt.kind) {
        case PointKind::Boundary: bnd.push_back(&pt); break;
        case PointKind::Origin:   sigma0 += pt.charge; break;
        case PointKind::Infinity: sigma_inf += pt.charge; break;
        case PointKind::Interior:
          throw std::invalid_argument("eval_correlation(angular): interior points are not angles");
      }
    }
    for (std::size_t j = 0; j < bnd.size(); ++j)
      for (std::size_t k = j + 1; k < bnd.size(); ++k) {
        const double tj = bnd[j]->location.real(), tk = bnd[k]->location.real();
        const double s = std::sin((tk - tj) / 2.0);
        if (std::abs(s) < 1e-14)
          throw std::invalid_argument("eval_correlation(angular): coincident angles");
        val *= cpow_principal(cplx(s, 0.0), bnd[j]->charge * bnd[k]->charge);
      }
    const cplx dspin = sigma0 - sigma_inf;
    if (dspin != cplx(0.0, 0.0)) {
      const cplx i_half(0.0, 0.5);
      for (const auto* pb : bnd)
        val *= std::exp(i_half * pb->charge * dspin * pb->location.real());
    }
    return val;
  }

  if (geom == Geometry::Sphere || geom == Geometry::HalfPlane) {
    std::vector<const ChargedPoint*> fin;
    for (const auto& pt : pts)
      if (pt.kind != PointKind::Infinity)
        fin.push_back(&pt);
    for (std::size_t j = 0; j < fin.size(); ++j)
      for (std::size_t k = j + 1; k < fin.size(); ++k) {
        const cplx zj = (fin[j]->kind == PointKind::Origin) ? cplx(0.0, 0.0) : fin[j]->location;
        const cplx zk = (fin[k]->kind == PointKind::Origin) ? cplx(0.0, 0.0) : fin[k]->location;
        require_distinct(zj, zk);
        val *= cpow_principal(zj - zk, fin[j]->charge * fin[k]->charge);
      }
    return val;
  }

  // disk: boundary angles -> unit-circle points; Origin contributes z_j^{s_j s_0}.
  cplx sigma0{0.0, 0.0};
  std::vector<std::pair<cplx, cplx>> zc; // (position, charge)
  for (const auto& pt : pts) {
    switch (pt.kind) {
      case PointKind::Boundary:
        zc.emplace_back(std::exp(cplx(0.0, 1.0) * pt.location.real()), pt.charge);
        break;
      case PointKind::Interior: zc.emplace_back(pt.location, pt.charge); break;
      case PointKind::Origin:   sigma0 += pt.charge; break;
      case PointKind::Infinity: break;
    }
  }
  for (std::size_t j = 0; j < zc.size(); ++j)
    for (std::size_t k = j + 1; k < zc.size(); ++k) {
      require_distinct(zc[j].first, zc[k].first);
      val *= cpow_principal(zc[j].first - zc[k].first, zc[j].second * zc[k].second);
    }
  if (sigma0 != cplx(0.0, 0.0))
    for (const auto& [z, s] : zc) val *= cpow_principal(z, s * sigma0);
  return val;
}

cplx eval_correlation(const DoubleDivisor& dd, Geometry geom) {
  if (geom != Geometry::HalfPlane && geom != Geometry::Disk)
    throw std::invalid_argument("eval_correlation(double divisor): geometry must carry a reflection");
  for (const auto& pt : dd.sigma_minus.points)
    if (pt.kind == PointKind::Boundary)
      throw std::invalid_argument("eval_correlation: sigma_minus must be supported in the open domain");

  const bool half = (geom == Geometry::HalfPlane);
  auto reflect = [&](cplx z) { return half ? std::conj(z) : 1.0 / std::conj(z); };

  // Positions: plus points as given; minus points at their reflected locations.
  std::vector<std::pair<cplx, cplx>> plus, minus;
  for (const auto& pt : dd.sigma_plus.points) {
    cplx z = pt.location;
    if (geom == Geometry::Disk && pt.kind == PointKind::Boundary)
      z = std::exp(cplx(0.0, 1.0) * pt.location.real());
    plus.emplace_back(z, pt.charge);
  }
  for (const auto& pt : dd.sigma_minus.points)
    minus.emplace_back(reflect(pt.location), pt.charge);

  cplx val{1.0, 0.0};
  for (std::size_t j = 0; j < plus.size(); ++j)
    for (std::size_t k = j + 1; k < plus.size(); ++k) {
      require_distinct(plus[j].first, plus[k].first);
      val *= cpow_principal(plus[j].first - plus[k].first, plus[j].second * plus[k].second);
    }
  for (std::size_t j = 0; j < minus.size(); ++j)
    for (std::size_t k = j + 1; k < minus.size(); ++k) {
      require_distinct(minus[j].first, minus[k].first);
      val *= cpow_principal(minus[j].first - minus[k].first, minus[j].second * minus[k].second);
    }
  // Cross pairs; the j=j self pair uses the real positive base per the reflection
  // convention: (2 Im z) in the half-plane, (1 - |z|^2) in the disk.
  for (std::size_t j = 0; j < plus.size(); ++j)
    for (std::size_t k = 0; k < minus.size(); ++k) {
      const cplx expo = plus[j].second * minus[k].second;
      if (j == k && j < dd.sigma_minus.points.size() &&
          std::abs(dd.sigma_plus.points[j].location - dd.sigma_minus.points[k].location) < 1e-14) {
        const cplx z = dd.sigma_plus.points[j].location;
        const double base = half ? 2.0 * z.imag() : 1.0 - std::norm(z);
        if (!(base > 0.0))
          throw std::invalid_argument("eval_correlation: reflected self-pair requires an interior point");
        val *= cpow_principal(cplx(base, 0.0), expo);
      } else {
        require_distinct(plus[j].first, minus[k].first);
        val *= cpow_principal(plus[j].first - minus[k].first, expo);
      }
    }
  return val;
}

} // namespace radsle

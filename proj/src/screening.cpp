/**
 * @file screening.cpp
 * @brief Contour planning and frozen-geometry evaluation for the four families.
 */
#include "radsle/screening.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radsle {

std::string family_name(Family f) {
  switch (f) {
    case Family::GroundJ: return "ground";
    case Family::ExcitedK: return "excited";
    case Family::SpinJ: return "spin";
    case Family::ChordalL: return "chordal";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "ground") return Family::GroundJ;
  if (name == "excited") return Family::ExcitedK;
  if (name == "spin") return Family::SpinJ;
  if (name == "chordal") return Family::ChordalL;
  throw std::domain_error("unknown family '" + name + "' (ground|excited|spin|chordal)");
}

std::string ScreeningSpec::validate() const {
  if (n < 1) throw std::domain_error("screening: n must be >= 1");
  if (m < 0) throw std::domain_error("screening: m must be >= 0");
  if (!(kappa > 0)) throw std::domain_error("screening: kappa must be positive");
  std::string warning;
  switch (family) {
    case Family::GroundJ:
    case Family::SpinJ:
      if (2 * m > n) {
        if (2 * m > n + 2)
          throw std::domain_error("screening: m exceeds (n+2)/2");
        warning = "m exceeds n/2; screening contours will reuse the first link pair";
      }
      break;
    case Family::ExcitedK:
      if (n % 2 != 0)
        throw std::domain_error("excited family: n must be even (w-line periodicity)");
      if (2 * m > n) throw std::domain_error("excited family: need 2m <= n");
      if (!(excited_radius > 0.0 && excited_radius < 1.0))
        throw std::domain_error("excited family: excited_radius must lie in (0, 1)");
      break;
    case Family::ChordalL:
      if (n % 2 != 0) throw std::domain_error("chordal family: n must be even");
      if (m != n / 2 - 1) throw std::domain_error("chordal family: requires m = n/2 - 1");
      break;
  }
  if (has_pattern) {
    pattern.validate();
    if (pattern.n != n) throw std::domain_error("screening: pattern point count differs from n");
    if (family == Family::ChordalL) {
      for (const auto& [i, j] : pattern.links)
        if (i == n || j == n)
          throw std::domain_error("chordal family: pattern must not link the distinguished point");
    }
    const int need = std::min(m, n / 2);
    if (pattern.num_links() != need)
      throw std::domain_error("screening: pattern must have min(m, n/2) links");
  }
  return warning;
}

cplx fermionic_ground(const std::vector<double>& theta, double kappa) {
  const KappaParams kp = derive_params(kappa);
  const double a2 = kp.a * kp.a;
  double logv = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i)
    for (std::size_t j = i + 1; j < theta.size(); ++j) {
      const double s = std::sin((theta[j] - theta[i]) / 2.0);
      if (!(s > 0.0))
        throw std::domain_error("fermionic_ground: angles must be ascending with span < 2 pi");
      logv += a2 * std::log(s);
    }
  return std::exp(cplx(logv, 0.0));
}

std::vector<double> fermionic_drift(const std::vector<double>& theta, double kappa) {
  (void)derive_params(kappa);  // validates kappa; the identity itself is kappa-free
  const std::size_t n = theta.size();
  std::vector<double> d(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      d[j] += 1.0 / std::tan((theta[j] - theta[k]) / 2.0);
    }
  return d;
}

cplx chordal_two_point(const std::vector<double>& theta, double kappa) {
  if (theta.size() != 2) throw std::domain_error("chordal_two_point: needs exactly two angles");
  const double s = std::sin((theta[1] - theta[0]) / 2.0);
  if (!(s > 0.0)) throw std::domain_error("chordal_two_point: need 0 < theta_2 - theta_1 < 2 pi");
  return std::pow(cplx(s, 0.0), cplx(1.0 - 6.0 / kappa, 0.0));
}

cplx reduction_prefactor(cplx alpha, cplx beta) {
  if (!(alpha.real() > -1.0) || !(beta.real() > -1.0))
    throw std::domain_error("reduction_prefactor: endpoint exponents must have Re > -1");
  const cplx i2pi(0.0, kTwoPi);
  return (1.0 - std::exp(i2pi * alpha)) * (1.0 - std::exp(i2pi * beta));
}

namespace {

bool integer_exponents(double kappa) {
  const double e = -4.0 / kappa;  // the puncture exponent -2 a^2
  return std::abs(e - std::lround(e)) < 1e-9;
}

struct PlannedLevel {
  Contour contour;
  bool is_w = false;
  double span_len = 0.0;
  double lo = 0.0, hi = 0.0;
};

/// Finds an anchor in (lo + 2r, hi - 2r) at least 2r away from every puncture
/// translate and previously placed anchor translate.
double place_anchor(double lo, double hi, double r, const std::vector<double>& punctures,
                    const std::vector<double>& prior_anchors, bool periodic) {
  const double room = hi - lo - 4.0 * r;
  if (!(room > 0))
    throw std::domain_error("screening planner: link span too small to anchor a contour");
  const double start = (lo + hi) / 2.0;
  for (int k = 0; k < 64; ++k) {
    double cand = lo + 2.0 * r + std::fmod(start + 0.61803398875 * r * k - (lo + 2.0 * r),
                                           room);
    if (cand < lo + 2.0 * r) cand += room;
    bool ok = true;
    for (double x : punctures) {
      for (int t = -1; t <= 1 && ok; ++t)
        if (std::abs(cand - (x + (periodic ? kTwoPi * t : 0.0))) < 2.0 * r) ok = false;
      if (!ok) break;
    }
    if (ok)
      for (double x : prior_anchors) {
        for (int t = -1; t <= 1 && ok; ++t)
          if (std::abs(cand - (x + (periodic ? kTwoPi * t : 0.0))) < 2.0 * r) ok = false;
        if (!ok) break;
      }
    if (ok) return cand;
  }
  throw std::domain_error("screening planner: anchor placement failed");
}

} // namespace

struct ScreeningEvaluator::Impl {
  ScreeningSpec sp;
  KappaParams kp;
  std::vector<double> base;
  int n = 0, m = 0, M = 0;
  bool excited = false, chordal = false, spin = false;
  double r = 0.0, probe = 0.0;
  mutable double last_err = 0.0;

  std::vector<Contour> level_contours;
  struct PunFactor {
    int level;
    int pidx;
    cplx expo;
  };
  std::vector<PunFactor> pun;
  std::vector<Factor> couplings;
  std::vector<ExpFactor> exps;
  std::vector<std::vector<double>> pair_expo;  // [i][j], i < j
  double theta_exp_coeff = 0.0;

  void plan();
  cplx evaluate(const std::vector<double>& th) const;
};

void ScreeningEvaluator::Impl::plan() {
  (void)ThetaConfig::validated(base);
  const ThetaConfig cfg{base};
  n = static_cast<int>(base.size());
  if (n != sp.n) throw std::domain_error("screening: base configuration size differs from n");
  m = sp.m;
  excited = sp.family == Family::ExcitedK;
  chordal = sp.family == Family::ChordalL;
  spin = sp.family == Family::SpinJ;
  kp = derive_params(sp.kappa);
  r = 0.1 * cfg.min_gap();
  probe = r / 2.0;

  // ----- effective link list (pattern order, plus reused pairs when m > n/2)
  LinkPattern pat = sp.pattern;
  if (!sp.has_pattern) {
    pat = LinkPattern{};
    pat.kind = chordal ? PatternKind::Chordal : PatternKind::Radial;
    pat.n = n;
    const int nl = std::min(m, n / 2);
    for (int l = 0; l < nl; ++l) pat.links.emplace_back(2 * l + 1, 2 * l + 2);
    for (int k = 1; k <= n; ++k) {
      bool used = false;
      for (const auto& [i, j] : pat.links) used = used || (k == i || k == j);
      if (!used) pat.rays.push_back(k);
    }
    pat.face_link = -1;
    pat.validate();
  }
  std::vector<std::pair<int, int>> elinks;  // 1-based
  std::vector<bool> ewrap;
  for (std::size_t li = 0; li < pat.links.size(); ++li) {
    elinks.push_back(pat.links[li]);
    ewrap.push_back(pat.kind == PatternKind::Radial && pat.link_wraps(static_cast<int>(li)));
  }
  while (static_cast<int>(elinks.size()) < m) {
    // warned regime m > n/2: reuse the first pair at an extra nesting depth
    elinks.push_back(pat.links.empty() ? std::make_pair(1, 2) : pat.links[0]);
    ewrap.push_back(false);
  }

  // ----- spans, nesting levels, repeat counts
  const std::size_t L = elinks.size();
  std::vector<double> lo(L), hi(L);
  for (std::size_t l = 0; l < L; ++l) {
    const double ti = base[static_cast<std::size_t>(elinks[l].first - 1)];
    const double tj = base[static_cast<std::size_t>(elinks[l].second - 1)];
    if (ewrap[l]) {
      lo[l] = tj;
      hi[l] = ti + kTwoPi;
    } else {
      lo[l] = ti;
      hi[l] = tj;
    }
  }
  std::vector<int> depth_level(L, 0);
  for (std::size_t l = 0; l < L; ++l) {
    int lvl = 0;
    for (std::size_t k2 = 0; k2 < L; ++k2) {
      if (k2 == l) continue;
      const bool contains = lo[k2] < lo[l] - 1e-12 && hi[l] < hi[k2] - 1e-12;
      if (contains) ++lvl;
      if (k2 < l && lo[k2] == lo[l] && hi[k2] == hi[l]) ++lvl;  // reused pair
    }
    depth_level[l] = lvl;
  }

  // ----- contours
  const bool rect = integer_exponents(sp.kappa);
  std::vector<double> anchors;
  std::vector<Contour> zetas(L);
  std::vector<int> repeat_count(L, 0);
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t k2 = 0; k2 < l; ++k2)
      if (elinks[k2] == elinks[l]) ++repeat_count[l];
  double top_max = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    const double anchor = place_anchor(lo[l], hi[l], r, base, anchors, true);
    anchors.push_back(anchor);
    const int lvl = depth_level[l];
    if (rect) {
      const double hh = r * (1.0 + 0.8 * lvl);
      zetas[l] = make_rect_loop(lo[l], hi[l], hh, hh, anchor);
      top_max = std::max(top_max, hh);
    } else {
      const double radius = r * (1.0 + 0.25 * repeat_count[l]);
      const double depth = (1.0 + 3.0 * lvl) * r;
      zetas[l] = make_pochhammer(lo[l], hi[l], radius, std::max(depth, radius), anchor);
      top_max = std::max(top_max, radius);
    }
  }

  // ----- level ordering: w outermost, then links by descending span length
  std::vector<std::size_t> order(L);
  for (std::size_t l = 0; l < L; ++l) order[l] = l;
  std::sort(order.begin(), order.end(), [&](std::size_t A, std::size_t B) {
    const double sa = hi[A] - lo[A], sb = hi[B] - lo[B];
    if (sa != sb) return sa > sb;
    if (lo[A] != lo[B]) return lo[A] < lo[B];
    return A < B;
  });

  level_contours.clear();
  M = static_cast<int>(L) + (excited ? 1 : 0);
  if (excited) {
    const double H = std::log(1.0 / sp.excited_radius);
    if (!(H > 1.2 * top_max))
      throw std::domain_error(
          "excited family: w-line height log(1/excited_radius) too close to the screening "
          "contours; decrease excited_radius");
    level_contours.push_back(make_periodic_line(base[0], H, kTwoPi));
  }
  for (std::size_t oi = 0; oi < L; ++oi) level_contours.push_back(zetas[order[oi]]);

  // ----- factor tables
  const double a2 = kp.a * kp.a;
  pun.clear();
  couplings.clear();
  exps.clear();
  const int w_levels = excited ? 1 : 0;
  if (excited)
    for (int i = 0; i < n; ++i) pun.push_back({0, i, cplx(1.0, 0.0)});
  for (std::size_t oi = 0; oi < L; ++oi) {
    const int v = w_levels + static_cast<int>(oi);
    for (int i = 0; i < n; ++i) {
      const bool dist = chordal && i == n - 1;
      const cplx expo = dist ? cplx(12.0 / sp.kappa - 2.0, 0.0) : cplx(-2.0 * a2, 0.0);
      pun.push_back({v, i, expo});
    }
    if (excited) {
      Factor f;
      f.core = CoreKind::SinHalf;
      f.owner = v;
      f.outer = 0;
      f.exponent = cplx(-2.0, 0.0);
      couplings.push_back(f);
    }
    if (spin) exps.push_back(ExpFactor{v, cplx(-sp.eta * a2, 0.0)});
    for (std::size_t oj = 0; oj < oi; ++oj) {
      Factor f;
      f.core = CoreKind::SinHalf;
      f.owner = v;
      f.outer = w_levels + static_cast<int>(oj);
      f.exponent = cplx(4.0 * a2, 0.0);
      couplings.push_back(f);
    }
  }

  // ----- prefactor exponents
  pair_expo.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool dist = chordal && (j == n - 1);
      pair_expo[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          dist ? (1.0 - 6.0 / sp.kappa) : a2;
    }
  theta_exp_coeff = spin ? sp.eta * a2 / 2.0 : 0.0;

  // ----- geometric sanity: pairwise separation including 2 pi translates,
  //       and every outer contour clear of deeper anchors (branch transports)
  auto shifted = [](const Contour& c, double dx) {
    Contour s = c;
    for (auto& p : s.pieces) {
      p.a += dx;
      p.b += dx;
      p.center += dx;
    }
    return s;
  };
  const int zeta_begin = w_levels;
  for (int u = zeta_begin; u < M; ++u)
    for (int v = u + 1; v < M; ++v) {
      double dmin = 1e300;
      for (int t = -1; t <= 1; ++t)
        dmin = std::min(dmin, contour_min_distance(level_contours[static_cast<std::size_t>(u)],
                                                   shifted(level_contours[static_cast<std::size_t>(v)],
                                                           kTwoPi * t)));
      if (dmin < 0.1 * r)
        throw std::domain_error("screening planner: contours intersect (geometry check)");
      double amin = 1e300;
      for (int t = -1; t <= 1; ++t)
        amin = std::min(amin, contour_min_distance_to_point(
                                  level_contours[static_cast<std::size_t>(u)],
                                  level_contours[static_cast<std::size_t>(v)].anchor + kTwoPi * t));
      if (amin < 0.5 * r)
        throw std::domain_error("screening planner: contour passes a deeper anchor (transport check)");
    }
}

cplx ScreeningEvaluator::Impl::evaluate(const std::vector<double>& th) const {
  if (static_cast<int>(th.size()) != n)
    throw std::domain_error("screening eval: configuration size differs from n");
  for (int i = 0; i < n; ++i)
    if (std::abs(th[static_cast<std::size_t>(i)] - base[static_cast<std::size_t>(i)]) >
        probe + 1e-15)
      throw std::domain_error(
          "screening eval: angle moved beyond the frozen-geometry probe radius; "
          "rebuild the evaluator at the new base configuration");

  double logpref = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double e = pair_expo[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (e == 0.0) continue;
      const double s =
          std::sin((th[static_cast<std::size_t>(j)] - th[static_cast<std::size_t>(i)]) / 2.0);
      if (!(s > 0.0)) throw std::domain_error("screening eval: configuration left the chamber");
      logpref += e * std::log(s);
    }
    logpref += theta_exp_coeff * th[static_cast<std::size_t>(i)];
  }
  const cplx pref = std::exp(cplx(logpref, 0.0));
  if (M == 0) {
    last_err = 0.0;
    return pref;
  }

  IteratedIntegral ii;
  ii.num_vars = M;
  for (int k = 0; k < M; ++k) {
    LevelSpec lv;
    lv.contour = level_contours[static_cast<std::size_t>(k)];
    lv.abs_tol = std::max(sp.quad_abs_tol * std::pow(0.05, k), 1e-13);
    lv.rel_tol = std::max(sp.quad_rel_tol * std::pow(0.05, k), 1e-12);
    ii.levels.push_back(std::move(lv));
  }
  ii.factors = couplings;
  for (const auto& pf : pun) {
    Factor f;
    f.core = CoreKind::SinHalf;
    f.owner = pf.level;
    f.outer = -1;
    f.ref = cplx(th[static_cast<std::size_t>(pf.pidx)], 0.0);
    f.exponent = pf.expo;
    ii.factors.push_back(f);
  }
  ii.exps = exps;

  const QuadResult res = ii.evaluate();
  last_err = std::abs(pref) * res.abs_error;
  return pref * res.value;
}

ScreeningEvaluator::ScreeningEvaluator(const ScreeningSpec& spec, std::vector<double> base_theta)
    : impl_(std::make_unique<Impl>()) {
  impl_->sp = spec;
  (void)impl_->sp.validate();
  impl_->base = std::move(base_theta);
  impl_->plan();
}

ScreeningEvaluator::~ScreeningEvaluator() = default;
ScreeningEvaluator::ScreeningEvaluator(ScreeningEvaluator&&) noexcept = default;

cplx ScreeningEvaluator::eval(const std::vector<double>& theta) const {
  return impl_->evaluate(theta);
}

double ScreeningEvaluator::probe_radius() const { return impl_->probe; }
double ScreeningEvaluator::clearance() const { return impl_->r; }
double ScreeningEvaluator::last_abs_error() const { return impl_->last_err; }
int ScreeningEvaluator::num_integration_vars() const { return impl_->M; }
const std::vector<Contour>& ScreeningEvaluator::contours() const { return impl_->level_contours; }
const ScreeningSpec& ScreeningEvaluator::spec() const { return impl_->sp; }

PsiFn ScreeningEvaluator::as_psifn() const {
  const Impl* im = impl_.get();
  return [im](const std::vector<double>& th) { return im->evaluate(th); };
}

cplx eval_psi(const ScreeningSpec& spec, const std::vector<double>& theta) {
  ScreeningEvaluator ev(spec, theta);
  return ev.eval(theta);
}

// ---------------------------------------------------------------------------
// Ward master function in the half-plane chart
// ---------------------------------------------------------------------------

struct WardEvaluator::Impl {
  std::vector<double> bx;
  cplx bu;
  double kappa = 0.0;
  int m = 0;
  KappaParams kp;
  double sigma_u = 0.0;
  double r = 0.0, probe = 0.0;
  Contour contour;  // m == 1 only

  cplx evaluate(const std::vector<double>& xs, cplx u, cplx ustar) const {
    const int n = static_cast<int>(bx.size());
    if (static_cast<int>(xs.size()) != n)
      throw std::domain_error("ward eval: boundary point count changed");
    for (int i = 0; i < n; ++i)
      if (std::abs(xs[static_cast<std::size_t>(i)] - bx[static_cast<std::size_t>(i)]) > probe)
        throw std::domain_error("ward eval: boundary point beyond probe radius");
    if (std::abs(u - bu) > probe || std::abs(ustar - std::conj(bu)) > probe)
      throw std::domain_error("ward eval: interior point beyond probe radius");

    const double a = kp.a;
    const double a2 = a * a;
    cplx logpref = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        logpref += a2 * std::log(cplx(xs[static_cast<std::size_t>(j)] -
                                          xs[static_cast<std::size_t>(i)],
                                      0.0));
    for (int i = 0; i < n; ++i) {
      logpref += (a * sigma_u) * std::log(cplx(xs[static_cast<std::size_t>(i)], 0.0) - u);
      logpref += (a * sigma_u) * std::log(cplx(xs[static_cast<std::size_t>(i)], 0.0) - ustar);
    }
    logpref += (sigma_u * sigma_u) * std::log(u - ustar);
    const cplx pref = std::exp(logpref);
    if (m == 0) return pref;

    IteratedIntegral ii;
    ii.num_vars = 1;
    LevelSpec lv;
    lv.contour = contour;
    ii.levels.push_back(lv);
    for (int i = 0; i < n; ++i) {
      Factor f;
      f.core = CoreKind::Linear;
      f.owner = 0;
      f.ref = cplx(xs[static_cast<std::size_t>(i)], 0.0);
      f.exponent = cplx(-2.0 * a2, 0.0);
      ii.factors.push_back(f);
    }
    for (cplx p : {u, ustar}) {
      Factor f;
      f.core = CoreKind::Linear;
      f.owner = 0;
      f.ref = p;
      f.exponent = cplx(-2.0 * a * sigma_u, 0.0);
      ii.factors.push_back(f);
    }
    const QuadResult res = ii.evaluate();
    return pref * res.value;
  }
};

WardEvaluator::WardEvaluator(std::vector<double> base_x, cplx base_u, double kappa, int m)
    : impl_(std::make_unique<Impl>()) {
  if (m != 0 && m != 1) throw std::domain_error("ward: m must be 0 or 1");
  if (m == 1 && base_x.size() < 2)
    throw std::domain_error("ward: screening contour needs at least two boundary points");
  if (!(base_u.imag() > 0)) throw std::domain_error("ward: u must lie in the upper half-plane");
  impl_->bx = std::move(base_x);
  impl_->bu = base_u;
  impl_->kappa = kappa;
  impl_->m = m;
  impl_->kp = derive_params(kappa);
  const int n = static_cast<int>(impl_->bx.size());
  impl_->sigma_u = impl_->kp.b - (n - 2 * m) * impl_->kp.a / 2.0;

  double dmin = 2.0 * base_u.imag();  // |u - u*|
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j)
      dmin = std::min(dmin, std::abs(impl_->bx[static_cast<std::size_t>(j)] -
                                     impl_->bx[static_cast<std::size_t>(i)]));
    dmin = std::min(dmin, std::abs(cplx(impl_->bx[static_cast<std::size_t>(i)], 0.0) - base_u));
  }
  impl_->r = 0.1 * dmin;
  impl_->probe = impl_->r / 2.0;

  if (m == 1) {
    const double p = std::min(impl_->bx[0], impl_->bx[1]);
    const double q = std::max(impl_->bx[0], impl_->bx[1]);
    const double anchor = place_anchor(p, q, impl_->r, impl_->bx, {}, false);
    if (integer_exponents(kappa)) {
      impl_->contour = make_rect_loop(p, q, impl_->r, impl_->r, anchor);
    } else {
      impl_->contour = make_pochhammer(p, q, impl_->r, impl_->r, anchor);
    }
  }
}

WardEvaluator::~WardEvaluator() = default;

cplx WardEvaluator::eval(const std::vector<double>& xs, cplx u, cplx ustar) const {
  return impl_->evaluate(xs, u, ustar);
}

double WardEvaluator::probe_radius() const { return impl_->probe; }

double WardEvaluator::lambda_boundary() const {
  return (6.0 - impl_->kappa) / (2.0 * impl_->kappa);
}

double WardEvaluator::lambda_interior() const {
  return conformal_dimension(cplx(impl_->sigma_u, 0.0), impl_->kp).real();
}

} // namespace radsle

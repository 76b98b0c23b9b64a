/**
 * @file integrand.cpp
 * @brief Branch-continued evaluation of iterated screening integrals.
 */
#include "radsle/integrand.hpp"

#include <cmath>
#include <stdexcept>

namespace radsle {

namespace {
constexpr double kMaxArgStep = 0.785398163397448;  // pi/4
constexpr double kMinStep = 1e-12;
} // namespace

BranchWalker::BranchWalker(const Contour& path, std::vector<Tracked> tracked,
                           const std::vector<std::pair<std::size_t, cplx>>& preset_logs)
    : tracked_(std::move(tracked)) {
  all_ = path.lead_in;
  all_.insert(all_.end(), path.pieces.begin(), path.pieces.end());
  lead_ = static_cast<int>(path.lead_in.size());
  if (all_.empty()) throw std::domain_error("BranchWalker: empty contour");
  s_anchor_ = path.lead_in.empty() ? (path.kind == ContourKind::Interval
                                          ? path.anchor_s
                                          : 0.0)
                                   : 0.0;

  // principal logarithms at the anchor, overridden by handed-down values
  const cplx z0 = point_at(s_anchor_);
  std::vector<cplx> logs(tracked_.size());
  for (std::size_t i = 0; i < tracked_.size(); ++i) {
    cplx c = core_value(i, z0);
    if (!(std::abs(c) > 0.0))
      throw std::domain_error("BranchWalker: factor vanishes at the anchor");
    // A real anchor can give a real-negative core whose imaginary part is a
    // signed zero inherited from rounding; pin it to +0 so the branch choice
    // (arg = +pi, matching the interval-reduction endpoint convention) does
    // not flip between evaluations at nearby configurations.
    if (c.imag() == 0.0) c = cplx(c.real(), 0.0);
    logs[i] = std::log(c);
  }
  for (const auto& [idx, lv] : preset_logs) {
    if (idx >= logs.size()) throw std::domain_error("BranchWalker: preset index out of range");
    logs[idx] = lv;
  }
  snaps_.emplace(s_anchor_, std::move(logs));
}

cplx BranchWalker::point_at(double s) const {
  const double total = s_total();
  if (s < 0.0) s = 0.0;
  if (s > total) s = total;
  std::size_t idx = static_cast<std::size_t>(s);
  double t = s - static_cast<double>(idx);
  if (idx >= all_.size()) {
    idx = all_.size() - 1;
    t = 1.0;
  }
  return all_[idx].at(t);
}

cplx BranchWalker::deriv_at(double s) const {
  const double total = s_total();
  if (s < 0.0) s = 0.0;
  if (s > total) s = total;
  std::size_t idx = static_cast<std::size_t>(s);
  double t = s - static_cast<double>(idx);
  if (idx >= all_.size()) {
    idx = all_.size() - 1;
    t = 1.0;
  }
  return all_[idx].deriv(t);
}

cplx BranchWalker::core_value(std::size_t idx, cplx z) const {
  const Tracked& f = tracked_[idx];
  const cplx arg = f.negate ? (f.other - z) : (z - f.other);
  return f.core == CoreKind::SinHalf ? std::sin(arg / 2.0) : arg;
}

void BranchWalker::walk(double s_from, const std::vector<cplx>& logs_from, double s_to) {
  std::vector<cplx> logs = logs_from;
  const std::size_t nf = tracked_.size();
  std::vector<cplx> vals(nf);
  const cplx z_start = point_at(s_from);
  for (std::size_t i = 0; i < nf; ++i) vals[i] = core_value(i, z_start);

  double cur = s_from;
  while (cur != s_to) {
    double ds = s_to - cur;
    for (;;) {
      const double nxt = cur + ds;
      const cplx z = point_at(nxt);
      bool ok = true;
      for (std::size_t i = 0; i < nf; ++i) {
        const cplx c = core_value(i, z);
        const cplx ratio = c / vals[i];
        if (!(std::abs(ratio) > 0.0) || !std::isfinite(std::abs(ratio)) ||
            std::abs(std::arg(ratio)) > kMaxArgStep) {
          ok = false;
          break;
        }
      }
      if (ok) {
        for (std::size_t i = 0; i < nf; ++i) {
          const cplx c = core_value(i, z);
          logs[i] += std::log(c / vals[i]);
          vals[i] = c;
        }
        cur = nxt;
        break;
      }
      ds *= 0.5;
      if (std::abs(ds) < kMinStep)
        throw std::runtime_error("branch walk stalled (step below 1e-12)");
    }
  }
  scratch_ = logs;
  snaps_[s_to] = std::move(logs);
}

const std::vector<cplx>& BranchWalker::logs_at(double s) {
  auto it = snaps_.find(s);
  if (it != snaps_.end()) {
    scratch_ = it->second;
    return scratch_;
  }
  // nearest cached parameter on either side
  auto hi = snaps_.lower_bound(s);
  double best_s;
  if (hi == snaps_.end()) {
    best_s = std::prev(hi)->first;
  } else if (hi == snaps_.begin()) {
    best_s = hi->first;
  } else {
    const double above = hi->first;
    const double below = std::prev(hi)->first;
    best_s = (above - s) < (s - below) ? above : below;
  }
  walk(best_s, snaps_.at(best_s), s);
  return scratch_;
}

namespace {

struct Evaluator {
  const IteratedIntegral& ii;
  std::vector<std::vector<int>> own, trans, level_exps;
  std::vector<cplx> z_cur;
  double err_inner = 0.0;  // conservative propagated error

  explicit Evaluator(const IteratedIntegral& it) : ii(it) {
    const std::size_t L = ii.levels.size();
    own.resize(L);
    trans.resize(L);
    level_exps.resize(L);
    for (std::size_t fi = 0; fi < ii.factors.size(); ++fi) {
      const Factor& f = ii.factors[fi];
      if (f.owner < 0 || f.owner >= static_cast<int>(L))
        throw std::domain_error("iterated integral: factor owner out of range");
      if (f.outer >= f.owner)
        throw std::domain_error("iterated integral: coupling must point to an outer level");
      own[static_cast<std::size_t>(f.owner)].push_back(static_cast<int>(fi));
    }
    for (std::size_t fi = 0; fi < ii.factors.size(); ++fi) {
      const Factor& f = ii.factors[fi];
      if (f.outer >= 0) trans[static_cast<std::size_t>(f.outer)].push_back(static_cast<int>(fi));
    }
    for (std::size_t ei = 0; ei < ii.exps.size(); ++ei) {
      const ExpFactor& e = ii.exps[ei];
      if (e.var < 0 || e.var >= static_cast<int>(L))
        throw std::domain_error("iterated integral: exp factor variable out of range");
      level_exps[static_cast<std::size_t>(e.var)].push_back(static_cast<int>(ei));
    }
    z_cur.resize(L);
    for (std::size_t k = 0; k < L; ++k) z_cur[k] = ii.levels[k].contour.anchor;
  }

  QuadResult eval(std::size_t k, const std::unordered_map<int, cplx>& inherited) {
    const LevelSpec& lv = ii.levels[k];
    const Contour& C = lv.contour;

    // assemble the tracked-factor list: owned first, then transports
    std::vector<BranchWalker::Tracked> tracked;
    std::vector<int> tracked_fidx;
    std::vector<std::pair<std::size_t, cplx>> preset;
    for (int fi : own[k]) {
      if (lv.reduced && (fi == lv.endpoint_lo || fi == lv.endpoint_hi)) continue;
      const Factor& f = ii.factors[static_cast<std::size_t>(fi)];
      BranchWalker::Tracked t;
      t.core = f.core;
      t.negate = false;
      t.other = (f.outer >= 0) ? z_cur[static_cast<std::size_t>(f.outer)] : f.ref;
      if (f.outer >= 0) {
        const auto it = inherited.find(fi);
        if (it == inherited.end())
          throw std::logic_error("iterated integral: missing handed-down branch value");
        preset.emplace_back(tracked.size(), it->second);
      }
      tracked.push_back(t);
      tracked_fidx.push_back(fi);
    }
    const std::size_t n_owned = tracked.size();
    for (int fi : trans[k]) {
      const Factor& f = ii.factors[static_cast<std::size_t>(fi)];
      if (lv.reduced) throw std::logic_error("reduced level cannot carry transports");
      BranchWalker::Tracked t;
      t.core = f.core;
      t.negate = true;
      t.other = ii.levels[static_cast<std::size_t>(f.owner)].contour.anchor;
      tracked.push_back(t);
      tracked_fidx.push_back(fi);
    }

    BranchWalker walker(C, tracked, preset);
    const bool innermost = (k + 1 == ii.levels.size());

    double inner_err_max = 0.0;

    // integrand value at walker parameter s (excluding endpoint-reduced factors)
    auto value_at = [&](double s) -> cplx {
      const std::vector<cplx> logs = walker.logs_at(s);
      const cplx z = walker.point_at(s);
      cplx val = 1.0;
      for (std::size_t ti = 0; ti < n_owned; ++ti) {
        const Factor& f = ii.factors[static_cast<std::size_t>(tracked_fidx[ti])];
        val *= std::exp(f.exponent * logs[ti]);
      }
      for (int ei : level_exps[k]) val *= std::exp(ii.exps[static_cast<std::size_t>(ei)].coeff * z);
      if (!innermost) {
        z_cur[k] = z;
        std::unordered_map<int, cplx> down = inherited;
        for (std::size_t ti = n_owned; ti < tracked.size(); ++ti)
          down[tracked_fidx[ti]] = logs[ti];
        const QuadResult inner = eval(k + 1, down);
        inner_err_max = std::max(inner_err_max, inner.abs_error * std::abs(val));
        val *= inner.value;
      }
      return val;
    };

    QuadResult total;
    total.value = 0.0;
    total.abs_error = 0.0;
    const double s0 = walker.s_integrate_begin();

    if (lv.reduced) {
      if (C.kind != ContourKind::Interval)
        throw std::logic_error("reduced level must use an interval contour");
      const cplx p = C.pieces[0].a, q = C.pieces[0].b;
      const double L = std::abs(q - p);
      const cplx alpha = lv.endpoint_lo >= 0
                             ? ii.factors[static_cast<std::size_t>(lv.endpoint_lo)].exponent
                             : cplx(0.0);
      const cplx beta = lv.endpoint_hi >= 0
                            ? ii.factors[static_cast<std::size_t>(lv.endpoint_hi)].exponent
                            : cplx(0.0);
      auto f = [&](double t, double da, double db) -> cplx {
        cplx val = value_at(s0 + t) * walker.deriv_at(s0 + t);
        if (lv.endpoint_lo >= 0) {
          const Factor& flo = ii.factors[static_cast<std::size_t>(lv.endpoint_lo)];
          const double mag = (flo.core == CoreKind::SinHalf) ? std::sin(L * da / 2.0) : L * da;
          val *= std::exp(alpha * cplx(std::log(mag), 0.0));
        }
        if (lv.endpoint_hi >= 0) {
          const Factor& fhi = ii.factors[static_cast<std::size_t>(lv.endpoint_hi)];
          const double mag =
              (fhi.core == CoreKind::SinHalf) ? std::abs(std::sin(L * db / 2.0)) : L * db;
          val *= std::exp(beta * cplx(std::log(mag), kPi));
        }
        return val;
      };
      const QuadResult r = integrate_tanh_sinh(f, 0.0, 1.0, lv.abs_tol);
      total.value = lv.reduction_prefactor * r.value;
      total.abs_error = std::abs(lv.reduction_prefactor) * (r.abs_error + inner_err_max);
      total.evals = r.evals;
      total.converged = r.converged;
      return total;
    }

    if (C.kind == ContourKind::PeriodicLine) {
      if (!level_exps[k].empty())
        throw std::logic_error("periodic line cannot carry exponential factors");
      auto pass = [&](int N, std::vector<cplx>& out) {
        out.resize(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i)
          out[static_cast<std::size_t>(i)] = value_at(s0 + static_cast<double>(i) / N);
      };
      const QuadResult r = integrate_periodic(pass, C.period, lv.abs_tol);
      // periodicity check on the full product of tracked factors
      const std::vector<cplx> le = walker.logs_at(walker.s_total());
      const std::vector<cplx> lb = walker.logs_at(s0);
      cplx ratio = 1.0;
      for (std::size_t ti = 0; ti < tracked.size(); ++ti) {
        const Factor& f = ii.factors[static_cast<std::size_t>(tracked_fidx[ti])];
        ratio *= std::exp(f.exponent * (le[ti] - lb[ti]));
      }
      if (std::abs(ratio - 1.0) > 1e-9)
        throw std::runtime_error("periodic line integrand is not period-invariant");
      total = r;
      total.abs_error += inner_err_max * C.period;
      return total;
    }

    // piecewise adaptive panels (Pochhammer, rectangle, plain interval)
    const std::size_t n_pieces = C.pieces.size();
    for (std::size_t pi = 0; pi < n_pieces; ++pi) {
      auto f = [&](double t) -> cplx {
        const double s = s0 + static_cast<double>(pi) + t;
        return value_at(s) * walker.deriv_at(s);
      };
      const QuadResult r =
          integrate_adaptive(f, 0.0, 1.0, lv.abs_tol / 4.0, lv.rel_tol);
      total.value += r.value;
      total.abs_error += r.abs_error;
      total.evals += r.evals;
      total.converged = total.converged && r.converged;
    }
    total.abs_error += inner_err_max * static_cast<double>(n_pieces);

    if (C.closed) {
      const std::vector<cplx> le = walker.logs_at(walker.s_total());
      const std::vector<cplx> lb = walker.logs_at(s0);
      for (std::size_t ti = 0; ti < tracked.size(); ++ti) {
        const cplx d = le[ti] - lb[ti];
        if (C.kind == ContourKind::Pochhammer) {
          if (std::abs(d) > 1e-9)
            throw std::runtime_error("Pochhammer winding check failed: logarithm did not return");
        } else {
          const Factor& f = ii.factors[static_cast<std::size_t>(tracked_fidx[ti])];
          if (std::abs(std::exp(f.exponent * d) - 1.0) > 1e-8)
            throw std::runtime_error("loop winding check failed: factor value did not return");
        }
      }
    }
    return total;
  }
};

} // namespace

QuadResult IteratedIntegral::evaluate() const {
  if (levels.empty()) throw std::domain_error("iterated integral: no levels");
  if (static_cast<int>(levels.size()) != num_vars)
    throw std::domain_error("iterated integral: num_vars and levels disagree");
  Evaluator ev(*this);
  return ev.eval(0, {});
}

} // namespace radsle

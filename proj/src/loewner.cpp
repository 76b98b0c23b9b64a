/**
 * @file loewner.cpp
 * @brief Euler-Maruyama driving, RK4 covering-map flows with linear driving
 *        interpolation, adaptive backward tip tracing, the drift-equivalence
 *        measurement and the statistics helpers.
 */
#include "radsle/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>

namespace radsle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const cplx kMissingTip(kNaN, kNaN);

double cot_half(double x) { return 1.0 / std::tan(0.5 * x); }

/** cot((z)/2) with the asymptotic value -+i deep in the upper/lower strip. */
cplx cot_half_c(const cplx& z) {
  if (z.imag() > 80.0) return cplx(0.0, -1.0);
  if (z.imag() < -80.0) return cplx(0.0, 1.0);
  return std::cos(0.5 * z) / std::sin(0.5 * z);
}

/** Circular distance |theta - phi| reduced to [0, pi]. */
double circ_dist(double theta, double phi) {
  double d = std::remainder(theta - phi, kTwoPi);
  return std::fabs(d);
}

bool all_finite(const std::vector<double>& xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

/** Sum_j nu_j cot((z - theta_j)/2), the covering-map generator. */
cplx covering_field(const std::vector<double>& theta, const std::vector<double>& nu,
                    const cplx& z) {
  cplx acc(0.0, 0.0);
  for (std::size_t j = 0; j < theta.size(); ++j)
    acc += nu[j] * cot_half_c(z - theta[j]);
  return acc;
}

/** min_j |2 sin((z - theta_j)/2)|: periodic distance from z to the poles. */
double strip_distance(const std::vector<double>& theta, const cplx& z) {
  double d = std::numeric_limits<double>::infinity();
  for (double t : theta) d = std::min(d, std::abs(2.0 * std::sin(0.5 * (z - t))));
  return d;
}

/** Driving path on the uniform fine grid, linearly interpolated in time. */
struct PathView {
  const std::vector<double>* times = nullptr;
  const std::vector<std::vector<double>>* theta = nullptr;

  int last_index() const { return static_cast<int>(times->size()) - 1; }

  /** Largest k with times[k] < t (clamped so that k+1 is valid). */
  int interval_below(double t) const {
    const auto& ts = *times;
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    int k = static_cast<int>(it - ts.begin()) - 1;
    return std::clamp(k, 0, static_cast<int>(ts.size()) - 2);
  }

  void at(double t, std::vector<double>& out) const {
    const auto& ts = *times;
    const auto& th = *theta;
    if (t <= ts.front()) {
      out = th.front();
      return;
    }
    if (t >= ts.back()) {
      out = th.back();
      return;
    }
    const int k = interval_below(t);
    const double f = (t - ts[k]) / (ts[k + 1] - ts[k]);
    out.resize(th[k].size());
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = (1.0 - f) * th[k][j] + f * th[k + 1][j];
  }

  /** max_j |theta_j(k+1) - theta_j(k)| / dt inside interval k. */
  double pole_speed(int k) const {
    const auto& ts = *times;
    const auto& th = *theta;
    const double dt = ts[k + 1] - ts[k];
    double v = 0.0;
    for (std::size_t j = 0; j < th[k].size(); ++j)
      v = std::max(v, std::fabs(th[k + 1][j] - th[k][j]));
    return v / dt;
  }
};

/** One RK4 step of dz/dt = sum nu_j cot((z - theta_j(t))/2); h may be < 0. */
cplx rk4_covering(const PathView& path, const std::vector<double>& nu, cplx z, double t,
                  double h, std::vector<double>& scratch) {
  path.at(t, scratch);
  const cplx k1 = covering_field(scratch, nu, z);
  path.at(t + 0.5 * h, scratch);
  const cplx k2 = covering_field(scratch, nu, z + 0.5 * h * k1);
  const cplx k3 = covering_field(scratch, nu, z + 0.5 * h * k2);
  path.at(t + h, scratch);
  const cplx k4 = covering_field(scratch, nu, z + h * k3);
  return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/**
 * Reverse covering flow from theta_start + i delta at sample time times[i_s]
 * back to t = 0; returns the disk coordinate e^{iz} or NaN when the adaptive
 * stepper stalls (sample missing).  Steps never cross a fine-grid node, so
 * each RK4 stage sees one linear segment of the driving.
 */
cplx trace_tip_backward(const PathView& path, const std::vector<double>& nu, int i_s,
                        double theta_start, double delta) {
  const auto& ts = *path.times;
  cplx y(theta_start, delta);
  double s = ts[i_s];
  std::vector<double> scratch;
  long iterations = 0;
  while (s > 0.0) {
    if (++iterations > 2000000) return kMissingTip;
    const int k = path.interval_below(s);
    path.at(s, scratch);
    const double d = strip_distance(scratch, y);
    if (!(d > 0.0)) return kMissingTip;
    const cplx v = covering_field(scratch, nu, y);
    const double speed = std::abs(v) + path.pole_speed(k) + 1e-300;
    // never cross a fine-grid node: interval_below guarantees ts[k] < s
    double h = std::min({0.2 * d / speed, s - ts[k], s});
    if (!(h > 1e-13)) return kMissingTip;
    y = rk4_covering(path, nu, y, s, -h, scratch);
    s -= h;
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) return kMissingTip;
  }
  cplx tip = std::exp(cplx(0.0, 1.0) * y);
  const double r = std::abs(tip);
  if (r > 1.0) tip /= r;
  return tip;
}

/** Marked-point advection velocity dq/dt = sum_j nu_j cot((q - theta_j)/2). */
double marked_velocity(const std::vector<double>& theta, const std::vector<double>& nu,
                       double q) {
  double v = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) v += nu[j] * cot_half(q - theta[j]);
  return v;
}

enum class ChamberState { Ok, Collision, Blowup };

/**
 * Collision = any circular gap below eps: consecutive curve gaps (order
 * violations included), the 2 pi wraparound gap, and every marked-to-curve /
 * marked-to-marked distance.
 */
ChamberState chamber_state(const std::vector<double>& theta, const std::vector<double>& marked,
                           double eps) {
  if (!all_finite(theta) || !all_finite(marked)) return ChamberState::Blowup;
  const std::size_t n = theta.size();
  for (std::size_t j = 0; j + 1 < n; ++j)
    if (theta[j + 1] - theta[j] < eps) return ChamberState::Collision;
  if (n >= 2 && (theta.front() + kTwoPi) - theta.back() < eps) return ChamberState::Collision;
  for (std::size_t q = 0; q < marked.size(); ++q) {
    for (std::size_t j = 0; j < n; ++j)
      if (circ_dist(marked[q], theta[j]) < eps) return ChamberState::Collision;
    for (std::size_t p = q + 1; p < marked.size(); ++p)
      if (circ_dist(marked[q], marked[p]) < eps) return ChamberState::Collision;
  }
  return ChamberState::Ok;
}

struct Resolved {
  int n = 0;
  int steps = 0;
  std::vector<double> nu;
  std::vector<int> labels;
  std::vector<double> marked0;
  std::vector<double> marked_coef; ///< coefficient of cot((theta_j - q)/2), times nu_j
};

Resolved validate_config(const SimConfig& cfg) {
  Resolved r;
  r.n = static_cast<int>(cfg.theta0.size());
  if (r.n < 1) throw std::invalid_argument("SimConfig: need at least one curve");
  if (!(cfg.kappa >= 0.0) || !std::isfinite(cfg.kappa))
    throw std::invalid_argument("SimConfig: kappa must be finite and >= 0");
  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0))
    throw std::invalid_argument("SimConfig: dt and t_end must be positive");
  if (!(cfg.collision_eps > 0.0) || !(cfg.blowup_guard > 0.0))
    throw std::invalid_argument("SimConfig: collision_eps and blowup_guard must be positive");
  if (!(cfg.tip_offset > 0.0) || cfg.tip_offset >= 0.1)
    throw std::invalid_argument("SimConfig: tip_offset must lie in (0, 0.1)");
  if (!(cfg.proxy_y >= 1.0) || cfg.proxy_y > 300.0)
    throw std::invalid_argument("SimConfig: proxy_y must lie in [1, 300]");
  if (cfg.sample_stride < 1) throw std::invalid_argument("SimConfig: sample_stride must be >= 1");

  const double raw_steps = cfg.t_end / cfg.dt;
  const long long steps = std::llround(raw_steps);
  if (steps < 1 || steps > 2000000)
    throw std::invalid_argument("SimConfig: step count out of range [1, 2e6]");
  if (std::fabs(static_cast<double>(steps) * cfg.dt - cfg.t_end) >
      1e-9 * std::max(1.0, cfg.t_end))
    throw std::invalid_argument("SimConfig: t_end must be an integral multiple of dt");
  r.steps = static_cast<int>(steps);

  if (!all_finite(cfg.theta0)) throw std::invalid_argument("SimConfig: non-finite angle");
  for (int j = 0; j + 1 < r.n; ++j)
    if (!(cfg.theta0[j] < cfg.theta0[j + 1]))
      throw std::invalid_argument("SimConfig: initial angles must be strictly increasing");
  if (r.n >= 2) {
    double min_gap = (cfg.theta0.front() + kTwoPi) - cfg.theta0.back();
    for (int j = 0; j + 1 < r.n; ++j) min_gap = std::min(min_gap, cfg.theta0[j + 1] - cfg.theta0[j]);
    if (!(min_gap > 10.0 * cfg.collision_eps))
      throw std::invalid_argument(
          "SimConfig: initial circular gaps must exceed 10 x collision_eps");
  }

  r.nu = cfg.nu;
  if (r.nu.empty()) r.nu.assign(r.n, 1.0);
  if (static_cast<int>(r.nu.size()) != r.n)
    throw std::invalid_argument("SimConfig: nu size mismatch");
  for (double v : r.nu)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("SimConfig: nu must be >= 0");

  r.labels = cfg.labels;
  if (r.labels.empty()) {
    r.labels.resize(r.n);
    for (int j = 0; j < r.n; ++j) r.labels[j] = j;
  }
  if (static_cast<int>(r.labels.size()) != r.n)
    throw std::invalid_argument("SimConfig: labels size mismatch");
  {
    std::vector<int> sorted = r.labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("SimConfig: labels must be pairwise distinct");
  }

  r.marked0.reserve(cfg.marked.size());
  for (const MarkedPoint& q : cfg.marked) {
    if (!std::isfinite(q.angle) || !std::isfinite(q.sigma))
      throw std::invalid_argument("SimConfig: non-finite marked point");
    r.marked0.push_back(q.angle);
  }
  for (std::size_t q = 0; q < r.marked0.size(); ++q) {
    for (int j = 0; j < r.n; ++j)
      if (circ_dist(r.marked0[q], cfg.theta0[j]) <= cfg.collision_eps)
        throw std::invalid_argument("SimConfig: marked point too close to a curve");
    for (std::size_t p = q + 1; p < r.marked0.size(); ++p)
      if (circ_dist(r.marked0[q], r.marked0[p]) <= cfg.collision_eps)
        throw std::invalid_argument("SimConfig: marked points too close together");
  }

  switch (cfg.mode) {
    case DriftMode::ClosedFormFermionic:
      if (!cfg.marked.empty())
        throw std::invalid_argument("closed_form_fermionic takes no marked points");
      break;
    case DriftMode::NumericPsi:
      if (!cfg.psi) throw std::invalid_argument("numeric_psi requires cfg.psi");
      if (!cfg.marked.empty())
        throw std::invalid_argument("numeric_psi: fold marked points into psi itself");
      if (!(cfg.psi_scheme.step > 0.0) ||
          (cfg.psi_scheme.order != 2 && cfg.psi_scheme.order != 4) ||
          cfg.psi_scheme.richardson_levels < 1)
        throw std::invalid_argument("numeric_psi: invalid finite-difference scheme");
      break;
    case DriftMode::RationalDivisor: {
      if (!(cfg.kappa > 0.0)) throw std::invalid_argument("rational mode requires kappa > 0");
      const KappaParams p = derive_params(cfg.kappa);
      for (const MarkedPoint& q : cfg.marked)
        r.marked_coef.push_back(0.5 * cfg.kappa * p.a * q.sigma);
      break;
    }
    case DriftMode::SleKappaRho:
      if (cfg.rho.size() != cfg.marked.size())
        throw std::invalid_argument("sle_kappa_rho: need one rho per marked point");
      r.marked_coef = cfg.rho;
      break;
    case DriftMode::KappaZero:
      if (cfg.kappa != 0.0) throw std::invalid_argument("kappa_zero mode requires kappa == 0");
      for (const MarkedPoint& q : cfg.marked) r.marked_coef.push_back(2.0 * q.sigma);
      break;
  }
  return r;
}

/**
 * Drift of theta_j: nu_j kappa d_j log psi + sum_{k != j} nu_k cot(.).  For
 * the closed-form families kappa d_j log psi = sum_{k != j} cot(.) plus
 * coef_q cot((theta_j - q)/2) per marked point, so curve pairs contribute
 * (nu_j + nu_k) cot((theta_j - theta_k)/2).
 */
void drift_impl(const SimConfig& cfg, const Resolved& res, const std::vector<double>& theta,
                const std::vector<double>& marked, std::vector<double>& out) {
  const int n = res.n;
  out.assign(n, 0.0);
  if (cfg.mode == DriftMode::NumericPsi) {
    const CachedPsi cached(cfg.psi);
    const PsiFn f = cached;
    const cplx center = f(theta);
    if (!(std::abs(center) > 0.0))
      throw std::domain_error("numeric_psi drift: psi vanishes at the current configuration");
    for (int j = 0; j < n; ++j) {
      const cplx grad = fd_partial(f, theta, j, cfg.psi_scheme);
      out[j] = res.nu[j] * cfg.kappa * (grad / center).real();
      for (int k = 0; k < n; ++k)
        if (k != j) out[j] += res.nu[k] * cot_half(theta[j] - theta[k]);
    }
    return;
  }
  for (int j = 0; j < n; ++j) {
    double d = 0.0;
    for (int k = 0; k < n; ++k)
      if (k != j) d += (res.nu[j] + res.nu[k]) * cot_half(theta[j] - theta[k]);
    for (std::size_t q = 0; q < res.marked_coef.size(); ++q)
      d += res.nu[j] * res.marked_coef[q] * cot_half(theta[j] - marked[q]);
    out[j] = d;
  }
}

using NoiseFn = std::function<void(int step, std::vector<double>& out)>;

/** Shared driver: EM driving + marked advection, then diagnostics. */
SimResult run_core(const SimConfig& cfg, const Resolved& res, const NoiseFn* noise) {
  const int n = res.n;
  SimResult out;
  out.labels = res.labels;
  out.times.reserve(res.steps + 1);
  out.theta.reserve(res.steps + 1);
  out.times.push_back(0.0);
  out.theta.push_back(cfg.theta0);
  out.marked.push_back(res.marked0);

  std::vector<double> noise_amp(n, 0.0);
  const bool noisy = cfg.kappa > 0.0;
  for (int j = 0; j < n; ++j) noise_amp[j] = std::sqrt(cfg.kappa * res.nu[j] * cfg.dt);

  std::vector<double> th = cfg.theta0;
  std::vector<double> mk = res.marked0;
  std::vector<double> drift, gauss(n, 0.0), th_new(n), mk_new(mk.size());

  out.halt_reason = "horizon";
  for (int i = 0; i < res.steps; ++i) {
    drift_impl(cfg, res, th, mk, drift);
    bool bad = false;
    for (double d : drift)
      if (!std::isfinite(d) || std::fabs(d) > cfg.blowup_guard) bad = true;
    if (bad) {
      out.halt_reason = "blowup";
      break;
    }
    if (noisy && noise) (*noise)(i, gauss);
    for (int j = 0; j < n; ++j)
      th_new[j] = th[j] + drift[j] * cfg.dt + (noisy ? noise_amp[j] * gauss[j] : 0.0);
    for (std::size_t q = 0; q < mk.size(); ++q)
      mk_new[q] = mk[q] + cfg.dt * marked_velocity(th, res.nu, mk[q]);
    const ChamberState st = chamber_state(th_new, mk_new, cfg.collision_eps);
    if (st != ChamberState::Ok) {
      out.halt_reason = st == ChamberState::Collision ? "collision" : "blowup";
      break;
    }
    th = th_new;
    mk = mk_new;
    out.times.push_back(static_cast<double>(i + 1) * cfg.dt);
    out.theta.push_back(th);
    out.marked.push_back(mk);
  }
  out.steps = static_cast<int>(out.times.size()) - 1;
  out.t_halt = out.times.back();

  // coarse sample grid: every stride-th fine node plus the final one
  std::vector<int> sample_idx;
  for (int i = 0; i <= out.steps; i += cfg.sample_stride) sample_idx.push_back(i);
  if (sample_idx.back() != out.steps) sample_idx.push_back(out.steps);
  out.sample_times.reserve(sample_idx.size());
  for (int i : sample_idx) out.sample_times.push_back(out.times[i]);

  PathView path{&out.times, &out.theta};

  if (cfg.want_log_cr) {
    out.log_cr.reserve(sample_idx.size());
    cplx z(0.0, cfg.proxy_y);
    std::size_t next = 0;
    std::vector<double> scratch;
    for (int i = 0; i <= out.steps; ++i) {
      if (next < sample_idx.size() && sample_idx[next] == i) {
        out.log_cr.push_back(z.imag() - cfg.proxy_y);
        ++next;
      }
      if (i < out.steps) z = rk4_covering(path, res.nu, z, out.times[i], cfg.dt, scratch);
    }
  }

  if (cfg.want_tips) {
    out.tips.reserve(sample_idx.size());
    for (int idx : sample_idx) {
      std::vector<cplx> row(n);
      for (int j = 0; j < n; ++j)
        row[j] = trace_tip_backward(path, res.nu, idx, out.theta[idx][j], cfg.tip_offset);
      out.tips.push_back(std::move(row));
    }
  }
  return out;
}

} // namespace

const char* drift_mode_name(DriftMode mode) {
  switch (mode) {
    case DriftMode::ClosedFormFermionic: return "closed_form_fermionic";
    case DriftMode::NumericPsi: return "numeric_psi";
    case DriftMode::RationalDivisor: return "rational";
    case DriftMode::SleKappaRho: return "sle_kappa_rho";
    case DriftMode::KappaZero: return "kappa_zero";
  }
  return "unknown";
}

DriftMode drift_mode_from_name(const std::string& name) {
  if (name == "closed_form_fermionic") return DriftMode::ClosedFormFermionic;
  if (name == "numeric_psi") return DriftMode::NumericPsi;
  if (name == "rational") return DriftMode::RationalDivisor;
  if (name == "sle_kappa_rho") return DriftMode::SleKappaRho;
  if (name == "kappa_zero") return DriftMode::KappaZero;
  throw std::invalid_argument("unknown drift mode: " + name);
}

std::vector<double> drift_vector(const SimConfig& cfg, const std::vector<double>& theta,
                                 const std::vector<double>& marked_angles) {
  const Resolved res = validate_config(cfg);
  if (static_cast<int>(theta.size()) != res.n)
    throw std::invalid_argument("drift_vector: theta size mismatch");
  if (marked_angles.size() != res.marked0.size())
    throw std::invalid_argument("drift_vector: marked size mismatch");
  std::vector<double> out;
  drift_impl(cfg, res, theta, marked_angles, out);
  return out;
}

SimResult run_simulation(const SimConfig& cfg) {
  const Resolved res = validate_config(cfg);
  std::uint64_t draws = 0;
  SimResult result;
  if (cfg.kappa > 0.0) {
    std::vector<GaussianStream> streams;
    streams.reserve(res.n);
    for (int label : res.labels)
      streams.emplace_back(
          derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(label))));
    NoiseFn noise = [&streams, &draws](int, std::vector<double>& out) {
      for (std::size_t j = 0; j < streams.size(); ++j) out[j] = streams[j].gauss();
      draws += streams.size();
    };
    result = run_core(cfg, res, &noise);
  } else {
    result = run_core(cfg, res, nullptr);
  }
  result.rng_draws = draws;
  return result;
}

SimResult run_with_increments(const SimConfig& cfg,
                              const std::vector<std::vector<double>>& gauss) {
  const Resolved res = validate_config(cfg);
  if (cfg.kappa > 0.0) {
    if (static_cast<int>(gauss.size()) < res.steps)
      throw std::invalid_argument("run_with_increments: need one gaussian row per step");
    for (const auto& row : gauss)
      if (static_cast<int>(row.size()) != res.n)
        throw std::invalid_argument("run_with_increments: row size mismatch");
  }
  NoiseFn noise = [&gauss](int step, std::vector<double>& out) { out = gauss[step]; };
  SimResult result = run_core(cfg, res, cfg.kappa > 0.0 ? &noise : nullptr);
  result.rng_draws = 0;
  return result;
}

std::vector<cplx> evolve_covering_points(const SimResult& sim, const SimConfig& cfg,
                                         std::vector<cplx> points) {
  if (sim.times.size() < 2) return points;
  Resolved res = validate_config(cfg);
  PathView path{&sim.times, &sim.theta};
  std::vector<double> scratch;
  for (int k = 0; k + 1 <= sim.steps; ++k) {
    const double h = sim.times[k + 1] - sim.times[k];
    for (cplx& z : points) {
      if (!std::isfinite(z.real())) continue;
      path.at(sim.times[k], scratch);
      if (strip_distance(scratch, z) < cfg.tip_offset) {
        z = kMissingTip; // swallowed
        continue;
      }
      z = rk4_covering(path, res.nu, z, sim.times[k], h, scratch);
    }
  }
  return points;
}

PsiFn adaptive_screening_psi(const ScreeningSpec& spec, double rebuild_margin) {
  if (rebuild_margin < 0.0)
    throw std::invalid_argument("adaptive_screening_psi: negative rebuild margin");
  struct State {
    ScreeningSpec spec;
    double margin = 0.0;
    std::unique_ptr<ScreeningEvaluator> ev;
    std::vector<double> base;
  };
  auto st = std::make_shared<State>();
  st->spec = spec;
  st->margin = rebuild_margin;
  return [st](const std::vector<double>& theta) -> cplx {
    bool rebuild = !st->ev || st->base.size() != theta.size();
    if (!rebuild) {
      const double budget =
          std::max(st->ev->probe_radius() - st->margin, 0.25 * st->ev->probe_radius());
      for (std::size_t i = 0; i < theta.size(); ++i)
        if (std::fabs(theta[i] - st->base[i]) > budget) {
          rebuild = true;
          break;
        }
    }
    if (rebuild) {
      st->ev = std::make_unique<ScreeningEvaluator>(st->spec, theta);
      st->base = theta;
    }
    return st->ev->eval(theta);
  };
}

DriftEquivalenceReport drift_equivalence_check(double kappa, int n_configs,
                                               std::uint64_t seed) {
  if (!(kappa > 0.0)) throw std::domain_error("drift_equivalence_check: kappa must be > 0");
  if (n_configs < 2) throw std::invalid_argument("drift_equivalence_check: need >= 2 configs");
  const KappaParams p = derive_params(kappa);
  GaussianStream stream(derive_stream_seed(seed, 0xD217EULL));
  const FiniteDiffScheme scheme{1e-2, 4, 3};

  // kappa d_theta log Z against the reference kappa a sigma cot((theta - q)/2)
  // for Z(theta) = |sin((theta - q)/2)|^{a sigma} (growth charge a, marked sigma).
  auto log_z = [&p](double q, double sigma) {
    return PsiFn([q, sigma, a = p.a](const std::vector<double>& t) {
      return cplx(a * sigma * std::log(std::fabs(std::sin(0.5 * (t[0] - q)))), 0.0);
    });
  };

  DriftEquivalenceReport rep;
  rep.configs = n_configs;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (int c = 0; c < n_configs; ++c) {
    const double theta = kTwoPi * stream.uniform();
    // keep sin(gap/2) and cot(gap/2) both order one so neither the logarithm
    // nor the reference drift degenerates and the ratio stays at full precision
    const double gap = 0.9 + 1.3 * stream.uniform();
    const double q = theta - gap;
    const double mag = 0.5 + stream.uniform();
    const double sigma = stream.uniform() < 0.5 ? -mag : mag;
    const double num = kappa * fd_partial(log_z(q, sigma), {theta}, 0, scheme).real();
    const double den = kappa * p.a * sigma * cot_half(theta - q);
    const double ratio = num / den;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    sum += ratio;
  }
  rep.ratio = sum / n_configs;
  rep.ratio_spread = hi - lo;

  // sigma = 0 must yield zero drift
  rep.zero_sigma = std::fabs(kappa * fd_partial(log_z(1.1, 0.0), {2.4}, 0, scheme).real());

  // additivity of two marked points in log Z
  {
    const double theta = 2.0, q1 = 0.7, q2 = 4.1, s1 = 0.8, s2 = -0.5;
    const PsiFn joint([q1, q2, s1, s2, a = p.a](const std::vector<double>& t) {
      return cplx(a * s1 * std::log(std::fabs(std::sin(0.5 * (t[0] - q1)))) +
                      a * s2 * std::log(std::fabs(std::sin(0.5 * (t[0] - q2)))),
                  0.0);
    });
    const double dj = kappa * fd_partial(joint, {theta}, 0, scheme).real();
    const double d1 = kappa * fd_partial(log_z(q1, s1), {theta}, 0, scheme).real();
    const double d2 = kappa * fd_partial(log_z(q2, s2), {theta}, 0, scheme).real();
    rep.additivity_err = std::fabs(dj - d1 - d2);
  }
  return rep;
}

bool MomentReport::pass(double z_crit) const {
  return std::fabs(mean_z) <= z_crit && std::fabs(var_z) <= z_crit;
}

MomentReport moment_test(const std::vector<double>& xs, double var_expected) {
  if (xs.size() < 8) throw std::invalid_argument("moment_test: need at least 8 samples");
  if (!(var_expected > 0.0)) throw std::invalid_argument("moment_test: variance must be > 0");
  MomentReport rep;
  rep.n = static_cast<int>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  rep.mean = sum / rep.n;
  double ss = 0.0;
  for (double x : xs) ss += (x - rep.mean) * (x - rep.mean);
  rep.variance = ss / (rep.n - 1);
  rep.mean_z = rep.mean / std::sqrt(var_expected / rep.n);
  // Wilson-Hilferty: ((S/var)/df)^(1/3) ~ N(1 - 2/(9 df), 2/(9 df))
  const double df = rep.n - 1;
  const double u = ss / var_expected;
  rep.var_z = (std::cbrt(u / df) - (1.0 - 2.0 / (9.0 * df))) / std::sqrt(2.0 / (9.0 * df));
  return rep;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::fabs(ia / na - ib / nb));
  }
  return d;
}

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: bad input");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (!(std::fabs(det) > 1e-300)) throw std::invalid_argument("fit_line: degenerate abscissae");
  SlopeFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

} // namespace radsle

/**
 * @file test_loewner.cpp
 * @brief Checks for the multiple radial Loewner simulator: the deterministic
 *        kappa = 0 slit oracle, covering-flow advection, capacity decay,
 *        noise statistics, Euler-Maruyama strong order, drift-mode
 *        equivalences, and halt handling.
 *
 * Pinned facts exercised below:
 *   - a single kappa = 0 curve grows a straight slit whose tip radius r(t)
 *     solves r/(1+r)^2 = e^{-t}/4, giving r(0.5) = 0.2290513;
 *   - log CR(t) = Im h_t(iY) - Y decays at rate -sum_j nu_j;
 *   - driving increments at n = 1 are N(0, kappa dt);
 *   - coupled step halving shows the ~1/2 strong order of the sup-norm path
 *     error (the Brownian bridge dominates between coarse nodes);
 *   - rational-divisor drifts equal sle_kappa_rho drifts with
 *     rho = kappa a sigma / 2, and kappa_zero equals rho = 2 sigma at
 *     kappa = 0;
 *   - the measured ratio of kappa d log Z to kappa a sigma cot is 1/2.
 */
#include "radsle/constants.hpp"
#include "radsle/loewner.hpp"
#include "radsle/rng.hpp"
#include "radsle/screening.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <vector>

#include "harness.hpp"

using namespace radsle;

namespace {

/** Closed-form tip radius of the single kappa = 0 radial slit. */
double slit_radius(double t) {
  const double c = std::exp(-t) / 4.0;
  return (1.0 - 2.0 * c - std::sqrt(1.0 - 4.0 * c)) / (2.0 * c);
}

bool same_path(const std::vector<std::vector<double>>& a,
               const std::vector<std::vector<double>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (std::size_t j = 0; j < a[i].size(); ++j)
      if (a[i][j] != b[i][j]) return false;
  }
  return true;
}

void check_validation() {
  test_section("configuration validation");
  SimConfig cfg;
  cfg.theta0 = {0.5, 0.4};  // not ascending
  REQUIRE_THROWS(run_simulation(cfg), "angles must ascend");

  cfg.theta0 = {0.5, 0.5 + 5e-3};  // gap below 10 x collision_eps
  REQUIRE_THROWS(run_simulation(cfg), "gap must exceed 10 x collision_eps");

  cfg.theta0 = {0.5, 2.5};
  cfg.nu = {1.0};  // size mismatch
  REQUIRE_THROWS(run_simulation(cfg), "nu size mismatch");
  cfg.nu.clear();

  cfg.labels = {3, 3};  // duplicate labels
  REQUIRE_THROWS(run_simulation(cfg), "labels must be distinct");
  cfg.labels.clear();

  cfg.t_end = 0.1234;
  cfg.dt = 1e-3;  // not an integral multiple
  REQUIRE_THROWS(run_simulation(cfg), "t_end must be a multiple of dt");
  cfg.t_end = 0.1;

  cfg.mode = DriftMode::KappaZero;  // kappa != 0
  REQUIRE_THROWS(run_simulation(cfg), "kappa_zero needs kappa == 0");
  cfg.mode = DriftMode::ClosedFormFermionic;

  cfg.marked.push_back({1.5, 0.5});  // fermionic mode takes no marked points
  REQUIRE_THROWS(run_simulation(cfg), "marked points rejected in fermionic mode");
  cfg.marked.clear();

  cfg.mode = DriftMode::NumericPsi;  // psi missing
  REQUIRE_THROWS(run_simulation(cfg), "numeric mode requires psi");

  REQUIRE_THROWS(drift_mode_from_name("bogus"), "unknown drift mode name");
}

void check_kappa_zero_slit() {
  test_section("kappa = 0 single slit: tip radius oracle");
  SimConfig cfg;
  cfg.kappa = 0.0;
  cfg.mode = DriftMode::KappaZero;
  cfg.theta0 = {0.8};
  cfg.t_end = 0.5;
  cfg.dt = 1e-4;
  cfg.sample_stride = 100;
  const SimResult sim = run_simulation(cfg);
  REQUIRE(sim.halt_reason == "horizon", "reaches the horizon");
  REQUIRE(sim.rng_draws == 0, "kappa = 0 consumes no randomness");
  REQUIRE(sim.steps == 5000, "step count");

  // The driving angle never moves.
  for (const auto& row : sim.theta) REQUIRE(row[0] == 0.8, "angle frozen at kappa = 0");

  // Tip stays on the radius arg = theta0 and matches the closed form.
  REQUIRE(!sim.tips.empty(), "tips recorded");
  double prev = 1.0;
  for (std::size_t s = 0; s < sim.tips.size(); ++s) {
    const cplx tip = sim.tips[s][0];
    REQUIRE(std::isfinite(tip.real()) && std::isfinite(tip.imag()), "tip present");
    const double r = std::abs(tip);
    REQUIRE(r <= prev + 1e-12, "tip radius nonincreasing");
    prev = r;
    double darg = std::arg(tip) - 0.8;
    while (darg > kPi) darg -= kTwoPi;
    while (darg < -kPi) darg += kTwoPi;
    REQUIRE(std::fabs(darg) < 1e-3, "tip on the initial radius");
  }
  const double want = slit_radius(0.5);
  REQUIRE_CLOSE(want, 0.2290513, 1e-6, "frozen closed-form radius");
  REQUIRE_CLOSE(std::abs(sim.tips.back()[0]), want, 1e-3, "measured tip radius");

  // Capacity diagnostic: log CR starts at 0 and decays at rate -nu = -1.
  REQUIRE(std::fabs(sim.log_cr.front()) < 1e-9, "log CR(0) = 0");
  const auto fit = fit_line(sim.sample_times, sim.log_cr);
  REQUIRE_CLOSE(fit.slope, -1.0, 5e-3, "capacity decay rate");
}

void check_marked_advection() {
  test_section("marked-point advection ODE oracle");
  // dq/dt = cot((q - theta)/2) with frozen theta integrates to
  // cos((q - theta)/2) = cos((q0 - theta)/2) e^{-t/2}.
  SimConfig cfg;
  cfg.kappa = 0.0;
  cfg.mode = DriftMode::KappaZero;
  cfg.theta0 = {0.5};
  cfg.marked.push_back({1.5, 0.0});  // passive: zero charge
  cfg.t_end = 0.5;
  cfg.dt = 1e-4;
  const SimResult sim = run_simulation(cfg);
  REQUIRE(sim.marked.size() == sim.times.size(), "marked path on the fine grid");
  const double u0 = 1.0;
  const double want = 0.5 + 2.0 * std::acos(std::cos(u0 / 2.0) * std::exp(-0.25));
  REQUIRE_CLOSE(sim.marked.back()[0], want, 2e-4, "closed-form advection");
  REQUIRE(sim.marked.back()[0] > 1.5, "repelled along the covering flow");
}

void check_antipodal_symmetry() {
  test_section("covering flow preserves antipodal symmetry");
  SimConfig cfg;
  cfg.kappa = 0.0;
  cfg.mode = DriftMode::ClosedFormFermionic;
  cfg.theta0 = {0.3, 0.3 + kPi};
  cfg.t_end = 0.3;
  cfg.dt = 1e-3;
  const SimResult sim = run_simulation(cfg);
  REQUIRE(sim.halt_reason == "horizon", "deterministic run completes");
  // Antipodal driving angles have zero fermionic drift: they stay frozen.
  REQUIRE(std::fabs(sim.theta.back()[0] - 0.3) < 1e-12, "first angle frozen");
  REQUIRE(std::fabs(sim.theta.back()[1] - 0.3 - kPi) < 1e-12, "second angle frozen");

  const cplx z(1.0, 0.5);
  const auto moved = evolve_covering_points(sim, cfg, {z, z + kPi});
  REQUIRE(std::isfinite(moved[0].real()) && std::isfinite(moved[1].real()),
          "points not swallowed");
  const cplx gap = moved[1] - moved[0];
  REQUIRE(std::abs(gap - cplx(kPi, 0.0)) < 1e-10, "antipodal gap preserved");
}

void check_determinism() {
  test_section("byte-exact reproducibility");
  SimConfig cfg;
  cfg.kappa = 3.0;
  cfg.theta0 = {0.3, 2.4};
  cfg.t_end = 0.1;
  cfg.dt = 1e-3;
  cfg.seed = 42;
  const SimResult a = run_simulation(cfg);
  const SimResult b = run_simulation(cfg);
  REQUIRE(same_path(a.theta, b.theta), "identical driving paths");
  REQUIRE(a.rng_draws == b.rng_draws && a.rng_draws > 0, "identical draw counts");
  REQUIRE(a.log_cr == b.log_cr, "identical capacity series");
  REQUIRE(a.tips.size() == b.tips.size(), "identical sample counts");
  for (std::size_t s = 0; s < a.tips.size(); ++s)
    for (std::size_t j = 0; j < a.tips[s].size(); ++j) {
      const cplx ta = a.tips[s][j], tb = b.tips[s][j];
      const bool both_nan = std::isnan(ta.real()) && std::isnan(tb.real());
      REQUIRE(both_nan || (ta.real() == tb.real() && ta.imag() == tb.imag()),
              "identical tips");
    }

  // Different seeds and different labels must both change the paths.
  cfg.seed = 43;
  const SimResult c = run_simulation(cfg);
  REQUIRE(!same_path(a.theta, c.theta), "seed changes the paths");
  cfg.seed = 42;
  cfg.labels = {9, 5};
  const SimResult d = run_simulation(cfg);
  REQUIRE(!same_path(a.theta, d.theta), "labels select the noise streams");
}

void check_rotation_equivariance() {
  test_section("rotation equivariance of the driving SDE");
  SimConfig cfg;
  cfg.kappa = 2.0;
  cfg.theta0 = {0.3, 2.4};
  cfg.t_end = 0.2;
  cfg.dt = 1e-3;
  cfg.seed = 2026;
  cfg.want_tips = false;
  cfg.want_log_cr = false;
  const SimResult base = run_simulation(cfg);
  SimConfig rot = cfg;
  rot.theta0 = {0.5, 2.6};
  const SimResult shifted = run_simulation(rot);
  REQUIRE(base.halt_reason == "horizon" && shifted.halt_reason == "horizon",
          "both runs complete");
  double worst = 0.0;
  for (std::size_t i = 0; i < base.theta.size(); ++i)
    for (std::size_t j = 0; j < 2; ++j)
      worst = std::max(worst,
                       std::fabs(shifted.theta[i][j] - base.theta[i][j] - 0.2));
  REQUIRE(worst < 1e-10, "drift depends only on angle differences");
}

void check_capacity_slope() {
  test_section("capacity decay -sum nu with unequal speeds");
  SimConfig cfg;
  cfg.kappa = 2.0;
  cfg.theta0 = {0.5, 3.6};
  cfg.nu = {1.0, 0.5};
  cfg.t_end = 0.5;
  cfg.dt = 1e-3;
  cfg.seed = 7;
  cfg.sample_stride = 10;
  const SimResult sim = run_simulation(cfg);
  REQUIRE(sim.halt_reason == "horizon", "run completes");
  const auto fit = fit_line(sim.sample_times, sim.log_cr);
  REQUIRE(std::fabs(fit.slope - (-1.5)) <= 0.005 * 1.5, "slope within 0.5%");
}

void check_increment_moments() {
  test_section("driving increments are N(0, kappa dt) at n = 1");
  SimConfig cfg;
  cfg.kappa = 2.0;
  cfg.theta0 = {1.0};
  cfg.dt = 2e-5;
  cfg.t_end = 0.2;  // 10^4 steps
  cfg.seed = 2026;
  cfg.want_tips = false;
  cfg.want_log_cr = false;
  const SimResult sim = run_simulation(cfg);
  REQUIRE(sim.steps == 10000, "step count");
  std::vector<double> inc;
  inc.reserve(static_cast<std::size_t>(sim.steps));
  for (int i = 0; i < sim.steps; ++i)
    inc.push_back(sim.theta[static_cast<std::size_t>(i) + 1][0] -
                  sim.theta[static_cast<std::size_t>(i)][0]);
  const auto rep = moment_test(inc, cfg.kappa * cfg.dt);
  REQUIRE(rep.n == 10000, "all increments pooled");
  REQUIRE(rep.pass(), "mean and variance within the 99% band");

  // Two halves of the same stream are KS-compatible.
  const std::vector<double> first(inc.begin(), inc.begin() + 5000);
  const std::vector<double> second(inc.begin() + 5000, inc.end());
  const double d = ks_two_sample(first, second);
  REQUIRE(d < 1.358 * std::sqrt(2.0 / 5000.0), "KS two-sample within the 95% bound");

  // Negative control: a shifted sample must fail the moment test.
  std::vector<double> biased = inc;
  const double sd = std::sqrt(cfg.kappa * cfg.dt);
  for (double& x : biased) x += 0.2 * sd;
  REQUIRE(!moment_test(biased, cfg.kappa * cfg.dt).pass(), "bias detected");
}

void check_strong_order() {
  test_section("coupled step halving: sup-norm strong order ~ 1/2");
  const double t_end = 0.256;
  const double dt_f = 1e-3;
  const int fine_steps = 256;
  double sum_d1 = 0.0, sum_d2 = 0.0;
  for (int rep = 0; rep < 6; ++rep) {
    GaussianStream stream(derive_stream_seed(909ULL, static_cast<std::uint64_t>(rep)));
    std::vector<std::vector<double>> g_f(static_cast<std::size_t>(fine_steps),
                                         std::vector<double>(2));
    for (auto& row : g_f)
      for (double& x : row) x = stream.gauss();
    auto coarsen = [](const std::vector<std::vector<double>>& g) {
      std::vector<std::vector<double>> out(g.size() / 2, std::vector<double>(g[0].size()));
      for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = 0; j < g[0].size(); ++j)
          out[i][j] = (g[2 * i][j] + g[2 * i + 1][j]) / std::sqrt(2.0);
      return out;
    };
    const auto g_m = coarsen(g_f);
    const auto g_c = coarsen(g_m);

    SimConfig cfg;
    cfg.kappa = 3.0;
    cfg.theta0 = {0.3, 0.3 + kPi};
    cfg.t_end = t_end;
    cfg.want_tips = false;
    cfg.want_log_cr = false;
    cfg.dt = dt_f;
    const SimResult rf = run_with_increments(cfg, g_f);
    cfg.dt = 2.0 * dt_f;
    const SimResult rm = run_with_increments(cfg, g_m);
    cfg.dt = 4.0 * dt_f;
    const SimResult rc = run_with_increments(cfg, g_c);
    REQUIRE(rf.halt_reason == "horizon" && rm.halt_reason == "horizon" &&
                rc.halt_reason == "horizon",
            "all resolutions complete");

    // sup over the finer grid of |coarse path (linearly interpolated) - fine|.
    auto sup_diff = [](const SimResult& coarse, const SimResult& fine) {
      double sup = 0.0;
      for (std::size_t k = 0; k < fine.theta.size(); ++k) {
        for (std::size_t j = 0; j < fine.theta[k].size(); ++j) {
          double cv;
          if (k % 2 == 0) {
            cv = coarse.theta[k / 2][j];
          } else {
            cv = 0.5 * (coarse.theta[(k - 1) / 2][j] + coarse.theta[(k + 1) / 2][j]);
          }
          sup = std::max(sup, std::fabs(cv - fine.theta[k][j]));
        }
      }
      return sup;
    };
    sum_d1 += sup_diff(rc, rm);
    sum_d2 += sup_diff(rm, rf);
  }
  const double order = std::log2(sum_d1 / sum_d2);
  REQUIRE(order >= 0.30 && order <= 0.70, "strong order in [0.30, 0.70]");
}

void check_drift_mode_equivalences() {
  test_section("drift-mode equivalences");
  // rational == sle_kappa_rho with rho = kappa a sigma / 2.
  const double kappa = 3.3, sigma = 0.8, q = 2.0;
  const KappaParams p = derive_params(kappa);
  SimConfig rat;
  rat.kappa = kappa;
  rat.mode = DriftMode::RationalDivisor;
  rat.theta0 = {0.4, 4.0};
  rat.marked.push_back({q, sigma});
  SimConfig rho = rat;
  rho.mode = DriftMode::SleKappaRho;
  rho.rho = {0.5 * kappa * p.a * sigma};
  const std::vector<double> theta = {0.4, 4.0};
  const std::vector<double> mk = {q};
  const auto d_rat = drift_vector(rat, theta, mk);
  const auto d_rho = drift_vector(rho, theta, mk);
  for (int j = 0; j < 2; ++j)
    REQUIRE_CLOSE(d_rat[static_cast<std::size_t>(j)], d_rho[static_cast<std::size_t>(j)],
                  1e-14, "rho = kappa a sigma / 2");

  // kappa_zero == sle_kappa_rho with rho = 2 sigma at kappa = 0.
  SimConfig kz = rat;
  kz.kappa = 0.0;
  kz.mode = DriftMode::KappaZero;
  SimConfig rho0 = kz;
  rho0.mode = DriftMode::SleKappaRho;
  rho0.rho = {2.0 * sigma};
  const auto d_kz = drift_vector(kz, theta, mk);
  const auto d_rho0 = drift_vector(rho0, theta, mk);
  for (int j = 0; j < 2; ++j)
    REQUIRE_CLOSE(d_kz[static_cast<std::size_t>(j)], d_rho0[static_cast<std::size_t>(j)],
                  1e-14, "rho = 2 sigma at kappa = 0");

  // numeric psi == closed-form fermionic for the ground product.
  SimConfig num;
  num.kappa = 2.5;
  num.mode = DriftMode::NumericPsi;
  num.theta0 = {0.3, 2.2, 4.4};
  num.psi = [](const std::vector<double>& th) { return fermionic_ground(th, 2.5); };
  SimConfig closed = num;
  closed.mode = DriftMode::ClosedFormFermionic;
  closed.psi = nullptr;
  const std::vector<double> th3 = {0.3, 2.2, 4.4};
  const auto d_num = drift_vector(num, th3, {});
  const auto d_closed = drift_vector(closed, th3, {});
  for (int j = 0; j < 3; ++j)
    REQUIRE_CLOSE(d_num[static_cast<std::size_t>(j)], d_closed[static_cast<std::size_t>(j)],
                  1e-8, "finite differences match the cot sum");
}

void check_drift_equivalence_ratio() {
  test_section("measured drift ratio = 1/2");
  const auto rep = drift_equivalence_check(3.5, 5, 777ULL);
  REQUIRE(rep.configs == 5, "configs counted");
  REQUIRE_CLOSE(rep.ratio, kResolvedDriftRatio, 1e-12, "ratio 1/2");
  REQUIRE(rep.ratio_spread < 1e-12, "ratio constant across configurations");
  REQUIRE(rep.additivity_err < 1e-9, "log Z additive over marked points");
  REQUIRE(rep.zero_sigma < 1e-10, "zero charge gives zero drift");
  REQUIRE_THROWS(drift_equivalence_check(-1.0, 5, 1ULL), "kappa must be positive");
}

void check_sample_grid() {
  test_section("sample grid contract");
  SimConfig cfg;
  cfg.kappa = 2.0;
  cfg.theta0 = {0.5, 2.5};
  cfg.t_end = 0.1;
  cfg.dt = 1e-3;
  cfg.sample_stride = 7;  // 100 steps: samples at 0,7,...,98 plus the final 100
  const SimResult sim = run_simulation(cfg);
  REQUIRE(sim.times.size() == 101, "fine grid has steps+1 nodes");
  REQUIRE(sim.sample_times.front() == 0.0, "first sample at t = 0");
  REQUIRE_CLOSE(sim.sample_times.back(), sim.t_halt, 1e-15, "last sample at halt");
  REQUIRE(sim.tips.size() == sim.sample_times.size(), "tips per sample");
  REQUIRE(sim.log_cr.size() == sim.sample_times.size(), "log CR per sample");
  for (std::size_t s = 0; s + 2 < sim.sample_times.size(); ++s)
    REQUIRE_CLOSE(sim.sample_times[s + 1] - sim.sample_times[s], 7e-3, 1e-12,
                  "stride spacing");
}

void check_halts() {
  test_section("collision and blowup halts");
  // Two curves attracted to a negative marked charge collide.
  SimConfig col;
  col.kappa = 0.0;
  col.mode = DriftMode::KappaZero;
  col.theta0 = {0.8, 1.2};
  col.marked.push_back({1.0, -3.0});
  col.t_end = 1.0;
  col.dt = 1e-4;
  const SimResult sc = run_simulation(col);
  REQUIRE(sc.halt_reason == "collision", "attracting charge forces a collision");
  REQUIRE(sc.t_halt < 1.0 && sc.t_halt > 0.0, "halts strictly inside the horizon");
  REQUIRE(sc.sample_times.back() == sc.t_halt, "final sample at the halt time");

  // A tiny blowup guard trips immediately on a strong drift.
  SimConfig bl;
  bl.kappa = 3.0;
  bl.mode = DriftMode::RationalDivisor;
  bl.theta0 = {1.9};
  bl.marked.push_back({2.0, 50.0});
  bl.t_end = 0.1;
  bl.dt = 1e-3;
  bl.blowup_guard = 1.0;
  const SimResult sb = run_simulation(bl);
  REQUIRE(sb.halt_reason == "blowup", "guard detects the drift magnitude");
}

void check_stats_helpers() {
  test_section("statistics helpers");
  const std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
  const std::vector<double> y = {1.0, 3.0, 5.0, 7.0};
  const auto fit = fit_line(x, y);
  REQUIRE_CLOSE(fit.slope, 2.0, 1e-12, "exact slope");
  REQUIRE_CLOSE(fit.intercept, 1.0, 1e-12, "exact intercept");

  GaussianStream g(123);
  std::vector<double> a, b;
  for (int i = 0; i < 4000; ++i) a.push_back(g.gauss());
  for (int i = 0; i < 4000; ++i) b.push_back(2.0 + g.gauss());
  REQUIRE(ks_two_sample(a, a) < 1e-12, "identical samples: D = 0");
  REQUIRE(ks_two_sample(a, b) > 0.5, "shifted samples: large D");

  // Seed derivation decorrelates labels and is deterministic.
  REQUIRE(derive_stream_seed(1, 0) != derive_stream_seed(1, 1), "labels split streams");
  REQUIRE(derive_stream_seed(5, 7) == derive_stream_seed(5, 7), "derivation is pure");
}

}  // namespace

int main() {
  check_validation();
  check_kappa_zero_slit();
  check_marked_advection();
  check_antipodal_symmetry();
  check_determinism();
  check_rotation_equivariance();
  check_capacity_slope();
  check_increment_moments();
  check_strong_order();
  check_drift_mode_equivalences();
  check_drift_equivalence_ratio();
  check_sample_grid();
  check_halts();
  check_stats_helpers();
  std::cout << "test_loewner: all checks passed\n";
  return 0;
}

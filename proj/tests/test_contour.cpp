/**
 * @file test_contour.cpp
 * @brief Checks for contour builders, branch-continued quadrature, and the
 *        Pochhammer <-> reduced-interval duality on Beta-type integrals.
 *
 * Pinned facts exercised below:
 *   - the double loop around [0, 1] with exponents alpha = beta = -1/2 equals
 *     4 pi after the branch rotation e^{-i pi beta};
 *   - for real exponents the rotated loop equals
 *     (1 - e^{2 pi i alpha}) (1 - e^{2 pi i beta}) B(alpha+1, beta+1);
 *   - an integer exponent kills the loop (commutator prefactor vanishes), the
 *     rectangle loop then computes the residue sum directly;
 *   - the reduced-interval evaluation agrees with the loop within the combined
 *     error budget for random complex exponents with Re > -1.
 */
#include "radsle/contour.hpp"
#include "radsle/integrand.hpp"
#include "radsle/quadrature.hpp"
#include "radsle/rng.hpp"
#include "radsle/screening.hpp"

#include <cmath>
#include <complex>

#include "harness.hpp"

using namespace radsle;

namespace {

QuadResult beta_loop(cplx alpha, cplx beta) {
  IteratedIntegral ii;
  ii.num_vars = 1;
  LevelSpec lv;
  lv.contour = make_pochhammer(0.0, 1.0, 0.1, 0.1, 0.5);
  lv.abs_tol = 1e-9;
  lv.rel_tol = 1e-10;
  ii.levels.push_back(lv);
  Factor f0;
  f0.core = CoreKind::Linear;
  f0.owner = 0;
  f0.ref = 0.0;
  f0.exponent = alpha;
  Factor f1 = f0;
  f1.ref = 1.0;
  f1.exponent = beta;
  ii.factors = {f0, f1};
  return ii.evaluate();
}

QuadResult beta_interval(cplx alpha, cplx beta) {
  IteratedIntegral ii;
  ii.num_vars = 1;
  LevelSpec lv;
  lv.contour = make_interval(0.0, 1.0, 0.5);
  lv.abs_tol = 1e-9;
  lv.rel_tol = 1e-10;
  lv.reduced = true;
  lv.reduction_prefactor = reduction_prefactor(alpha, beta);
  lv.endpoint_lo = 0;
  lv.endpoint_hi = 1;
  ii.levels.push_back(lv);
  Factor f0;
  f0.core = CoreKind::Linear;
  f0.owner = 0;
  f0.ref = 0.0;
  f0.exponent = alpha;
  Factor f1 = f0;
  f1.ref = 1.0;
  f1.exponent = beta;
  ii.factors = {f0, f1};
  return ii.evaluate();
}

void check_path_pieces() {
  test_section("path pieces");
  const auto seg = PathPiece::segment(cplx(0, 0), cplx(2, 1));
  REQUIRE(std::abs(seg.at(0.0) - cplx(0, 0)) < 1e-15, "segment start");
  REQUIRE(std::abs(seg.at(1.0) - cplx(2, 1)) < 1e-15, "segment end");
  REQUIRE(std::abs(seg.deriv(0.3) - cplx(2, 1)) < 1e-15, "segment derivative");
  REQUIRE_CLOSE(seg.approx_len(), std::sqrt(5.0), 1e-12, "segment length");

  const auto circ = PathPiece::arc(cplx(1, 0), 0.5, 0.0, kTwoPi);
  REQUIRE(std::abs(circ.at(0.0) - cplx(1.5, 0)) < 1e-15, "arc start");
  REQUIRE(std::abs(circ.at(0.25) - cplx(1.0, 0.5)) < 1e-12, "arc quarter point");
  REQUIRE_CLOSE(circ.approx_len(), kPi, 1e-3, "full circle length 2 pi r");
  // Finite-difference check of the arc derivative.
  const double h = 1e-6;
  const cplx fd = (circ.at(0.5 + h) - circ.at(0.5 - h)) / (2.0 * h);
  REQUIRE(std::abs(fd - circ.deriv(0.5)) < 1e-6, "arc derivative");
}

void check_builders_throw() {
  test_section("builder validation");
  REQUIRE_THROWS(make_pochhammer(1.0, 0.0, 0.1, 0.1, 0.5), "p < q required");
  REQUIRE_THROWS(make_pochhammer(0.0, 1.0, 0.2, 0.1, 0.5), "depth >= r required");
  REQUIRE_THROWS(make_pochhammer(0.0, 1.0, -0.1, 0.1, 0.5), "r > 0 required");
  REQUIRE_THROWS(make_rect_loop(0.0, 1.0, -0.5, 0.5, 0.5), "positive margin required");
  REQUIRE_THROWS(make_rect_loop(0.0, 1.0, 0.5, 0.5, 3.0), "anchor inside span");
  REQUIRE_THROWS(make_interval(0.0, 1.0, 1.5), "interval anchor strictly inside");
  REQUIRE_THROWS(make_periodic_line(0.0, 0.3, 0.0), "positive period required");
  REQUIRE_THROWS(reduction_prefactor(cplx(-1.2, 0.0), cplx(0.0, 0.0)),
                 "reduction needs Re > -1");
}

void check_contour_geometry() {
  test_section("contour geometry helpers");
  const auto A = make_interval(0.0, 1.0, 0.5);
  const auto B = make_interval(3.0, 4.0, 3.5);
  REQUIRE_CLOSE(contour_min_distance(A, B), 2.0, 1e-6, "interval separation");
  REQUIRE_CLOSE(contour_min_distance_to_point(A, cplx(0.5, 0.25)), 0.25, 1e-6,
                "distance to a point");

  const auto P = make_pochhammer(0.0, 1.0, 0.1, 0.12, 0.5);
  REQUIRE(P.kind == ContourKind::Pochhammer && P.closed, "Pochhammer is closed");
  REQUIRE(std::abs(P.start() - P.end()) < 1e-12, "closed loop endpoints agree");
  // Rails sit at -depth; only the radius-r puncture circles poke above the
  // axis, so the whole loop lives in the band [-depth, +r].
  for (const auto& piece : P.pieces)
    for (int k = 0; k <= 8; ++k) {
      const double im = piece.at(k / 8.0).imag();
      REQUIRE(im <= 0.1 + 1e-12 && im >= -0.12 - 1e-12, "loop stays in its band");
    }
  // The loop must clear both punctures by at least a positive margin.
  REQUIRE(contour_min_distance_to_point(P, cplx(0.0, 0.0)) > 0.05, "clears puncture p");
  REQUIRE(contour_min_distance_to_point(P, cplx(1.0, 0.0)) > 0.05, "clears puncture q");
}

void check_beta_oracle() {
  test_section("Beta(1/2,1/2) double-loop oracle = 4 pi");
  const cplx ab(-0.5, 0.0);
  const auto P = beta_loop(ab, ab);
  REQUIRE(P.converged, "loop quadrature converged");
  const cplx classical = P.value * std::exp(cplx(0.0, -kPi) * ab);
  REQUIRE_CLOSE(classical.real(), 4.0 * kPi, 4.0 * kPi * 1e-10, "Re = 4 pi");
  REQUIRE(std::abs(classical.imag()) < 4.0 * kPi * 1e-10, "Im = 0");
}

void check_beta_gamma_identity() {
  test_section("loop vs Gamma-function Beta for real exponents");
  const double pairs[][2] = {{-0.3, -0.7}, {0.25, -0.4}, {-0.5, 0.3}};
  for (const auto& pr : pairs) {
    const cplx alpha(pr[0], 0.0), beta(pr[1], 0.0);
    const auto P = beta_loop(alpha, beta);
    const cplx classical = P.value * std::exp(cplx(0.0, -kPi) * beta);
    const cplx pref = (1.0 - std::exp(cplx(0.0, kTwoPi) * alpha)) *
                      (1.0 - std::exp(cplx(0.0, kTwoPi) * beta));
    const double B = std::tgamma(pr[0] + 1.0) * std::tgamma(pr[1] + 1.0) /
                     std::tgamma(pr[0] + pr[1] + 2.0);
    REQUIRE(std::abs(classical - pref * B) < 1e-9 * (1.0 + std::abs(pref * B)),
            "loop equals (1-e^{2pi i a})(1-e^{2pi i b}) Beta(a+1,b+1)");
  }
}

void check_integer_exponent_kills_loop() {
  test_section("integer exponent collapses the commutator");
  const auto P = beta_loop(cplx(0.0, 0.0), cplx(-0.5, 0.0));
  REQUIRE(std::abs(P.value) < 1e-9 + 10.0 * P.abs_error, "loop vanishes for alpha = 0");
}

void check_rect_loop_residues() {
  test_section("rectangle loop computes residues");
  // closed integral dz / z around [0,1] = 2 pi i.
  IteratedIntegral ii;
  ii.num_vars = 1;
  LevelSpec lv;
  lv.contour = make_rect_loop(0.0, 1.0, 0.4, 0.4, 0.5);
  ii.levels.push_back(lv);
  Factor f0;
  f0.core = CoreKind::Linear;
  f0.owner = 0;
  f0.ref = 0.0;
  f0.exponent = cplx(-1.0, 0.0);
  ii.factors = {f0};
  const auto R = ii.evaluate();
  REQUIRE(std::abs(R.value - cplx(0.0, kTwoPi)) < 1e-8, "single pole residue");

  // closed integral dz / (z (z-1)) = 2 pi i (res_0 + res_1) = 0.
  Factor f1 = f0;
  f1.ref = 1.0;
  ii.factors = {f0, f1};
  const auto R2 = ii.evaluate();
  REQUIRE(std::abs(R2.value) < 1e-8, "residues cancel");
}

void check_periodic_line() {
  test_section("periodic line in the covering strip");
  // integral over one period of sin(z/2)^2 at height 0.3 equals pi.
  IteratedIntegral ii;
  ii.num_vars = 1;
  LevelSpec lv;
  lv.contour = make_periodic_line(0.0, 0.3, kTwoPi);
  ii.levels.push_back(lv);
  Factor f0;
  f0.core = CoreKind::SinHalf;
  f0.owner = 0;
  f0.ref = 0.0;
  f0.exponent = cplx(2.0, 0.0);
  ii.factors = {f0};
  const auto R = ii.evaluate();
  REQUIRE(std::abs(R.value - cplx(kPi, 0.0)) < 1e-8, "period integral of sin^2 = pi");

  // A non-periodic integrand must be rejected by the invariance check.
  Factor g0;
  g0.core = CoreKind::Linear;
  g0.owner = 0;
  g0.ref = 0.0;
  g0.exponent = cplx(1.0, 0.0);
  ii.factors = {g0};
  REQUIRE_THROWS(ii.evaluate(), "non-periodic integrand rejected");
}

void check_dual_methods() {
  test_section("Pochhammer vs reduced interval, random exponents");
  GaussianStream stream(derive_stream_seed(20260815ULL, 0xBE7AULL));
  auto draw = [&stream]() {
    for (;;) {
      const double re = -0.85 + 2.0 * stream.uniform();
      const double im = -0.35 + 0.7 * stream.uniform();
      if (std::fabs(re - std::round(re)) < 0.08 && std::fabs(im) < 0.08) continue;
      return cplx(re, im);
    }
  };
  for (int i = 0; i < 6; ++i) {
    const cplx alpha = draw(), beta = draw();
    const auto P = beta_loop(alpha, beta);
    const auto R = beta_interval(alpha, beta);
    const double diff = std::abs(P.value - R.value);
    const double budget = 12.0 * (P.abs_error + R.abs_error) +
                          1e-12 * (std::abs(P.value) + std::abs(R.value)) + 1e-14;
    REQUIRE(diff <= budget, "dual evaluations agree within the error budget");
  }
}

void check_quadrature_basics() {
  test_section("quadrature primitives");
  const auto r1 = integrate_adaptive([](double t) { return cplx(t * t, 0.0); }, 0.0, 1.0);
  REQUIRE_CLOSE(r1.value.real(), 1.0 / 3.0, 1e-12, "adaptive polynomial");

  const auto r2 = integrate_tanh_sinh(
      [](double, double da, double db) {
        return cplx(1.0 / std::sqrt(da * db), 0.0);
      },
      0.0, 1.0);
  REQUIRE_CLOSE(r2.value.real(), kPi, 1e-9, "tanh-sinh endpoint singularities");

  const auto r3 = integrate_periodic(
      [](int nn, std::vector<cplx>& out) {
        out.resize(static_cast<std::size_t>(nn));
        for (int k = 0; k < nn; ++k) {
          const double t = kTwoPi * k / nn;
          out[static_cast<std::size_t>(k)] = cplx(std::exp(std::cos(t)), 0.0);
        }
      },
      kTwoPi);
  // 2 pi I_0(1), I_0(1) = 1.2660658777520083...
  REQUIRE_CLOSE(r3.value.real(), kTwoPi * 1.2660658777520083, 1e-9,
                "periodic trapezoid Bessel oracle");
}

}  // namespace

int main() {
  check_path_pieces();
  check_builders_throw();
  check_contour_geometry();
  check_beta_oracle();
  check_beta_gamma_identity();
  check_integer_exponent_kills_loop();
  check_rect_loop_residues();
  check_periodic_line();
  check_dual_methods();
  check_quadrature_basics();
  std::cout << "test_contour: all checks passed\n";
  return 0;
}

/**
 * @file test_params.cpp
 * @brief Checks kappa constants, dimension identities, neutrality, and correlation products.
 */
#include "radsle/params.hpp"

#include <random>

#include "harness.hpp"

using namespace radsle;

namespace {

void check_kappa_tables() {
    test_section("kappa tables");
    {
        const auto p = derive_params(4.0);
        REQUIRE_CLOSE(p.a, std::sqrt(0.5), 1e-15, "a(4)");
        REQUIRE_CLOSE(p.b, 0.0, 1e-15, "b(4)");
        REQUIRE_CLOSE(p.central_charge, 1.0, 1e-15, "c(4)");
        REQUIRE_CLOSE(p.fugacity, 2.0, 1e-12, "fugacity(4)");
    }
    {
        const auto p = derive_params(2.0);
        const cplx lam = conformal_dimension(cplx(p.a, 0.0), p);
        REQUIRE_CLOSE(lam.real(), 1.0, 1e-14, "lambda_b(a) at kappa=2");
        REQUIRE_CLOSE(lam.imag(), 0.0, 1e-14, "lambda_b(a) real");
    }
    {
        const auto p = derive_params(8.0 / 3.0);
        REQUIRE_CLOSE(p.fugacity, 0.0, 1e-14, "fugacity(8/3)");
    }
    // Screening charges have dimension one, and lambda_b(a) = (6-k)/(2k), for any kappa.
    for (double kappa : {2.0, 3.0, 3.7, 4.0, 6.0, 8.0 / 3.0}) {
        const auto p = derive_params(kappa);
        REQUIRE_CLOSE(conformal_dimension(cplx(p.a, 0.0), p).real(),
                      (6.0 - kappa) / (2.0 * kappa), 1e-13, "lambda_b(a)");
        REQUIRE_CLOSE(conformal_dimension(cplx(-2.0 * p.a, 0.0), p).real(), 1.0, 1e-13,
                      "lambda_b(-2a)");
        REQUIRE_CLOSE(conformal_dimension(cplx(2.0 * (p.a + p.b), 0.0), p).real(), 1.0, 1e-13,
                      "lambda_b(2(a+b))");
    }
    REQUIRE_THROWS(derive_params(0.0), "kappa=0 must be rejected");
    REQUIRE_THROWS(derive_params(-1.0), "negative kappa must be rejected");
}

void check_dimensions() {
    test_section("conformal dimensions");
    const auto p3 = derive_params(3.0);
    REQUIRE_CLOSE(conformal_dimension(cplx(0.0, 0.0), p3).real(), 0.0, 1e-15, "lambda_b(0)");
    // sigma = b - (n-2m)a/2 at n=4, m=1, kappa=3: (n-2m)^2/(4k) - (k-4)^2/(16k) = 0.3125.
    {
        const double sigma = p3.b - 2.0 * p3.a / 2.0;
        REQUIRE_CLOSE(conformal_dimension(cplx(sigma, 0.0), p3).real(), 0.3125, 1e-13,
                      "interior-charge dimension at n=4,m=1,kappa=3");
    }
    // Symmetry about b: lambda_b(sigma) = lambda_b(2b - sigma), 100 random complex sigma.
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    for (int t = 0; t < 100; ++t) {
        const cplx sigma(uni(gen), uni(gen));
        const cplx mirrored = 2.0 * p3.b - sigma;
        const cplx d1 = conformal_dimension(sigma, p3);
        const cplx d2 = conformal_dimension(mirrored, p3);
        REQUIRE(std::abs(d1 - d2) < 1e-12, "lambda_b symmetry about b");
    }
    // Classical dimensions: primary sigma^2 + 2 sigma, halved variant behind the flag.
    REQUIRE_CLOSE(classical_dimension(1.0), 3.0, 1e-15, "classical primary");
    REQUIRE_CLOSE(classical_dimension(1.0, true), 2.5, 1e-15, "classical halved");
    REQUIRE_CLOSE(classical_dimension(-2.0), 0.0, 1e-15, "classical screening charge");
}

void check_neutrality_examples() {
    test_section("neutrality");
    const auto p = derive_params(3.0);
    {
        Divisor d;
        d.points.push_back({PointKind::Boundary, cplx(0.3, 0.0), cplx(p.a, 0.0)});
        d.points.push_back({PointKind::Boundary, cplx(1.7, 0.0), cplx(2.0 * p.b - p.a, 0.0)});
        const auto r = check_neutrality(d, p, NeutralityMode::KappaPositive);
        REQUIRE(r.ok, "a + (2b-a) is neutral");
    }
    {
        // n=4 angles with charge a, one screening charge -2a, interior pair b - a.
        Divisor d;
        for (int j = 0; j < 4; ++j)
            d.points.push_back({PointKind::Boundary, cplx(0.5 * j, 0.0), cplx(p.a, 0.0)});
        d.points.push_back({PointKind::Boundary, cplx(2.9, 0.0), cplx(-2.0 * p.a, 0.0)});
        const cplx su(p.b - p.a, 0.0);
        d.points.push_back({PointKind::Interior, cplx(0.0, 1.0), su});
        d.points.push_back({PointKind::Infinity, cplx(0.0, 0.0), su});
        const auto r = check_neutrality(d, p, NeutralityMode::KappaPositive);
        REQUIRE(r.ok, "ground configuration n=4, m=1 is neutral");
    }
    {
        Divisor d;
        const auto r = check_neutrality(d, p, NeutralityMode::Classical);
        REQUIRE(!r.ok, "empty divisor fails classical neutrality");
        REQUIRE_CLOSE(std::abs(r.defect), 2.0, 1e-15, "classical defect of empty divisor");
    }
}

void check_angular_eval() {
    test_section("angular correlation");
    const auto p = derive_params(2.0); // a = 1
    Divisor d;
    d.points.push_back({PointKind::Boundary, cplx(0.0, 0.0), cplx(p.a, 0.0)});
    d.points.push_back({PointKind::Boundary, cplx(kPi, 0.0), cplx(p.a, 0.0)});
    REQUIRE_CLOSE(std::abs(eval_correlation(d, Geometry::Angular) - cplx(1.0, 0.0)), 0.0, 1e-14,
                  "sin(pi/2)^1");
    d.points[1].location = cplx(kPi / 3.0, 0.0);
    REQUIRE_CLOSE(std::abs(eval_correlation(d, Geometry::Angular) - cplx(0.5, 0.0)), 0.0, 1e-14,
                  "sin(pi/6)^1");

    // Positivity on the chamber with real charges.
    std::mt19937_64 gen(777);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        Divisor dv;
        double th = 0.1;
        for (int j = 0; j < 4; ++j) {
            th += 0.3 + 1.0 * uni(gen);
            dv.points.push_back({PointKind::Boundary, cplx(th, 0.0), cplx(2.0 * uni(gen) - 1.0, 0.0)});
        }
        if (dv.points.back().location.real() >= dv.points.front().location.real() + kTwoPi) continue;
        const cplx v = eval_correlation(dv, Geometry::Angular);
        REQUIRE(v.real() > 0.0 && std::abs(v.imag()) < 1e-13 * std::abs(v),
                "angular correlation positive on chamber");
    }

    // Spin factor: origin/infinity charges multiply in exp(i sigma_j (sigma_0 - sigma_inf) theta_j / 2).
    Divisor ds;
    ds.points.push_back({PointKind::Boundary, cplx(0.4, 0.0), cplx(1.2, 0.0)});
    ds.points.push_back({PointKind::Boundary, cplx(2.0, 0.0), cplx(-0.7, 0.0)});
    ds.points.push_back({PointKind::Origin, cplx(0.0, 0.0), cplx(0.0, 0.3)});
    ds.points.push_back({PointKind::Infinity, cplx(0.0, 0.0), cplx(0.0, -0.3)});
    const cplx with_spin = eval_correlation(ds, Geometry::Angular);
    Divisor ds0 = ds;
    ds0.points.resize(2);
    const cplx base = eval_correlation(ds0, Geometry::Angular);
    cplx expect = base;
    const cplx dspin(0.0, 0.6);
    expect *= std::exp(cplx(0.0, 0.5) * cplx(1.2, 0.0) * dspin * 0.4);
    expect *= std::exp(cplx(0.0, 0.5) * cplx(-0.7, 0.0) * dspin * 2.0);
    REQUIRE(std::abs(with_spin - expect) < 1e-13 * std::abs(expect), "angular spin factor");

    REQUIRE_THROWS(
        [] {
            Divisor bad;
            bad.points.push_back({PointKind::Boundary, cplx(0.0, 0.0), cplx(1.0, 0.0)});
            bad.points.push_back({PointKind::Boundary, cplx(0.0, 0.0), cplx(1.0, 0.0)});
            return eval_correlation(bad, Geometry::Angular);
        }(),
        "coincident angles are singular");
}

void check_double_divisor() {
    test_section("double divisor");
    const auto p = derive_params(2.0); // a = 1
    DoubleDivisor dd;
    dd.sigma_plus.points.push_back({PointKind::Interior, cplx(0.0, 1.0), cplx(p.a, 0.0)});
    dd.sigma_minus.points.push_back({PointKind::Interior, cplx(0.0, 1.0), cplx(p.a, 0.0)});
    const cplx v = eval_correlation(dd, Geometry::HalfPlane);
    REQUIRE_CLOSE(v.real(), 2.0, 1e-13, "(2 Im i)^{a^2} = 2");
    REQUIRE_CLOSE(v.imag(), 0.0, 1e-13, "self-pair is real");

    // Distinct plus/minus supports reduce to plain pair products against conjugated locations.
    DoubleDivisor dd2;
    dd2.sigma_plus.points.push_back({PointKind::Interior, cplx(0.3, 0.9), cplx(1.0, 0.0)});
    dd2.sigma_minus.points.push_back({PointKind::Interior, cplx(-0.4, 0.5), cplx(0.5, 0.0)});
    const cplx got = eval_correlation(dd2, Geometry::HalfPlane);
    const cplx want = std::exp(cplx(0.5, 0.0) * std::log(cplx(0.3, 0.9) - std::conj(cplx(-0.4, 0.5))));
    REQUIRE(std::abs(got - want) < 1e-13 * std::abs(want), "cross pair uses reflected location");

    REQUIRE_THROWS(
        [] {
            DoubleDivisor bad;
            bad.sigma_minus.points.push_back({PointKind::Boundary, cplx(0.1, 0.0), cplx(1.0, 0.0)});
            return eval_correlation(bad, Geometry::HalfPlane);
        }(),
        "sigma_minus boundary support rejected");
}

void check_translation_covariance() {
    test_section("translation covariance");
    const auto p = derive_params(3.4);
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
        // Random neutral divisor: n random charges plus one balancing charge.
        Divisor d;
        cplx sum{0.0, 0.0};
        for (int j = 0; j < 4; ++j) {
            const cplx q(uni(gen), 0.3 * uni(gen));
            sum += q;
            d.points.push_back({PointKind::Interior, cplx(2.0 * uni(gen), 2.0 + uni(gen)), q});
        }
        d.points.push_back({PointKind::Interior, cplx(5.0, 7.0), cplx(2.0 * p.b, 0.0) - sum});
        const cplx v0 = eval_correlation(d, Geometry::Sphere);
        Divisor ds = d;
        const cplx c(0.37, 0.0);
        for (auto& pt : ds.points) pt.location += c;
        const cplx v1 = eval_correlation(ds, Geometry::Sphere);
        REQUIRE(std::abs(v0 - v1) <= 1e-10 * std::max(1.0, std::abs(v0)),
                "sphere correlation invariant under translation");
    }
}

void check_theta_config() {
    test_section("theta config");
    const auto c = ThetaConfig::validated({0.1, 1.0, 2.5, 6.0});
    REQUIRE(c.in_chamber(), "validated config is in the chamber");
    REQUIRE_CLOSE(c.min_gap(), 0.1 + kTwoPi - 6.0, 1e-14, "wrap-around gap");
    REQUIRE_THROWS(ThetaConfig::validated({1.0, 0.5}), "descending angles rejected");
    REQUIRE_THROWS(ThetaConfig::validated({0.0, 1.0, 0.0 + kTwoPi}), "full-period overlap rejected");
}

} // namespace

int main() {
    check_kappa_tables();
    check_dimensions();
    check_neutrality_examples();
    check_angular_eval();
    check_double_divisor();
    check_translation_covariance();
    check_theta_config();
    std::cout << "test_params: all checks passed\n";
    return 0;
}

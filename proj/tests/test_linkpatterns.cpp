/**
 * @file test_linkpatterns.cpp
 * @brief Checks for link-pattern enumeration, the pattern grammar, and the
 *        annulus meander matrix.
 *
 * Pinned facts exercised below:
 *   - radial pattern counts equal binomial(n, m) for all n <= 8;
 *   - chordal counts equal binomial(n, m) - binomial(n, m-1), which for a
 *     perfect matching n = 2m is the Catalan number C_m;
 *   - the n = 2, m = 1 meander matrix is [[n(kappa), 2], [2, n(kappa)]];
 *   - the 6 x 6 radial meander matrix at n = 4, m = 2 is invertible at
 *     kappa = 3.9 and the pure-partition solve at kappa = 3.5 has a tiny
 *     residual.
 */
#include "radsle/linkpattern.hpp"
#include "radsle/meander.hpp"
#include "radsle/params.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "harness.hpp"

using namespace radsle;

namespace {

void check_binomial() {
  test_section("binomial coefficients");
  REQUIRE(binomial(0, 0) == 1, "binomial(0,0)");
  REQUIRE(binomial(8, 4) == 70, "binomial(8,4)");
  REQUIRE(binomial(62, 31) == 465428353255261088ULL, "binomial(62,31) fits in 64 bits");
  REQUIRE(binomial(5, 7) == 0, "k > n gives zero");
  REQUIRE_THROWS(binomial(80, 40), "binomial overflow must throw");
}

void check_radial_counts() {
  test_section("radial counts = binomial(n, m), n <= 8");
  for (int n = 1; n <= 8; ++n) {
    for (int m = 0; 2 * m <= n; ++m) {
      const auto pats = enumerate_radial(n, m);
      REQUIRE(pats.size() == binomial(n, m), "radial count mismatch");
      std::set<std::string> seen;
      for (const auto& p : pats) {
        p.validate();  // throws on any invariant violation
        REQUIRE(p.kind == PatternKind::Radial, "kind tag");
        REQUIRE(p.n == n && p.num_links() == m, "size fields");
        REQUIRE(seen.insert(p.to_string()).second, "duplicate pattern emitted");
      }
    }
  }
}

void check_chordal_counts() {
  test_section("chordal counts and Catalan specialization");
  for (int n = 1; n <= 8; ++n) {
    for (int m = 0; 2 * m <= n; ++m) {
      const auto pats = enumerate_chordal(n, m);
      const std::uint64_t want =
          binomial(n, m) - (m > 0 ? binomial(n, m - 1) : 0);
      REQUIRE(pats.size() == want, "chordal count mismatch");
      for (const auto& p : pats) {
        p.validate();
        REQUIRE(p.face_link == -1, "chordal patterns have no marked face");
      }
    }
  }
  // Perfect matchings n = 2m: Catalan numbers 1, 2, 5, 14.
  const std::uint64_t catalan[] = {1, 1, 2, 5, 14};
  for (int m = 1; m <= 4; ++m)
    REQUIRE(enumerate_chordal(2 * m, m).size() == catalan[m],
            "chordal perfect matchings = Catalan");
}

void check_no_crossings() {
  test_section("enumerated matchings are noncrossing");
  for (int n = 2; n <= 8; ++n) {
    for (int m = 1; 2 * m <= n; ++m) {
      for (const auto& p : enumerate_radial(n, m)) {
        for (std::size_t x = 0; x < p.links.size(); ++x) {
          for (std::size_t y = x + 1; y < p.links.size(); ++y) {
            const auto [a, b] = p.links[x];
            const auto [c, d] = p.links[y];
            const bool crossing = (a < c && c < b && b < d) || (c < a && a < d && d < b);
            REQUIRE(!crossing, "crossing links in enumerated pattern");
          }
        }
      }
    }
  }
}

void check_grammar_roundtrip() {
  test_section("grammar round trip");
  for (int n = 1; n <= 6; ++n) {
    for (int m = 0; 2 * m <= n; ++m) {
      for (const auto& p : enumerate_radial(n, m)) {
        const auto q = LinkPattern::parse(PatternKind::Radial, n, p.to_string());
        REQUIRE(q.links == p.links && q.rays == p.rays && q.face_link == p.face_link,
                "radial round trip");
      }
      for (const auto& p : enumerate_chordal(n, m)) {
        const auto q = LinkPattern::parse(PatternKind::Chordal, n, p.to_string());
        REQUIRE(q.links == p.links && q.rays == p.rays && q.face_link == p.face_link,
                "chordal round trip");
      }
    }
  }

  // Frozen string forms for the small families.
  std::set<std::string> two;
  for (const auto& p : enumerate_radial(2, 1)) two.insert(p.to_string());
  const std::set<std::string> two_want = {"(1 2)|rays:∅|winding:+",
                                          "(1 2)|rays:∅|winding:(1 2)"};
  REQUIRE(two == two_want, "n=2 m=1 string forms");

  std::set<std::string> three;
  for (const auto& p : enumerate_radial(3, 1)) three.insert(p.to_string());
  const std::set<std::string> three_want = {"(1 2)|rays:3|winding:+",
                                            "(2 3)|rays:1|winding:+",
                                            "(1 3)|rays:2|winding:(1 3)"};
  REQUIRE(three == three_want, "n=3 m=1 string forms");

  REQUIRE(enumerate_radial(1, 0).at(0).to_string() == "|rays:1|winding:+",
          "single-ray string form");
}

void check_parse_rejects_invalid() {
  test_section("parse validates invariants");
  REQUIRE_THROWS(LinkPattern::parse(PatternKind::Radial, 4, "(1 3)(2 4)|rays:∅|winding:+"),
                 "crossing links rejected");
  REQUIRE_THROWS(LinkPattern::parse(PatternKind::Radial, 3, "(1 2)|rays:3|winding:(1 2)"),
                 "ray outside the marked face rejected");
  REQUIRE_THROWS(LinkPattern::parse(PatternKind::Chordal, 4, "(1 4)|rays:2,3|winding:+"),
                 "enclosed chordal rays rejected");
  REQUIRE_THROWS(LinkPattern::parse(PatternKind::Chordal, 2, "(1 2)|rays:∅|winding:(1 2)"),
                 "chordal pattern with a marked face rejected");
  REQUIRE_THROWS(LinkPattern::parse(PatternKind::Radial, 4, "(1 2)(3 4)"),
                 "missing separators rejected");
  REQUIRE_THROWS(LinkPattern::parse(PatternKind::Radial, 2, "(2 1)|rays:∅|winding:+"),
                 "unordered endpoint pair rejected");
}

void check_enclosing_and_wraps() {
  test_section("enclosing_link and link_wraps");
  LinkPattern p;
  p.kind = PatternKind::Radial;
  p.n = 6;
  p.links = {{1, 6}, {2, 5}, {3, 4}};
  p.face_link = 2;
  p.validate();
  REQUIRE(p.enclosing_link(1) == -1, "endpoint of outermost link is unenclosed");
  REQUIRE(p.enclosing_link(2) == 0, "innermost strict container of 2");
  REQUIRE(p.enclosing_link(3) == 1, "innermost strict container of 3");
  REQUIRE(p.link_wraps(0) && p.link_wraps(1) && p.link_wraps(2),
          "all nested links wrap the innermost face");

  p.face_link = 0;
  REQUIRE(p.link_wraps(0) && !p.link_wraps(1) && !p.link_wraps(2),
          "outer face is wrapped only by the outer link");

  p.face_link = -1;
  for (int k = 0; k < 3; ++k)
    REQUIRE(!p.link_wraps(k), "outer face wrapped by no link");
}

void check_glue_two_point() {
  test_section("n=2 brute-force gluing oracle");
  auto pats = enumerate_radial(2, 1);
  REQUIRE(pats.size() == 2, "two patterns at n=2, m=1");
  // Order them: index 0 = puncture in the outer face, index 1 = inside (1 2).
  if (pats[0].face_link != -1) std::swap(pats[0], pats[1]);

  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto g = glue_patterns(pats[static_cast<std::size_t>(a)],
                                   pats[static_cast<std::size_t>(b)]);
      REQUIRE(g.rays_ok && g.through_lines == 0, "closed loops only");
      REQUIRE(g.contractible + g.noncontractible == 1, "exactly one loop");
      if (a == b)
        REQUIRE(g.contractible == 1, "matching faces give a contractible loop");
      else
        REQUIRE(g.noncontractible == 1, "mismatched faces wind around the puncture");
      REQUIRE(g.loop_windings.size() == 1, "one recorded winding");
      REQUIRE((g.loop_windings[0] == 0) == (a == b), "winding consistent with class");
    }
  }

  // Meander matrix [[n(kappa), 2], [2, n(kappa)]]; at kappa = 3 the fugacity is 1.
  const auto m3 = meander_matrix(pats, 3.0);
  REQUIRE_CLOSE(m3[0][0], 1.0, 1e-12, "diagonal = fugacity at kappa=3");
  REQUIRE_CLOSE(m3[1][1], 1.0, 1e-12, "diagonal = fugacity at kappa=3");
  REQUIRE_CLOSE(m3[0][1], 2.0, 1e-12, "off-diagonal = 2");
  REQUIRE_CLOSE(m3[1][0], 2.0, 1e-12, "off-diagonal = 2");

  const auto m4 = meander_matrix(pats, 4.0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      REQUIRE_CLOSE(m4[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)], 2.0, 1e-12,
                    "kappa=4 matrix is all 2s");

  // Pure-partition solve: invertible at kappa=3 with weights (-1/3, 2/3) for
  // target 0; singular at kappa=4.
  const auto pp = pure_partition_candidate(pats, 3.0, 0);
  REQUIRE_CLOSE(pp.weights.at(0), -1.0 / 3.0, 1e-12, "pure partition weight 0");
  REQUIRE_CLOSE(pp.weights.at(1), 2.0 / 3.0, 1e-12, "pure partition weight 1");
  REQUIRE(pp.residual < 1e-12, "pure partition residual");
  REQUIRE_THROWS(pure_partition_candidate(pats, 4.0, 0), "singular matrix must throw");
}

void check_glue_rays() {
  test_section("ray gluing: through lines and forbidden same-side strands");
  const auto single = enumerate_radial(1, 0);
  REQUIRE(single.size() == 1, "one pattern at n=1");
  const auto g = glue_patterns(single[0], single[0]);
  REQUIRE(g.rays_ok && g.through_lines == 1, "ray-to-ray through line");
  REQUIRE(g.contractible == 0 && g.noncontractible == 0, "no closed loops");
  REQUIRE_CLOSE(meander_entry(single[0], single[0], 0.77), 1.0, 1e-12,
                "through line weight 1, independent of fugacity");

  // Gluing a two-ray pattern against a perfect matching forces a strand that
  // joins two alpha rays: weight 0.
  const auto alpha = LinkPattern::parse(PatternKind::Radial, 4, "(2 3)|rays:1,4|winding:+");
  const auto beta = LinkPattern::parse(PatternKind::Radial, 4, "(1 2)(3 4)|rays:∅|winding:+");
  const auto bad = glue_patterns(alpha, beta);
  REQUIRE(!bad.rays_ok, "same-side ray strand flagged");
  REQUIRE_CLOSE(meander_entry(alpha, beta, 1.5), 0.0, 1e-300, "forbidden gluing weighs 0");
}

void check_meander_symmetry_and_det() {
  test_section("meander matrix symmetry and invertibility at n=4, m=2");
  const auto pats = enumerate_radial(4, 2);
  REQUIRE(pats.size() == 6, "six patterns at n=4, m=2");
  const auto mat = meander_matrix(pats, 3.9);
  for (std::size_t a = 0; a < mat.size(); ++a)
    for (std::size_t b = 0; b < mat.size(); ++b)
      REQUIRE_CLOSE(mat[a][b], mat[b][a], 1e-14, "meander matrix symmetric");

  // Invertibility at kappa = 3.9 and a clean solve at kappa = 3.5.
  for (const double kappa : {3.9, 3.5}) {
    for (int target = 0; target < 6; ++target) {
      const auto pp = pure_partition_candidate(pats, kappa, target);
      REQUIRE(pp.residual < 1e-10, "pure partition residual at n=4, m=2");
      REQUIRE(pp.condition > 0.0, "condition estimate populated");
    }
  }
}

void check_ray_counts_per_family() {
  test_section("meander entries vanish between unequal ray families");
  const auto a31 = enumerate_radial(3, 1).at(0);
  const auto a30 = enumerate_radial(3, 0).at(0);
  const auto g = glue_patterns(a31, a30);
  REQUIRE(!g.rays_ok, "1-ray vs 3-ray gluing cannot close up");
  REQUIRE_CLOSE(meander_entry(a31, a30, 1.0), 0.0, 1e-300, "mismatched rays weigh 0");
}

}  // namespace

int main() {
  check_binomial();
  check_radial_counts();
  check_chordal_counts();
  check_no_crossings();
  check_grammar_roundtrip();
  check_parse_rejects_invalid();
  check_enclosing_and_wraps();
  check_glue_two_point();
  check_glue_rays();
  check_meander_symmetry_and_det();
  check_ray_counts_per_family();
  std::cout << "test_linkpatterns: all checks passed\n";
  return 0;
}

/**
 * @file linkpattern.hpp
 * @brief Radial and chordal link patterns: noncrossing partial matchings of n
 *        boundary points with m links, n-2m rays, and (radial case) a marked
 *        face recording where the interior puncture sits.
 *
 * Disk picture conventions: points are labelled 1..n counterclockwise, links
 * are drawn as noncrossing chords, and "point k lies inside link (i j)" means
 * i < k < j in the linear order. The puncture face is identified by the
 * innermost link enclosing it (face_link >= 0) or the outer face (-1). A ray
 * from point k can reach the puncture iff the innermost link enclosing k is
 * exactly the face link.
 */
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace radsle {

enum class PatternKind { Radial, Chordal };

struct LinkPattern {
  PatternKind kind = PatternKind::Radial;
  int n = 0;
  /** 1-based endpoint pairs (i, j) with i < j, sorted by first endpoint. */
  std::vector<std::pair<int, int>> links;
  /** Unmatched points, ascending. */
  std::vector<int> rays;
  /** -1 for the outer face, else index into links of the innermost enclosing link. */
  int face_link = -1;

  int num_links() const { return static_cast<int>(links.size()); }

  /** Throws std::domain_error describing the first violated invariant. */
  void validate() const;

  /** Innermost link strictly containing point k (1-based), or -1. */
  int enclosing_link(int point) const;

  /** True iff the puncture face lies inside link `link_index` (ancestor-or-self of face_link). */
  bool link_wraps(int link_index) const;

  /** Grammar: "(1 2)(3 4)|rays:∅|winding:+" with winding:(i j) for an inner face. */
  std::string to_string() const;
  static LinkPattern parse(PatternKind kind, int n, const std::string& text);
};

/**
 * All valid radial patterns with n points and m links. The count equals
 * binomial(n, m): ray-bearing matchings admit at most one face (all rays must
 * share one enclosing link), perfect matchings admit m+1 faces.
 */
std::vector<LinkPattern> enumerate_radial(int n, int m);

/**
 * All chordal patterns (no puncture; every ray must be unenclosed, face -1).
 * The count equals binomial(n, m) - binomial(n, m-1).
 */
std::vector<LinkPattern> enumerate_chordal(int n, int m);

/** Exact binomial coefficient in 64-bit (throws on overflow). */
std::uint64_t binomial(int n, int k);

} // namespace radsle

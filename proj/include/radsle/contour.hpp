/**
 * @file contour.hpp
 * @brief Screening contours as piecewise paths: Pochhammer double loops
 *        realized as four lassos from a shared base point, counterclockwise
 *        rectangle loops (used when all exponents at a variable are integers),
 *        horizontal period-long lines in the covering strip, and plain
 *        intervals for the endpoint-reduction identity.
 *
 * All builders keep the loop body in the lower half of the covering strip
 * (Im z < 0) except the periodic line, which sits at a prescribed positive
 * height. The anchor is the branch reference point: factor logarithms are
 * initialized with principal values there and continued along the path.
 */
#pragma once

#include "radsle/params.hpp"

#include <vector>

namespace radsle {

enum class PieceKind { Segment, Arc };

struct PathPiece {
  PieceKind kind = PieceKind::Segment;
  cplx a, b;              ///< segment endpoints
  cplx center;            ///< arc center
  double radius = 0.0;    ///< arc radius
  double ang0 = 0.0, ang1 = 0.0;  ///< arc angles; ang1 < ang0 encodes clockwise

  static PathPiece segment(cplx a, cplx b);
  static PathPiece arc(cplx center, double radius, double ang0, double ang1);

  cplx at(double t) const;      ///< point at parameter t in [0, 1]
  cplx deriv(double t) const;   ///< d(point)/dt
  double approx_len() const;
};

enum class ContourKind { Pochhammer, RectLoop, PeriodicLine, Interval };

struct Contour {
  ContourKind kind = ContourKind::Interval;
  std::vector<PathPiece> lead_in;  ///< walked for branch transport, not integrated
  std::vector<PathPiece> pieces;   ///< integrated in order
  cplx anchor;                      ///< branch reference point
  double anchor_s = 0.0;            ///< walk parameter of the anchor (Interval only)
  bool closed = false;
  double period = 0.0;              ///< PeriodicLine: translation identifying the ends

  cplx start() const { return pieces.front().at(0.0); }
  cplx end() const { return pieces.back().at(1.0); }
};

/**
 * Pochhammer commutator contour around real punctures p < q: the lasso word
 * l_q l_p l_q^{-1} l_p^{-1}, each lasso a rail at depth `depth` below the axis
 * from the base point (anchor_re, -depth), a vertical tail, and a radius-r
 * circle around the puncture entered at its bottom (counterclockwise for the
 * first two lassos, clockwise for the inverses). Requires depth >= r.
 */
Contour make_pochhammer(double p, double q, double r, double depth, double anchor_re);

/**
 * Counterclockwise rectangle [p - margin, q + margin] x [-half_height, half_height],
 * entered at (anchor_re, -half_height). Used when the integrand is single-valued
 * in the variable (all exponents integral) and the Pochhammer prefactor vanishes.
 */
Contour make_rect_loop(double p, double q, double margin, double half_height, double anchor_re);

/** Horizontal segment from (start_re + i*height) of length `period` (covering-strip circle). */
Contour make_periodic_line(double start_re, double height, double period);

/** Plain interval p -> q on the real axis with interior branch anchor at anchor_re. */
Contour make_interval(double p, double q, double anchor_re);

/** Minimum distance between the integrated pieces of two contours (sampled). */
double contour_min_distance(const Contour& A, const Contour& B);

/** Minimum distance from the integrated pieces of A to a point (sampled). */
double contour_min_distance_to_point(const Contour& A, cplx p);

} // namespace radsle

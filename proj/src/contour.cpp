/**
 * @file contour.cpp
 * @brief Construction of lasso, rectangle, line, and interval contours.
 */
#include "radsle/contour.hpp"

#include <cmath>
#include <stdexcept>

namespace radsle {

PathPiece PathPiece::segment(cplx a, cplx b) {
  PathPiece p;
  p.kind = PieceKind::Segment;
  p.a = a;
  p.b = b;
  return p;
}

PathPiece PathPiece::arc(cplx center, double radius, double ang0, double ang1) {
  PathPiece p;
  p.kind = PieceKind::Arc;
  p.center = center;
  p.radius = radius;
  p.ang0 = ang0;
  p.ang1 = ang1;
  return p;
}

cplx PathPiece::at(double t) const {
  if (kind == PieceKind::Segment) return a + (b - a) * t;
  const double ang = ang0 + (ang1 - ang0) * t;
  return center + radius * cplx(std::cos(ang), std::sin(ang));
}

cplx PathPiece::deriv(double t) const {
  if (kind == PieceKind::Segment) return b - a;
  const double ang = ang0 + (ang1 - ang0) * t;
  return radius * (ang1 - ang0) * cplx(-std::sin(ang), std::cos(ang));
}

double PathPiece::approx_len() const {
  if (kind == PieceKind::Segment) return std::abs(b - a);
  return radius * std::abs(ang1 - ang0);
}

namespace {

/// One lasso around puncture x from base B = (anchor_re, -depth): rail out,
/// optional vertical tail up to the circle, the circle itself split into
/// quarter arcs (entered at angle -pi/2), then the tail and rail back.
void append_lasso(std::vector<PathPiece>& out, double x, double anchor_re, double r,
                  double depth, bool ccw) {
  const cplx B(anchor_re, -depth);
  const cplx rail_end(x, -depth);
  const cplx circle_bottom(x, -r);
  out.push_back(PathPiece::segment(B, rail_end));
  if (depth > r + 1e-12) out.push_back(PathPiece::segment(rail_end, circle_bottom));
  const double a0 = -kPi / 2.0;
  const double a1 = ccw ? a0 + kTwoPi : a0 - kTwoPi;
  const cplx c(x, 0.0);
  for (int qtr = 0; qtr < 4; ++qtr) {
    const double s0 = a0 + (a1 - a0) * qtr / 4.0;
    const double s1 = a0 + (a1 - a0) * (qtr + 1) / 4.0;
    out.push_back(PathPiece::arc(c, r, s0, s1));
  }
  if (depth > r + 1e-12) out.push_back(PathPiece::segment(circle_bottom, rail_end));
  out.push_back(PathPiece::segment(rail_end, B));
}

} // namespace

Contour make_pochhammer(double p, double q, double r, double depth, double anchor_re) {
  if (!(p < q)) throw std::domain_error("make_pochhammer: need p < q");
  if (!(r > 0) || depth < r - 1e-12) throw std::domain_error("make_pochhammer: need depth >= r > 0");
  Contour c;
  c.kind = ContourKind::Pochhammer;
  c.anchor = cplx(anchor_re, 0.0);
  c.closed = true;
  c.lead_in.push_back(PathPiece::segment(c.anchor, cplx(anchor_re, -depth)));
  append_lasso(c.pieces, q, anchor_re, r, depth, true);
  append_lasso(c.pieces, p, anchor_re, r, depth, true);
  append_lasso(c.pieces, q, anchor_re, r, depth, false);
  append_lasso(c.pieces, p, anchor_re, r, depth, false);
  return c;
}

Contour make_rect_loop(double p, double q, double margin, double half_height,
                       double anchor_re) {
  if (!(p <= q)) throw std::domain_error("make_rect_loop: need p <= q");
  if (!(margin > 0) || !(half_height > 0))
    throw std::domain_error("make_rect_loop: need positive margin and half_height");
  const double lo = p - margin, hi = q + margin;
  if (!(lo < anchor_re && anchor_re < hi))
    throw std::domain_error("make_rect_loop: anchor must lie inside the horizontal span");
  Contour c;
  c.kind = ContourKind::RectLoop;
  c.anchor = cplx(anchor_re, 0.0);
  c.closed = true;
  const cplx B(anchor_re, -half_height);
  c.lead_in.push_back(PathPiece::segment(c.anchor, B));
  c.pieces.push_back(PathPiece::segment(B, cplx(hi, -half_height)));
  c.pieces.push_back(PathPiece::segment(cplx(hi, -half_height), cplx(hi, half_height)));
  c.pieces.push_back(PathPiece::segment(cplx(hi, half_height), cplx(lo, half_height)));
  c.pieces.push_back(PathPiece::segment(cplx(lo, half_height), cplx(lo, -half_height)));
  c.pieces.push_back(PathPiece::segment(cplx(lo, -half_height), B));
  return c;
}

Contour make_periodic_line(double start_re, double height, double period) {
  if (!(period > 0)) throw std::domain_error("make_periodic_line: need period > 0");
  Contour c;
  c.kind = ContourKind::PeriodicLine;
  c.anchor = cplx(start_re, height);
  c.closed = false;
  c.period = period;
  c.pieces.push_back(PathPiece::segment(c.anchor, cplx(start_re + period, height)));
  return c;
}

Contour make_interval(double p, double q, double anchor_re) {
  if (!(p < anchor_re && anchor_re < q))
    throw std::domain_error("make_interval: anchor must lie strictly inside (p, q)");
  Contour c;
  c.kind = ContourKind::Interval;
  c.anchor = cplx(anchor_re, 0.0);
  c.anchor_s = (anchor_re - p) / (q - p);
  c.closed = false;
  c.pieces.push_back(PathPiece::segment(cplx(p, 0.0), cplx(q, 0.0)));
  return c;
}

namespace {
constexpr int kSamplesPerPiece = 33;
} // namespace

double contour_min_distance(const Contour& A, const Contour& B) {
  double best = 1e300;
  for (const auto& pa : A.pieces)
    for (const auto& pb : B.pieces)
      for (int i = 0; i < kSamplesPerPiece; ++i) {
        const cplx za = pa.at(static_cast<double>(i) / (kSamplesPerPiece - 1));
        for (int j = 0; j < kSamplesPerPiece; ++j) {
          const cplx zb = pb.at(static_cast<double>(j) / (kSamplesPerPiece - 1));
          best = std::min(best, std::abs(za - zb));
        }
      }
  return best;
}

double contour_min_distance_to_point(const Contour& A, cplx p) {
  double best = 1e300;
  for (const auto& pa : A.pieces)
    for (int i = 0; i < kSamplesPerPiece; ++i) {
      const cplx za = pa.at(static_cast<double>(i) / (kSamplesPerPiece - 1));
      best = std::min(best, std::abs(za - p));
    }
  return best;
}

} // namespace radsle

/**
 * @file integrand.hpp
 * @brief Multivalued screening integrands and their iterated contour integrals.
 *
 * An integrand is a product of power factors core(z_owner - other)^exponent
 * (core = sin(./2) in the angular chart, identity in the plane chart) and
 * entire exponential factors e^{c z}. Branches are fixed once and for all by
 * taking principal logarithms at the anchor tuple (every integration variable
 * at its contour anchor) and continuing each factor's logarithm along the
 * integration paths:
 *   - a factor coupling an outer variable u to a deeper variable v is "owned"
 *     by v and "transported" by u: while u's contour is walked, the factor is
 *     tracked at z_v frozen at v's anchor, and the walked logarithm is handed
 *     to v's walker as that factor's initial value;
 *   - a fresh walker (with its own snapshot cache) is created for every
 *     invocation of an inner integral, so branch history is always the one
 *     accumulated along the actual nested path.
 *
 * Closed contours verify zero winding after integration: a Pochhammer
 * commutator requires every tracked logarithm to return exactly (< 1e-9),
 * a rectangle loop requires the factor VALUES to return (the logarithm may
 * pick up 2 pi i k on integer-exponent factors), and a periodic line requires
 * the full product to be period-invariant.
 */
#pragma once

#include "radsle/contour.hpp"
#include "radsle/params.hpp"
#include "radsle/quadrature.hpp"

#include <map>
#include <unordered_map>
#include <vector>

namespace radsle {

enum class CoreKind { SinHalf, Linear };

/** Power factor core(z_owner - other)^exponent; `other` is a fixed point or an outer variable. */
struct Factor {
  CoreKind core = CoreKind::SinHalf;
  int owner = -1;   ///< integration variable (level index) the factor is owned by
  int outer = -1;   ///< outer integration variable it couples to, or -1 for a fixed point
  cplx ref;         ///< the fixed point when outer == -1
  cplx exponent;
};

/** Entire factor exp(coeff * z_var). */
struct ExpFactor {
  int var = -1;
  cplx coeff;
};

struct LevelSpec {
  Contour contour;
  double abs_tol = 1e-9;
  double rel_tol = 1e-10;
  /** Endpoint-reduced interval (tanh-sinh, analytic endpoint branch data). */
  bool reduced = false;
  cplx reduction_prefactor = 1.0;
  int endpoint_lo = -1;  ///< factor index vanishing at the lower endpoint
  int endpoint_hi = -1;  ///< factor index vanishing at the upper endpoint
};

/**
 * Walks one contour for one variable, carrying continuous logarithms of a set
 * of tracked factors. Continuation uses principal-ratio steps (argument change
 * below pi/4, else bisection; a step below 1e-12 raises "branch walk stalled").
 * Snapshots are cached so out-of-order targets (adaptive quadrature) resume
 * from the nearest visited parameter.
 */
class BranchWalker {
 public:
  struct Tracked {
    CoreKind core = CoreKind::SinHalf;
    cplx other;          ///< the fixed end of the pair while this contour is walked
    bool negate = false; ///< argument = negate ? other - z : z - other
  };

  BranchWalker(const Contour& path, std::vector<Tracked> tracked,
               const std::vector<std::pair<std::size_t, cplx>>& preset_logs = {});

  double s_total() const { return static_cast<double>(all_.size()); }
  double s_integrate_begin() const { return static_cast<double>(lead_); }
  double s_anchor() const { return s_anchor_; }

  cplx point_at(double s) const;
  cplx deriv_at(double s) const;

  /** Continue the walk to parameter s and return the tracked logarithms there. */
  const std::vector<cplx>& logs_at(double s);

  cplx core_value(std::size_t idx, cplx z) const;

 private:
  std::vector<PathPiece> all_;
  int lead_ = 0;
  double s_anchor_ = 0.0;
  std::vector<Tracked> tracked_;
  std::map<double, std::vector<cplx>> snaps_;
  std::vector<cplx> scratch_;

  void walk(double s_from, const std::vector<cplx>& logs_from, double s_to);
};

/**
 * A full iterated integral: levels[k] integrates variable k (outermost first).
 * Factors and exponentials refer to variables by level index. evaluate()
 * returns the value together with a conservative absolute-error estimate.
 */
struct IteratedIntegral {
  int num_vars = 0;
  std::vector<Factor> factors;
  std::vector<ExpFactor> exps;
  std::vector<LevelSpec> levels;

  QuadResult evaluate() const;
};

} // namespace radsle

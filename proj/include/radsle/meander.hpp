/**
 * @file meander.hpp
 * @brief Annulus meander combinatorics: glue a link pattern alpha (drawn in the
 *        punctured disk) against the reflection z -> 1/conj(z) of a pattern
 *        beta, count the resulting loops by winding class, and assemble the
 *        meander matrix with loop weights
 *            contractible loop      -> fugacity n(kappa) = -2 cos(4 pi / kappa),
 *            noncontractible loop   -> 2,
 *            ray-to-ray through line-> 1 (alpha ray glued to beta ray).
 *        A strand joining two alpha rays (or two beta rays) cannot be realized
 *        in the annulus; such gluings carry weight 0.
 */
#pragma once

#include "radsle/linkpattern.hpp"

#include <vector>

namespace radsle {

struct GlueResult {
  int contractible = 0;     ///< loops with zero winding around the puncture
  int noncontractible = 0;  ///< loops with nonzero winding
  int through_lines = 0;    ///< alpha-ray <-> beta-ray strands (weight 1)
  bool rays_ok = true;      ///< false iff some strand joins two rays on the same side
  std::vector<int> loop_windings;  ///< winding number per closed loop
};

/** Trace all strands of the gluing of alpha with reflected beta. */
GlueResult glue_patterns(const LinkPattern& alpha, const LinkPattern& beta);

/** Single meander-matrix entry given the loop fugacity. */
double meander_entry(const LinkPattern& alpha, const LinkPattern& beta, double fugacity);

/** Full Gram-style matrix M[a][b] = meander_entry(patterns[a], patterns[b], fugacity). */
std::vector<std::vector<double>> meander_matrix(const std::vector<LinkPattern>& patterns,
                                                double kappa);

struct PurePartitionResult {
  std::vector<double> weights;  ///< solution of M w = e_target
  double condition = 0.0;      ///< 2-norm condition estimate of M
  double residual = 0.0;       ///< max-norm of M w - e_target
};

/**
 * EXPERIMENTAL: candidate pure-partition weights for one pattern, obtained by
 * solving the meander Gram system against the unit vector of `target`.
 * Throws std::runtime_error (message includes kappa) when M is singular.
 */
PurePartitionResult pure_partition_candidate(const std::vector<LinkPattern>& patterns,
                                             double kappa, int target);

} // namespace radsle

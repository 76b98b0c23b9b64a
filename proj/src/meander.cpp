/**
 * @file meander.cpp
 * @brief Strand tracing on the two-punctured sphere and the meander Gram matrix.
 *
 * Winding bookkeeping: place the points at theta_k = 2 pi k / n on the common
 * circle. An arc of link l = (i, j) traversed i -> j deforms, inside its own
 * punctured disk, to a boundary path with angular displacement
 *     (theta_j - theta_i) mod 2pi            if the puncture is outside l,
 *     (theta_j - theta_i) mod 2pi  -  2 pi   if the puncture is inside l,
 * and backward traversal negates the displacement. The winding number of a
 * closed loop is the displacement sum divided by 2 pi.
 */
#include "radsle/meander.hpp"

#include "radsle/params.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace radsle {

namespace {

struct Side {
  std::vector<int> match;      // 1-based partner, or 0 for a ray
  std::vector<int> link_index; // index of the link at this point, or -1
  std::vector<char> wraps;     // per link: puncture inside?
};

Side build_side(const LinkPattern& p) {
  Side s;
  s.match.assign(static_cast<std::size_t>(p.n) + 1, 0);
  s.link_index.assign(static_cast<std::size_t>(p.n) + 1, -1);
  s.wraps.assign(p.links.size(), 0);
  for (std::size_t idx = 0; idx < p.links.size(); ++idx) {
    const auto [i, j] = p.links[idx];
    s.match[static_cast<std::size_t>(i)] = j;
    s.match[static_cast<std::size_t>(j)] = i;
    s.link_index[static_cast<std::size_t>(i)] = static_cast<int>(idx);
    s.link_index[static_cast<std::size_t>(j)] = static_cast<int>(idx);
    s.wraps[idx] = p.link_wraps(static_cast<int>(idx)) ? 1 : 0;
  }
  return s;
}

} // namespace

GlueResult glue_patterns(const LinkPattern& alpha, const LinkPattern& beta) {
  if (alpha.n != beta.n) throw std::domain_error("glue_patterns: point counts differ");
  alpha.validate();
  beta.validate();
  const int n = alpha.n;
  const Side A = build_side(alpha);
  const Side B = build_side(beta);

  std::vector<double> theta(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 1; k <= n; ++k) theta[static_cast<std::size_t>(k)] = kTwoPi * k / n;

  // displacement of traversing a link from u to its partner v
  auto delta = [&](const Side& S, const LinkPattern& pat, int u) {
    const int li = S.link_index[static_cast<std::size_t>(u)];
    const auto [i, j] = pat.links[static_cast<std::size_t>(li)];
    double fwd = std::fmod(theta[static_cast<std::size_t>(j)] - theta[static_cast<std::size_t>(i)], kTwoPi);
    if (fwd < 0) fwd += kTwoPi;
    if (S.wraps[static_cast<std::size_t>(li)]) fwd -= kTwoPi;
    return (u == i) ? fwd : -fwd;
  };

  GlueResult res;
  std::vector<char> va(static_cast<std::size_t>(n) + 1, 0); // consumed alpha side
  std::vector<char> vb(static_cast<std::size_t>(n) + 1, 0); // consumed beta side

  // Path strands first: start at every ray end.
  for (int start = 1; start <= n; ++start) {
    // strand entering the figure at alpha ray `start`
    if (A.match[static_cast<std::size_t>(start)] == 0 && !va[static_cast<std::size_t>(start)]) {
      va[static_cast<std::size_t>(start)] = 1;
      int cur = start;
      for (;;) {
        // cross to the beta side of cur
        if (B.match[static_cast<std::size_t>(cur)] == 0) {
          if (vb[static_cast<std::size_t>(cur)])
            throw std::logic_error("glue_patterns: beta ray consumed twice");
          vb[static_cast<std::size_t>(cur)] = 1;
          ++res.through_lines;  // alpha puncture -> beta puncture
          break;
        }
        vb[static_cast<std::size_t>(cur)] = 1;
        int nxt = B.match[static_cast<std::size_t>(cur)];
        vb[static_cast<std::size_t>(nxt)] = 1;
        cur = nxt;
        if (A.match[static_cast<std::size_t>(cur)] == 0) {
          va[static_cast<std::size_t>(cur)] = 1;
          res.rays_ok = false;  // both ends on the alpha puncture
          break;
        }
        va[static_cast<std::size_t>(cur)] = 1;
        nxt = A.match[static_cast<std::size_t>(cur)];
        va[static_cast<std::size_t>(nxt)] = 1;
        cur = nxt;
      }
    }
    // strand entering at beta ray `start` (not already consumed above)
    if (B.match[static_cast<std::size_t>(start)] == 0 && !vb[static_cast<std::size_t>(start)]) {
      vb[static_cast<std::size_t>(start)] = 1;
      int cur = start;
      for (;;) {
        if (A.match[static_cast<std::size_t>(cur)] == 0) {
          // would have been consumed by the alpha-ray pass; reaching here means
          // an isolated alpha ray paired with this beta ray
          va[static_cast<std::size_t>(cur)] = 1;
          ++res.through_lines;
          break;
        }
        va[static_cast<std::size_t>(cur)] = 1;
        int nxt = A.match[static_cast<std::size_t>(cur)];
        va[static_cast<std::size_t>(nxt)] = 1;
        cur = nxt;
        if (B.match[static_cast<std::size_t>(cur)] == 0) {
          vb[static_cast<std::size_t>(cur)] = 1;
          res.rays_ok = false;  // both ends on the beta puncture
          break;
        }
        vb[static_cast<std::size_t>(cur)] = 1;
        nxt = B.match[static_cast<std::size_t>(cur)];
        vb[static_cast<std::size_t>(nxt)] = 1;
        cur = nxt;
      }
    }
  }

  // Closed loops: alternate alpha / beta links from any unconsumed point.
  for (int start = 1; start <= n; ++start) {
    if (va[static_cast<std::size_t>(start)]) continue;
    double disp = 0.0;
    int cur = start;
    do {
      va[static_cast<std::size_t>(cur)] = 1;
      disp += delta(A, alpha, cur);
      int nxt = A.match[static_cast<std::size_t>(cur)];
      va[static_cast<std::size_t>(nxt)] = 1;
      cur = nxt;
      vb[static_cast<std::size_t>(cur)] = 1;
      disp += delta(B, beta, cur);
      nxt = B.match[static_cast<std::size_t>(cur)];
      vb[static_cast<std::size_t>(nxt)] = 1;
      cur = nxt;
    } while (cur != start);
    const double w = disp / kTwoPi;
    const int wi = static_cast<int>(std::lround(w));
    if (std::abs(w - wi) > 1e-9) throw std::logic_error("glue_patterns: non-integer winding");
    res.loop_windings.push_back(wi);
    if (wi == 0)
      ++res.contractible;
    else
      ++res.noncontractible;
  }

  // conservation: every point consumed exactly once per side
  for (int k = 1; k <= n; ++k)
    if (!va[static_cast<std::size_t>(k)] || !vb[static_cast<std::size_t>(k)])
      throw std::logic_error("glue_patterns: strand tracing left an unconsumed end");

  return res;
}

double meander_entry(const LinkPattern& alpha, const LinkPattern& beta, double fugacity) {
  const GlueResult g = glue_patterns(alpha, beta);
  if (!g.rays_ok) return 0.0;
  double v = 1.0;
  for (int i = 0; i < g.noncontractible; ++i) v *= 2.0;
  for (int i = 0; i < g.contractible; ++i) v *= fugacity;
  return v;  // through lines carry weight 1
}

std::vector<std::vector<double>> meander_matrix(const std::vector<LinkPattern>& patterns,
                                                double kappa) {
  const KappaParams kp = derive_params(kappa);
  const std::size_t N = patterns.size();
  std::vector<std::vector<double>> M(N, std::vector<double>(N, 0.0));
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a; b < N; ++b) {
      const double v = meander_entry(patterns[a], patterns[b], kp.fugacity);
      M[a][b] = v;
      M[b][a] = v;
    }
  return M;
}

PurePartitionResult pure_partition_candidate(const std::vector<LinkPattern>& patterns,
                                             double kappa, int target) {
  const auto Mv = meander_matrix(patterns, kappa);
  const int N = static_cast<int>(Mv.size());
  if (target < 0 || target >= N) throw std::domain_error("pure_partition_candidate: target out of range");
  Eigen::MatrixXd M(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) M(i, j) = Mv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(N - 1);
  if (!(smin > smax * 1e-13)) {
    throw std::runtime_error("pure_partition_candidate: meander matrix singular at kappa=" +
                             std::to_string(kappa));
  }
  Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
  e(target) = 1.0;
  const Eigen::VectorXd w = svd.solve(e);

  PurePartitionResult res;
  res.weights.assign(w.data(), w.data() + N);
  res.condition = smax / smin;
  res.residual = (M * w - e).lpNorm<Eigen::Infinity>();
  return res;
}

} // namespace radsle

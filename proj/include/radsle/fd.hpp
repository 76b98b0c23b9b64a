/**
 * @file fd.hpp
 * @brief Finite-difference machinery for partial derivatives of correlation
 *        functions: 4th-order central stencils with optional Richardson
 *        extrapolation, plus a memoizing wrapper so stencil points shared by
 *        several operators are evaluated once.
 */
#pragma once

#include "radsle/params.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

namespace radsle {

/** A (possibly expensive) function of the angular configuration. */
using PsiFn = std::function<cplx(const std::vector<double>&)>;

struct FiniteDiffScheme {
  double step = 1e-3;       ///< base step h
  int order = 4;            ///< central stencil order: 2 or 4
  int richardson_levels = 2;///< number of step sizes used (1 = no extrapolation)
};

/**
 * Memoizes psi on quantized configurations (angles rounded at 1e-12) so that
 * overlapping stencils reuse evaluations. Copies share the underlying cache.
 */
class CachedPsi {
 public:
  explicit CachedPsi(PsiFn fn);
  cplx operator()(const std::vector<double>& theta) const;
  std::size_t evaluations() const { return state_->misses; }
  std::size_t hits() const { return state_->hits; }

 private:
  struct State {
    PsiFn fn;
    std::unordered_map<std::string, cplx> cache;
    std::size_t hits = 0, misses = 0;
  };
  std::shared_ptr<State> state_;
};

/** d/d theta_j with Richardson extrapolation per the scheme. */
cplx fd_partial(const PsiFn& f, const std::vector<double>& theta, int j,
                const FiniteDiffScheme& scheme);

/** d^2/d theta_j^2 with Richardson extrapolation per the scheme. */
cplx fd_partial2(const PsiFn& f, const std::vector<double>& theta, int j,
                 const FiniteDiffScheme& scheme);

/** Single-step (no Richardson) derivative at step h; used by the order check. */
cplx fd_partial_single(const PsiFn& f, const std::vector<double>& theta, int j,
                       double h, int order);
cplx fd_partial2_single(const PsiFn& f, const std::vector<double>& theta, int j,
                        double h, int order);

/**
 * d/dt and d^2/dt^2 of a complex-valued path g at t = 0 per the scheme.  For a
 * holomorphic function probed along the real direction this is the complex
 * derivative, which is how the interior-point derivatives of the Ward
 * identities are formed.
 */
cplx fd_path_d1(const std::function<cplx(double)>& g, const FiniteDiffScheme& scheme);
cplx fd_path_d2(const std::function<cplx(double)>& g, const FiniteDiffScheme& scheme);

} // namespace radsle

/**
 * @file fd.cpp
 * @brief Central-difference stencils and iterated Richardson extrapolation.
 *
 * A central stencil of order p has an error expansion in even powers of h
 * starting at h^p, so the j-th Richardson stage with step halving removes the
 * h^{p+2(j-1)} term:
 *     R_{i,0} = D(h / 2^i),
 *     R_{i,j} = (4^{(p/2)+j-1} R_{i,j-1} - R_{i-1,j-1}) / (4^{(p/2)+j-1} - 1).
 */
#include "radsle/fd.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace radsle {

namespace {

std::string quantize_key(const std::vector<double>& theta) {
  std::string key;
  key.reserve(theta.size() * sizeof(long long));
  for (double t : theta) {
    const long long q = static_cast<long long>(std::llround(t * 1e12));
    key.append(reinterpret_cast<const char*>(&q), sizeof(q));
  }
  return key;
}

cplx stencil_d1(const PsiFn& f, const std::vector<double>& theta, int j, double h, int order) {
  std::vector<double> t = theta;
  auto at = [&](double off) {
    t[static_cast<std::size_t>(j)] = theta[static_cast<std::size_t>(j)] + off;
    return f(t);
  };
  if (order == 2) return (at(h) - at(-h)) / (2.0 * h);
  // order 4: (-f(2h) + 8 f(h) - 8 f(-h) + f(-2h)) / (12 h)
  return (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
}

cplx stencil_d2(const PsiFn& f, const std::vector<double>& theta, int j, double h, int order) {
  std::vector<double> t = theta;
  auto at = [&](double off) {
    t[static_cast<std::size_t>(j)] = theta[static_cast<std::size_t>(j)] + off;
    return f(t);
  };
  if (order == 2) return (at(h) - 2.0 * at(0) + at(-h)) / (h * h);
  // order 4: (-f(2h) + 16 f(h) - 30 f(0) + 16 f(-h) - f(-2h)) / (12 h^2)
  return (-at(2 * h) + 16.0 * at(h) - 30.0 * at(0) + 16.0 * at(-h) - at(-2 * h)) / (12.0 * h * h);
}

template <typename Stencil>
cplx richardson(const Stencil& D, double h, int order, int levels) {
  if (levels < 1) throw std::domain_error("richardson_levels must be >= 1");
  std::vector<cplx> row(static_cast<std::size_t>(levels));
  std::vector<cplx> prev;
  for (int i = 0; i < levels; ++i) {
    row[0] = D(h / std::pow(2.0, i));
    for (int jj = 1; jj <= i; ++jj) {
      const double fac = std::pow(4.0, order / 2 + jj - 1);
      row[static_cast<std::size_t>(jj)] =
          (fac * row[static_cast<std::size_t>(jj - 1)] - prev[static_cast<std::size_t>(jj - 1)]) /
          (fac - 1.0);
    }
    prev.assign(row.begin(), row.begin() + i + 1);
  }
  return prev[static_cast<std::size_t>(levels - 1)];
}

void check_scheme(const FiniteDiffScheme& s) {
  if (s.order != 2 && s.order != 4) throw std::domain_error("fd: order must be 2 or 4");
  if (!(s.step > 0)) throw std::domain_error("fd: step must be positive");
}

} // namespace

CachedPsi::CachedPsi(PsiFn fn) : state_(std::make_shared<State>()) {
  state_->fn = std::move(fn);
}

cplx CachedPsi::operator()(const std::vector<double>& theta) const {
  const std::string key = quantize_key(theta);
  auto it = state_->cache.find(key);
  if (it != state_->cache.end()) {
    ++state_->hits;
    return it->second;
  }
  ++state_->misses;
  const cplx v = state_->fn(theta);
  state_->cache.emplace(std::move(key), v);
  return v;
}

cplx fd_partial_single(const PsiFn& f, const std::vector<double>& theta, int j, double h,
                       int order) {
  return stencil_d1(f, theta, j, h, order);
}

cplx fd_partial2_single(const PsiFn& f, const std::vector<double>& theta, int j, double h,
                        int order) {
  return stencil_d2(f, theta, j, h, order);
}

cplx fd_partial(const PsiFn& f, const std::vector<double>& theta, int j,
                const FiniteDiffScheme& scheme) {
  check_scheme(scheme);
  return richardson([&](double h) { return stencil_d1(f, theta, j, h, scheme.order); },
                    scheme.step, scheme.order, scheme.richardson_levels);
}

cplx fd_partial2(const PsiFn& f, const std::vector<double>& theta, int j,
                 const FiniteDiffScheme& scheme) {
  check_scheme(scheme);
  return richardson([&](double h) { return stencil_d2(f, theta, j, h, scheme.order); },
                    scheme.step, scheme.order, scheme.richardson_levels);
}

cplx fd_path_d1(const std::function<cplx(double)>& g, const FiniteDiffScheme& scheme) {
  const PsiFn f = [&g](const std::vector<double>& t) { return g(t[0]); };
  return fd_partial(f, {0.0}, 0, scheme);
}

cplx fd_path_d2(const std::function<cplx(double)>& g, const FiniteDiffScheme& scheme) {
  const PsiFn f = [&g](const std::vector<double>& t) { return g(t[0]); };
  return fd_partial2(f, {0.0}, 0, scheme);
}

} // namespace radsle

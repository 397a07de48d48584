#pragma once

// brute-force cross-checks for the closed-form perturbation analysis and the
// core certificates. These deliberately avoid the library's dual-attainment
// helpers: extremal directions are rebuilt from first principles per norm, so
// agreement is evidence rather than tautology. All constructed candidates are
// shrunk by 1e-12 relative so floating-point roundoff can never push a
// feasible candidate above the closed form.

#include <cmath>
#include <vector>

#include "tradeoff/geometry.hpp"
#include "tradeoff/models.hpp"
#include "tradeoff/numerics.hpp"

namespace tradeoff {
namespace oracles {

inline constexpr double kShrink = 1.0 - 1e-12;

namespace detail {

// own per-norm extremal direction for a linear score <v, delta>
inline Vec extremal_direction(const Vec& v, const NormSpec& spec) {
  const Eigen::Index d = v.size();
  Vec u = Vec::Zero(d);
  if (v.cwiseAbs().maxCoeff() == 0.0) {
    u[0] = 1.0;
    return u;
  }
  if (spec.is_linf()) {
    for (Eigen::Index i = 0; i < d; ++i) u[i] = v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
    return u;
  }
  if (spec.is_l1()) {
    Eigen::Index best = 0;
    double m = -1.0;
    for (Eigen::Index i = 0; i < d; ++i)
      if (std::abs(v[i]) > m) {
        m = std::abs(v[i]);
        best = i;
      }
    u[best] = v[best] > 0.0 ? 1.0 : -1.0;
    return u;
  }
  if (spec.is_l2()) return v / std::sqrt(v.squaredNorm());
  // general p: normalized power map
  const double q = spec.dual_exponent();
  const double m = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < d; ++i) {
    const double w = std::pow(std::abs(v[i]) / m, q - 1.0);
    u[i] = v[i] >= 0.0 ? w : -w;
  }
  return u / norm(u, spec);
}

inline Vec random_unit(const NormSpec& spec, Eigen::Index d, SampleStream& stream) {
  Vec g(d);
  for (Eigen::Index i = 0; i < d; ++i) g[i] = stream.gaussian();
  const double gn = norm(g, spec);
  if (!(gn > 0.0)) return Vec::Unit(d, 0);
  return g / gn;
}

}  // namespace detail

// candidate perturbations inside the eps-ball: the analytic extremal pair,
// random boundary points, an linf grid when the dimension allows it, and for
// each candidate the scaling that drives the score to zero (where even-degree
// worst-case losses can peak)
inline std::vector<Vec> perturbation_candidates(const Vec& theta, const Vec& x, double eps,
                                                const NormSpec& spec, int n_random,
                                                SampleStream& stream,
                                                bool with_zero_crossings) {
  const Eigen::Index d = x.size();
  std::vector<Vec> dirs;  // unit directions
  dirs.push_back(detail::extremal_direction(theta, spec));
  dirs.push_back(-dirs[0]);
  for (Eigen::Index i = 0; i < d; ++i) {  // signed basis vectors are unit in every p-norm
    dirs.push_back(Vec::Unit(d, i));
    dirs.push_back(-Vec::Unit(d, i));
  }
  if (spec.is_linf() && d <= 5) {
    // full grid over the cube, 11 points per axis
    const long long npts = [&] {
      long long v = 1;
      for (Eigen::Index i = 0; i < d; ++i) v *= 11;
      return v;
    }();
    for (long long c = 0; c < npts; ++c) {
      Vec u(d);
      long long rem = c;
      for (Eigen::Index i = 0; i < d; ++i) {
        u[i] = -1.0 + 0.2 * static_cast<double>(rem % 11);
        rem /= 11;
      }
      dirs.push_back(std::move(u));
    }
  }
  for (int r = 0; r < n_random; ++r) dirs.push_back(detail::random_unit(spec, d, stream));

  std::vector<Vec> out;
  out.reserve(dirs.size() * 2 + 1);
  out.push_back(Vec::Zero(d));
  const double radius = eps * kShrink;
  const double s = theta.dot(x);
  for (const Vec& u : dirs) {
    Vec delta = radius * u;
    if (with_zero_crossings) {
      const double along = theta.dot(delta);
      if (along != 0.0) {
        const double c = -s / along;
        if (c > 0.0 && c < 1.0) out.push_back(c * delta);
      }
    }
    out.push_back(std::move(delta));
  }
  return out;
}

inline double brute_force_deviation(const RidgeModel& m, const Vec& x, double eps,
                                    const NormSpec& spec, int n_random, SampleStream& stream) {
  const double f0 = predict_ridge(m, x);
  double best = 0.0;
  for (const Vec& delta : perturbation_candidates(m.theta, x, eps, spec, n_random, stream, false))
    best = std::max(best, std::abs(predict_ridge(m, x + delta) - f0));
  return best;
}

inline double brute_force_ls_loss(const RidgeModel& m, const Vec& x, double y, double eps,
                                  const NormSpec& spec, int n_random, SampleStream& stream) {
  double best = 0.0;
  for (const Vec& delta : perturbation_candidates(m.theta, x, eps, spec, n_random, stream, true)) {
    const double diff = predict_ridge(m, x + delta) - y;
    best = std::max(best, 0.5 * diff * diff);
  }
  return best;
}

// random and margin-directed probes of the eps-ball; true when some probe
// changes or ties the argmax. May miss flips but can never invent one, so a
// certified core point must survive every probe.
inline bool brute_force_flip_found(const LinearClassifier& c, const Vec& x, double eps,
                                   const NormSpec& spec, int n_probes, SampleStream& stream) {
  const auto base = argmax_region(c, x);
  if (!base) return true;  // already tied at delta = 0
  const int k = c.k();
  auto flipped = [&](const Vec& delta) {
    const auto cls = argmax_region(c, x + delta);
    return !cls || *cls != *base;
  };
  for (int i = 0; i < k; ++i) {
    if (i == *base) continue;
    const Vec wdiff = (c.W.row(*base) - c.W.row(i)).transpose();
    if (flipped(eps * kShrink * -detail::extremal_direction(wdiff, spec))) return true;
  }
  for (int r = 0; r < n_probes; ++r) {
    const Vec u = detail::random_unit(spec, x.size(), stream);
    const double radius = eps * stream.uniform01();
    if (flipped(radius * u)) return true;
    if (flipped(eps * kShrink * u)) return true;
  }
  return false;
}

}  // namespace oracles
}  // namespace tradeoff

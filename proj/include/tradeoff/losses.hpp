#pragma once

// least-squares, KL, and 0/1 losses with their certificate pairs (A, B) and
// the two pairwise inequalities they must satisfy.

#include <cmath>
#include <optional>

#include "tradeoff/numerics.hpp"

namespace tradeoff {

enum class Loss { LS, KL, ZeroOne };

struct LossKind {
  Loss tag = Loss::LS;
  int k = 1;  // output dimension: 1 for LS, >= 2 otherwise

  static LossKind ls() { return LossKind{Loss::LS, 1}; }
  static LossKind kl(int k) {
    require(k >= 2, "LossKind: KL needs k >= 2");
    return LossKind{Loss::KL, k};
  }
  static LossKind zero_one(int k) {
    require(k >= 2, "LossKind: ZeroOne needs k >= 2");
    return LossKind{Loss::ZeroOne, k};
  }
};

// index of the strictly largest entry, or nullopt on ties
inline std::optional<int> unique_argmax(const Vec& v) {
  require(v.size() > 0, "unique_argmax: empty vector");
  Eigen::Index best = 0;
  const double m = v.maxCoeff(&best);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (i != best && v[i] == m) return std::nullopt;
  return static_cast<int>(best);
}

namespace detail {

inline void check_dim(const LossKind& kind, const Vec& v, const char* who) {
  require(static_cast<int>(v.size()) == kind.k, who);
}

inline void check_simplex(const Vec& v, bool strict_interior, const char* who) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    require(strict_interior ? v[i] > 0.0 : v[i] >= 0.0, who);
    sum += v[i];
  }
  require(std::abs(sum - 1.0) <= 1e-9, who);
}

inline double zero_one(const Vec& u, const Vec& v) {
  if (u == v) return 0.0;
  const auto iu = unique_argmax(u);
  const auto iv = unique_argmax(v);
  return (iu && iv && *iu == *iv) ? 0.0 : 1.0;
}

}  // namespace detail

inline double eval_loss(const LossKind& kind, const Vec& u, const Vec& v) {
  detail::check_dim(kind, u, "eval_loss: u has wrong dimension");
  detail::check_dim(kind, v, "eval_loss: v has wrong dimension");
  switch (kind.tag) {
    case Loss::LS: {
      const double d = u[0] - v[0];
      return 0.5 * d * d;
    }
    case Loss::KL: {
      detail::check_simplex(u, true, "eval_loss: KL prediction must be strictly interior");
      detail::check_simplex(v, false, "eval_loss: KL target must lie in the simplex");
      double s = 0.0;
      for (Eigen::Index j = 0; j < v.size(); ++j)
        if (v[j] > 0.0) s += v[j] * std::log(v[j] / u[j]);
      return std::max(s, 0.0);
    }
    case Loss::ZeroOne:
      return detail::zero_one(u, v);
  }
  throw std::invalid_argument("eval_loss: unknown kind");
}

inline double eval_loss(const LossKind& kind, double u, double v) {
  require(kind.tag == Loss::LS, "eval_loss: scalar overload is LS only");
  const double d = u - v;
  return 0.5 * d * d;
}

// certificate pair: A stands next to the predictions, B under the bound.
// LS: A = (u-v)^2/2, B = (u-v)^2/6. KL: A = |u-v|_1^2/2, B = |u-v|_1^2/6
// (Pinsker gives the A side). ZeroOne: A = B = the loss itself.
inline double eval_A(const LossKind& kind, const Vec& u, const Vec& v) {
  detail::check_dim(kind, u, "eval_A: u has wrong dimension");
  detail::check_dim(kind, v, "eval_A: v has wrong dimension");
  switch (kind.tag) {
    case Loss::LS: {
      const double d = u[0] - v[0];
      return 0.5 * d * d;
    }
    case Loss::KL: {
      detail::check_simplex(u, false, "eval_A: KL argument outside the simplex");
      detail::check_simplex(v, false, "eval_A: KL argument outside the simplex");
      const double t = (u - v).cwiseAbs().sum();
      return 0.5 * t * t;
    }
    case Loss::ZeroOne:
      return detail::zero_one(u, v);
  }
  throw std::invalid_argument("eval_A: unknown kind");
}

inline double eval_B(const LossKind& kind, const Vec& u, const Vec& v) {
  detail::check_dim(kind, u, "eval_B: u has wrong dimension");
  detail::check_dim(kind, v, "eval_B: v has wrong dimension");
  switch (kind.tag) {
    case Loss::LS: {
      const double d = u[0] - v[0];
      return d * d / 6.0;
    }
    case Loss::KL: {
      detail::check_simplex(u, false, "eval_B: KL argument outside the simplex");
      detail::check_simplex(v, false, "eval_B: KL argument outside the simplex");
      const double t = (u - v).cwiseAbs().sum();
      return t * t / 6.0;
    }
    case Loss::ZeroOne:
      return detail::zero_one(u, v);
  }
  throw std::invalid_argument("eval_B: unknown kind");
}

inline double eval_A(const LossKind& kind, double u, double v) {
  require(kind.tag == Loss::LS, "eval_A: scalar overload is LS only");
  const double d = u - v;
  return 0.5 * d * d;
}

inline double eval_B(const LossKind& kind, double u, double v) {
  require(kind.tag == Loss::LS, "eval_B: scalar overload is LS only");
  const double d = u - v;
  return d * d / 6.0;
}

struct PairCheck {
  bool cond1 = false;
  bool cond2 = false;
  double slack1 = 0.0;  // l(u,v) + l(u2,v2) + A(u,u2) - B(v,v2)
  double slack2 = 0.0;  // l(u,v) + l(u2,v2) + A(v,v2) - B(u,u2)
};

inline PairCheck check_pair_conditions(const LossKind& kind, const Vec& u, const Vec& v,
                                       const Vec& u2, const Vec& v2) {
  const double losses = eval_loss(kind, u, v) + eval_loss(kind, u2, v2);
  PairCheck out;
  out.slack1 = losses + eval_A(kind, u, u2) - eval_B(kind, v, v2);
  out.slack2 = losses + eval_A(kind, v, v2) - eval_B(kind, u, u2);
  out.cond1 = out.slack1 >= -1e-12;
  out.cond2 = out.slack2 >= -1e-12;
  return out;
}

inline PairCheck check_pair_conditions(const LossKind& kind, double u, double v, double u2,
                                       double v2) {
  Vec uu(1), vv(1), uu2(1), vv2(1);
  uu << u;
  vv << v;
  uu2 << u2;
  vv2 << v2;
  return check_pair_conditions(kind, uu, vv, uu2, vv2);
}

}  // namespace tradeoff

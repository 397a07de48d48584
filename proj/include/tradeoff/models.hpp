#pragma once

// polynomial ridge predictors f(x) = <theta,x>^p and linear softmax
// classifiers, with exact analysis of linear scores under norm-bounded input
// perturbations: score intervals, output ranges, worst-case deviation and
// worst-case least-squares loss.

#include <cmath>
#include <optional>

#include "tradeoff/numerics.hpp"

namespace tradeoff {

struct RidgeModel {
  Vec theta;
  int degree = 1;

  RidgeModel(Vec t, int p) : theta(std::move(t)), degree(p) {
    require(degree >= 1, "RidgeModel: degree must be >= 1");
    check_finite(theta, "RidgeModel: non-finite theta");
  }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

inline double predict_ridge(const RidgeModel& m, const Vec& x) {
  require(x.size() == m.theta.size(), "predict_ridge: dimension mismatch");
  return pow_int(m.theta.dot(x), m.degree);
}

// exact range of <theta, x + delta> over the eps-ball: the dual norm identity
// sup <theta,delta> = eps * ||theta||_* makes the interval tight
inline Interval score_interval(const RidgeModel& m, const Vec& x, double eps,
                               const NormSpec& spec) {
  require(eps >= 0.0, "score_interval: eps must be >= 0");
  require(x.size() == m.theta.size(), "score_interval: dimension mismatch");
  const double s = m.theta.dot(x);
  const double r = eps * dual_norm(m.theta, spec);
  return Interval{s - r, s + r};
}

// exact range of <theta, x + delta>^p over the eps-ball
inline Interval output_range(const RidgeModel& m, const Vec& x, double eps,
                             const NormSpec& spec) {
  const Interval sc = score_interval(m, x, eps, spec);
  const double wa = pow_int(sc.lo, m.degree);
  const double wb = pow_int(sc.hi, m.degree);
  if (m.degree % 2 == 1) return Interval{wa, wb};
  // even degree: z^p dips to 0 when the score interval straddles the origin
  if (sc.lo <= 0.0 && 0.0 <= sc.hi) return Interval{0.0, std::max(wa, wb)};
  return Interval{std::min(wa, wb), std::max(wa, wb)};
}

// sup |f(x+delta) - f(x)| = (|s| + r)^p - |s|^p
inline double worst_case_deviation(const RidgeModel& m, const Vec& x, double eps,
                                   const NormSpec& spec) {
  require(eps >= 0.0, "worst_case_deviation: eps must be >= 0");
  require(x.size() == m.theta.size(), "worst_case_deviation: dimension mismatch");
  const double s = m.theta.dot(x);
  const double r = eps * dual_norm(m.theta, spec);
  return pow_int(std::abs(s) + r, m.degree) - pow_int(std::abs(s), m.degree);
}

enum class ScoreEndpoint { Lower, Interior, Upper };

struct WorstCaseLs {
  double value = 0.0;
  double argmax_score = 0.0;  // score z in [s-r, s+r] realizing the sup
  ScoreEndpoint endpoint = ScoreEndpoint::Lower;
};

// sup over the eps-ball of the least-squares loss against target y. The loss
// is convex in the output w, so the sup sits at an output-range endpoint; for
// even degree the extra endpoint w = 0 appears at the interior score z = 0.
// Ties go to the earlier candidate in (lower, interior, upper) order.
inline WorstCaseLs worst_case_ls_loss(const RidgeModel& m, const Vec& x, double y, double eps,
                                      const NormSpec& spec) {
  require(eps >= 0.0, "worst_case_ls_loss: eps must be >= 0");
  require(x.size() == m.theta.size(), "worst_case_ls_loss: dimension mismatch");
  const double s = m.theta.dot(x);
  const double r = eps * dual_norm(m.theta, spec);
  const double a = s - r;
  const double b = s + r;

  WorstCaseLs out;
  const double da = pow_int(a, m.degree) - y;
  out.value = 0.5 * da * da;
  out.argmax_score = a;
  out.endpoint = ScoreEndpoint::Lower;

  if (m.degree % 2 == 0 && a < 0.0 && 0.0 < b) {
    const double d0 = 0.0 - y;
    const double v0 = 0.5 * d0 * d0;
    if (v0 > out.value) {
      out.value = v0;
      out.argmax_score = 0.0;
      out.endpoint = ScoreEndpoint::Interior;
    }
  }

  const double db = pow_int(b, m.degree) - y;
  const double vb = 0.5 * db * db;
  if (vb > out.value) {
    out.value = vb;
    out.argmax_score = b;
    out.endpoint = ScoreEndpoint::Upper;
  }
  return out;
}

// ---------------------------------------------------------------------------
// linear classifiers

inline constexpr double kSoftmaxFloor = 1e-12;

enum class Head { RawScores, Softmax };

struct LinearClassifier {
  Mat W;  // k x d
  Vec b;  // k
  Head head = Head::Softmax;

  LinearClassifier(Mat w, Vec bias, Head h = Head::Softmax)
      : W(std::move(w)), b(std::move(bias)), head(h) {
    require(W.rows() == b.size(), "LinearClassifier: W/b shape mismatch");
    require(W.rows() >= 2, "LinearClassifier: need k >= 2 classes");
    require(W.allFinite() && b.allFinite(), "LinearClassifier: non-finite parameter");
  }

  int k() const { return static_cast<int>(W.rows()); }
  int d() const { return static_cast<int>(W.cols()); }

  Vec scores(const Vec& x) const {
    require(x.size() == W.cols(), "LinearClassifier: dimension mismatch");
    return W * x + b;
  }
};

// softmax pulled toward the uniform point so every entry stays >= floor;
// keeps KL losses finite without touching the loss itself
inline Vec floored_softmax(const Vec& scores) {
  const int k = static_cast<int>(scores.size());
  const double m = scores.maxCoeff();
  Vec e = (scores.array() - m).exp();
  Vec sm = e / e.sum();
  return (1.0 - k * kSoftmaxFloor) * sm + Vec::Constant(k, kSoftmaxFloor);
}

inline Vec predict_softmax(const LinearClassifier& c, const Vec& x) {
  return floored_softmax(c.scores(x));
}

// class with the strictly largest score, or nullopt on ties
inline std::optional<int> argmax_region(const LinearClassifier& c, const Vec& x) {
  const Vec s = c.scores(x);
  Eigen::Index best = 0;
  const double m = s.maxCoeff(&best);
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (i != best && s[i] == m) return std::nullopt;
  return static_cast<int>(best);
}

}  // namespace tradeoff

#pragma once

// Monte Carlo estimators: standard and adversarial risk, the mean local
// smoothness factor, the label spread term, and the assembled lower-bound
// report with its two pointwise proof inequalities.
//
// estimator kernels are shared between the standalone estimators and the
// report channels, so seed-matched values agree bitwise.

#include <array>
#include <cmath>

#include "tradeoff/distributions.hpp"
#include "tradeoff/geometry.hpp"
#include "tradeoff/losses.hpp"
#include "tradeoff/models.hpp"
#include "tradeoff/numerics.hpp"

namespace tradeoff {

namespace detail {

inline double ridge_ls_loss(const RidgeModel& m, const Vec& x, double y) {
  const double diff = predict_ridge(m, x) - y;
  return 0.5 * diff * diff;
}

inline double kl_loss_at(const LinearClassifier& c, const Vec& x, const Vec& y) {
  return eval_loss(LossKind::kl(c.k()), predict_softmax(c, x), y);
}

// worst-case KL loss over the eps-ball. k = 2: the loss is decreasing in the
// label-class margin, so pushing that margin down by its full dual-norm budget
// is exact. k > 2: best of a candidate set (no perturbation, each pairwise
// margin push, random ball boundary points), a certified lower bound.
struct InnerMax {
  double value = 0.0;
  bool exact = true;
};

inline InnerMax kl_adv_loss(const LinearClassifier& c, const Vec& x, const Vec& y, double eps,
                            const NormSpec& nspec, SampleStream& pstream) {
  const auto label = unique_argmax(y);
  require(label.has_value(), "kl_adv_loss: label must be one-hot");
  const int k = c.k();
  const int cls = *label;
  if (k == 2) {
    const Vec wdiff = (c.W.row(cls) - c.W.row(1 - cls)).transpose();
    const Vec delta = -eps * dual_attainment(wdiff, nspec);
    return InnerMax{kl_loss_at(c, x + delta, y), true};
  }
  double best = kl_loss_at(c, x, y);
  for (int j = 0; j < k; ++j) {
    if (j == cls) continue;
    const Vec wdiff = (c.W.row(cls) - c.W.row(j)).transpose();
    const Vec delta = -eps * dual_attainment(wdiff, nspec);
    best = std::max(best, kl_loss_at(c, x + delta, y));
  }
  for (int r = 0; r < 32; ++r) {
    Vec g(c.d());
    for (int i = 0; i < c.d(); ++i) g[i] = pstream.gaussian();
    const double gn = norm(g, nspec);
    if (!(gn > 0.0)) continue;
    best = std::max(best, kl_loss_at(c, x + (eps / gn) * g, y));
  }
  return InnerMax{best, false};
}

inline double logistic(double m) { return 1.0 / (1.0 + std::exp(-m)); }

// worst-case squared l1 deviation of the floored softmax over the eps-ball.
// k = 2 reduces to one logistic margin, which makes the sup exact.
inline InnerMax kl_dev_sq(const LinearClassifier& c, const Vec& x, double eps,
                          const NormSpec& nspec, SampleStream& pstream) {
  const int k = c.k();
  if (k == 2) {
    const Vec wdiff = (c.W.row(0) - c.W.row(1)).transpose();
    const double r = eps * dual_norm(wdiff, nspec);
    const Vec s = c.scores(x);
    const double m = s[0] - s[1];
    const double base = logistic(m);
    const double down = base - logistic(m - r);
    const double up = logistic(m + r) - base;
    const double dev = 2.0 * (1.0 - 2.0 * kSoftmaxFloor) * std::max(down, up);
    return InnerMax{dev * dev, true};
  }
  const Vec f0 = predict_softmax(c, x);
  double best = 0.0;
  auto consider = [&](const Vec& delta) {
    const double d = (predict_softmax(c, x + delta) - f0).cwiseAbs().sum();
    best = std::max(best, d * d);
  };
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      const Vec wdiff = (c.W.row(i) - c.W.row(j)).transpose();
      const Vec dir = dual_attainment(wdiff, nspec);
      consider(eps * dir);
      consider(-eps * dir);
    }
  for (int r = 0; r < 32; ++r) {
    Vec g(c.d());
    for (int i = 0; i < c.d(); ++i) g[i] = pstream.gaussian();
    const double gn = norm(g, nspec);
    if (!(gn > 0.0)) continue;
    consider((eps / gn) * g);
  }
  return InnerMax{best, false};
}

inline double label_b_term(const LossKind& kind, const DataSpec& spec, const Vec& y,
                           const Vec& y2) {
  if (spec.task == Task::Regression) {
    const double d = y[0] - y2[0];
    return d * d / 6.0;
  }
  return eval_B(kind, y, y2);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// standard risk

inline Estimate standard_risk(const RidgeModel& m, const LossKind& kind, const DataSpec& spec,
                              long long n, std::uint64_t seed) {
  require(kind.tag == Loss::LS, "standard_risk: ridge predictors pair with the LS loss");
  require(spec.task == Task::Regression, "standard_risk: regression spec required");
  require(spec.d == m.theta.size(), "standard_risk: dimension mismatch");
  auto per_sample = [&](long long i) {
    const auto idx = static_cast<std::uint64_t>(i);
    SampleStream xs = make_stream(seed, idx, StreamRole::Covariate);
    SampleStream ys = make_stream(seed, idx, StreamRole::Label);
    const Vec x = sample_x(spec, xs);
    const double y = sample_label_regression(spec, x, ys);
    return std::array<double, 1>{detail::ridge_ls_loss(m, x, y)};
  };
  return mc_estimate<1>(n, seed, per_sample)[0];
}

inline Estimate standard_risk(const LinearClassifier& c, const LossKind& kind,
                              const DataSpec& spec, long long n, std::uint64_t seed) {
  require(kind.tag != Loss::LS, "standard_risk: classifiers pair with KL or 0/1 losses");
  require(spec.task == Task::Classification, "standard_risk: classification spec required");
  require(spec.d == c.d() && spec.label_dim() == kind.k && c.k() == kind.k,
          "standard_risk: dimension mismatch");
  const bool kl = kind.tag == Loss::KL;
  auto per_sample = [&](long long i) {
    const auto idx = static_cast<std::uint64_t>(i);
    SampleStream xs = make_stream(seed, idx, StreamRole::Covariate);
    SampleStream ys = make_stream(seed, idx, StreamRole::Label);
    const Vec x = sample_x(spec, xs);
    const Vec y = sample_label_onehot(spec, x, ys);
    const double v = kl ? detail::kl_loss_at(c, x, y) : eval_loss(kind, c.scores(x), y);
    return std::array<double, 1>{v};
  };
  return mc_estimate<1>(n, seed, per_sample)[0];
}

// excess term of R(f_theta) = 1/2 E(<X,theta>^p - <X,theta*>^p)^2 + sigma^2/2
inline Estimate standard_risk_excess(const RidgeModel& m, const DataSpec& spec, long long n,
                                     std::uint64_t seed) {
  require(spec.task == Task::Regression, "standard_risk_excess: regression spec required");
  const RidgeModel truth(spec.theta_star, spec.degree);
  auto per_sample = [&](long long i) {
    const auto idx = static_cast<std::uint64_t>(i);
    SampleStream xs = make_stream(seed, idx, StreamRole::Covariate);
    const Vec x = sample_x(spec, xs);
    const double diff = predict_ridge(m, x) - predict_ridge(truth, x);
    return std::array<double, 1>{0.5 * diff * diff};
  };
  return mc_estimate<1>(n, seed, per_sample)[0];
}

// ---------------------------------------------------------------------------
// adversarial risk

inline Estimate adversarial_risk(const RidgeModel& m, const LossKind& kind, const DataSpec& spec,
                                 double eps, const NormSpec& nspec, long long n,
                                 std::uint64_t seed) {
  require(kind.tag == Loss::LS, "adversarial_risk: ridge predictors pair with the LS loss");
  require(spec.task == Task::Regression, "adversarial_risk: regression spec required");
  require(eps >= 0.0, "adversarial_risk: eps must be >= 0");
  auto per_sample = [&](long long i) {
    const auto idx = static_cast<std::uint64_t>(i);
    SampleStream xs = make_stream(seed, idx, StreamRole::Covariate);
    SampleStream ys = make_stream(seed, idx, StreamRole::Label);
    const Vec x = sample_x(spec, xs);
    const double y = sample_label_regression(spec, x, ys);
    return std::array<double, 1>{worst_case_ls_loss(m, x, y, eps, nspec).value};
  };
  return mc_estimate<1>(n, seed, per_sample)[0];
}

inline Estimate adversarial_risk(const LinearClassifier& c, const LossKind& kind,
                                 const DataSpec& spec, double eps, const NormSpec& nspec,
                                 long long n, std::uint64_t seed) {
  require(kind.tag != Loss::LS, "adversarial_risk: classifiers pair with KL or 0/1 losses");
  require(spec.task == Task::Classification, "adversarial_risk: classification spec required");
  require(eps >= 0.0, "adversarial_risk: eps must be >= 0");
  const bool kl = kind.tag == Loss::KL;
  bool exact = true;
  if (kl && c.k() > 2) exact = false;
  auto per_sample = [&](long long i) {
    const auto idx = static_cast<std::uint64_t>(i);
    SampleStream xs = make_stream(seed, idx, StreamRole::Covariate);
    SampleStream ys = make_stream(seed, idx, StreamRole::Label);
    SampleStream ps = make_stream(seed, idx, StreamRole::Perturbation);
    const Vec x = sample_x(spec, xs);
    const Vec y = sample_label_onehot(spec, x, ys);
    const double v = kl ? detail::kl_adv_loss(c, x, y, eps, nspec, ps).value
                        : adv01_loss_against_label(c, x, y, eps, nspec);
    return std::array<double, 1>{v};
  };
  Estimate e = mc_estimate<1>(n, seed, per_sample)[0];
  e.lower_bound_only = !exact;
  return e;
}

// ---------------------------------------------------------------------------
// mean local smoothness factor L_eps = E sup |f(X+delta) - f(X)|_1^2

inline Estimate local_smoothness(const RidgeModel& m, const DataSpec& spec, double eps,
                                 const NormSpec& nspec, long long n, std::uint64_t seed) {
  require(eps >= 0.0, "local_smoothness: eps must be >= 0");
  auto per_sample = [&](long long i) {
    const auto idx = static_cast<std::uint64_t>(i);
    SampleStream xs = make_stream(seed, idx, StreamRole::Covariate);
    const Vec x = sample_x(spec, xs);
    const double dev = worst_case_deviation(m, x, eps, nspec);
    return std::array<double, 1>{dev * dev};
  };
  return mc_estimate<1>(n, seed, per_sample)[0];
}

inline Estimate local_smoothness(const LinearClassifier& c, const DataSpec& spec, double eps,
                                 const NormSpec& nspec, long long n, std::uint64_t seed) {
  require(eps >= 0.0, "local_smoothness: eps must be >= 0");
  const bool exact = c.k() == 2;
  auto per_sample = [&](long long i) {
    const auto idx = static_cast<std::uint64_t>(i);
    SampleStream xs = make_stream(seed, idx, StreamRole::Covariate);
    SampleStream ds = make_stream(seed, idx, StreamRole::Direction);
    const Vec x = sample_x(spec, xs);
    return std::array<double, 1>{detail::kl_dev_sq(c, x, eps, nspec, ds).value};
  };
  Estimate e = mc_estimate<1>(n, seed, per_sample)[0];
  e.lower_bound_only = !exact;
  return e;
}

// ---------------------------------------------------------------------------
// label spread E B(Y, Y') over conditionally iid label pairs

inline Estimate label_spread(const LossKind& kind, const DataSpec& spec, long long n,
                             std::uint64_t seed) {
  if (kind.tag == Loss::LS)
    require(spec.task == Task::Regression, "label_spread: LS needs a regression spec");
  else
    require(spec.task == Task::Classification, "label_spread: KL/0-1 need classification");
  auto per_sample = [&](long long i) {
    const auto idx = static_cast<std::uint64_t>(i);
    SampleStream xs = make_stream(seed, idx, StreamRole::Covariate);
    SampleStream ys = make_stream(seed, idx, StreamRole::Label);
    SampleStream ys2 = make_stream(seed, idx, StreamRole::PairedLabel);
    const Vec x = sample_x(spec, xs);
    const Vec y = sample_label(spec, x, ys);
    const Vec y2 = sample_label(spec, x, ys2);
    return std::array<double, 1>{detail::label_b_term(kind, spec, y, y2)};
  };
  return mc_estimate<1>(n, seed, per_sample)[0];
}

// ---------------------------------------------------------------------------
// assembled bound report: R + R_eps vs max{E sup B(f(X), f(X+delta)), E B(Y,Y')}

inline BoundReport theorem1_report(const RidgeModel& m, const LossKind& kind,
                                   const DataSpec& spec, double eps, const NormSpec& nspec,
                                   long long n, std::uint64_t seed) {
  require(kind.tag == Loss::LS, "theorem1_report: ridge predictors pair with the LS loss");
  require(spec.task == Task::Regression, "theorem1_report: regression spec required");
  require(eps >= 0.0, "theorem1_report: eps must be >= 0");
  // channels: std, adv, lhs, raw deviation^2, label B
  auto per_sample = [&](long long i) {
    const auto idx = static_cast<std::uint64_t>(i);
    SampleStream xs = make_stream(seed, idx, StreamRole::Covariate);
    SampleStream ys = make_stream(seed, idx, StreamRole::Label);
    SampleStream ys2 = make_stream(seed, idx, StreamRole::PairedLabel);
    const Vec x = sample_x(spec, xs);
    const double y = sample_label_regression(spec, x, ys);
    const double y2 = sample_label_regression(spec, x, ys2);
    const double std_loss = detail::ridge_ls_loss(m, x, y);
    const double adv_loss = worst_case_ls_loss(m, x, y, eps, nspec).value;
    const double dev = worst_case_deviation(m, x, eps, nspec);
    const double dy = y - y2;
    return std::array<double, 5>{std_loss, adv_loss, std_loss + adv_loss, dev * dev,
                                 dy * dy / 6.0};
  };
  const auto est = mc_estimate<5>(n, seed, per_sample);
  BoundReport r;
  r.lhs = est[2];
  r.smoothness_term = est[3];
  r.smoothness_term.value = est[3].value / 6.0;  // B_LS applies the 1/6
  r.smoothness_term.std_error = est[3].std_error / 6.0;
  r.label_term = est[4];
  r.bound = std::max(r.smoothness_term.value, r.label_term.value);
  r.exact_inner_sup = true;
  r.verdict = bound_verdict(r);
  return r;
}

inline BoundReport theorem1_report(const LinearClassifier& c, const LossKind& kind,
                                   const DataSpec& spec, double eps, const NormSpec& nspec,
                                   long long n, std::uint64_t seed) {
  require(spec.task == Task::Classification, "theorem1_report: classification spec required");
  require(eps >= 0.0, "theorem1_report: eps must be >= 0");
  if (kind.tag == Loss::ZeroOne) return cor3_report(c, spec, eps, nspec, n, seed);
  require(kind.tag == Loss::KL, "theorem1_report: classifiers pair with KL or 0/1 losses");
  const bool exact = c.k() == 2;
  auto per_sample = [&](long long i) {
    const auto idx = static_cast<std::uint64_t>(i);
    SampleStream xs = make_stream(seed, idx, StreamRole::Covariate);
    SampleStream ys = make_stream(seed, idx, StreamRole::Label);
    SampleStream ys2 = make_stream(seed, idx, StreamRole::PairedLabel);
    SampleStream ps = make_stream(seed, idx, StreamRole::Perturbation);
    SampleStream ds = make_stream(seed, idx, StreamRole::Direction);
    const Vec x = sample_x(spec, xs);
    const Vec y = sample_label_onehot(spec, x, ys);
    const Vec y2 = sample_label_onehot(spec, x, ys2);
    const double std_loss = detail::kl_loss_at(c, x, y);
    const double adv_loss = detail::kl_adv_loss(c, x, y, eps, nspec, ps).value;
    const double dev_sq = detail::kl_dev_sq(c, x, eps, nspec, ds).value;
    const double dy1 = (y - y2).cwiseAbs().sum();
    return std::array<double, 5>{std_loss, adv_loss, std_loss + adv_loss, dev_sq,
                                 dy1 * dy1 / 6.0};
  };
  const auto est = mc_estimate<5>(n, seed, per_sample);
  BoundReport r;
  r.lhs = est[2];
  r.lhs.lower_bound_only = !exact;
  r.smoothness_term = est[3];
  r.smoothness_term.value = est[3].value / 6.0;
  r.smoothness_term.std_error = est[3].std_error / 6.0;
  r.smoothness_term.lower_bound_only = !exact;
  r.label_term = est[4];
  r.bound = std::max(r.smoothness_term.value, r.label_term.value);
  r.exact_inner_sup = exact;
  r.verdict = bound_verdict(r);
  return r;
}

// ---------------------------------------------------------------------------
// pointwise proof inequalities, checked before any supremum is taken:
//   l(f(x),y) + l(f(x+d),y)  >= B(f(x), f(x+d))
//   l(f(x),y) + l(f(x+d),y') >= B(y,y') - A(f(x), f(x+d))

struct PointwiseCheck {
  bool ineq1 = false;
  bool ineq2 = false;
};

inline PointwiseCheck pointwise_check(const LossKind& kind, const Vec& u, const Vec& u2,
                                      const Vec& y, const Vec& y2) {
  PointwiseCheck out;
  const double l1 = eval_loss(kind, u, y);
  out.ineq1 = l1 + eval_loss(kind, u2, y) >= eval_B(kind, u, u2) - 1e-12;
  out.ineq2 =
      l1 + eval_loss(kind, u2, y2) >= eval_B(kind, y, y2) - eval_A(kind, u, u2) - 1e-12;
  return out;
}

inline PointwiseCheck pointwise_check(const LossKind& kind, double u, double u2, double y,
                                      double y2) {
  Vec uu(1), uu2(1), yy(1), yy2(1);
  uu << u;
  uu2 << u2;
  yy << y;
  yy2 << y2;
  return pointwise_check(kind, uu, uu2, yy, yy2);
}

}  // namespace tradeoff

#pragma once

// desk-scale ERM and adversarial training for ridge least squares. The
// adversarial objective uses the exact per-sample inner maximum; its gradient
// follows the maximizing score endpoint (Danskin rule, ties to the lower
// endpoint). Plain gradient descent with an eta0/sqrt(t) schedule and
// persistent step halving whenever the objective would increase.

#include <cmath>
#include <vector>

#include "tradeoff/distributions.hpp"
#include "tradeoff/models.hpp"
#include "tradeoff/numerics.hpp"
#include "tradeoff/ridge_analysis.hpp"
#include "tradeoff/risk.hpp"

namespace tradeoff {

enum class InitKind { Zero, Gaussian };

struct TrainConfig {
  double eta0 = 0.1;
  long long iters = 500;
  long long n = 512;
  InitKind init = InitKind::Zero;
  double init_scale = 1.0;
  std::uint64_t seed = 7;
};

struct Dataset {
  Mat X;  // one sample per row
  Vec y;

  long long size() const { return X.rows(); }
  int dim() const { return static_cast<int>(X.cols()); }
};

inline Dataset make_training_set(const DataSpec& spec, long long n, std::uint64_t seed) {
  require(spec.task == Task::Regression, "make_training_set: regression spec required");
  require(n >= 1, "make_training_set: need n >= 1");
  Dataset data;
  data.X.resize(n, spec.d);
  data.y.resize(n);
  for (long long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    SampleStream xs = make_stream(seed, idx, StreamRole::Covariate);
    SampleStream ys = make_stream(seed, idx, StreamRole::Label);
    const Vec x = sample_x(spec, xs);
    data.X.row(i) = x.transpose();
    data.y[i] = sample_label_regression(spec, x, ys);
  }
  return data;
}

struct FitResult {
  Vec theta;
  std::vector<double> trace;  // objective at init, then after each accepted step
  bool diverged = false;
};

// gradient of the per-sample worst-case LS loss at theta (Danskin rule):
// differentiate through the maximizing score endpoint; zero at the interior
// candidate, whose worst output is the constant 0
inline Vec danskin_gradient(const RidgeModel& m, const Vec& x, double y, double eps,
                            const NormSpec& nspec) {
  const WorstCaseLs wc = worst_case_ls_loss(m, x, y, eps, nspec);
  if (wc.endpoint == ScoreEndpoint::Interior) return Vec::Zero(x.size());
  const double z = wc.argmax_score;
  const double coef = (pow_int(z, m.degree) - y) * static_cast<double>(m.degree) *
                      pow_int(z, m.degree - 1);
  const Vec sub = dual_norm_subgradient(m.theta, nspec);
  if (wc.endpoint == ScoreEndpoint::Lower) return coef * (x - eps * sub);
  return coef * (x + eps * sub);
}

namespace detail {

inline Vec initial_theta(int d, const TrainConfig& cfg) {
  if (cfg.init == InitKind::Zero) return Vec::Zero(d);
  SampleStream is = make_stream(cfg.seed, 0, StreamRole::Init);
  Vec t(d);
  for (int i = 0; i < d; ++i) t[i] = cfg.init_scale * is.gaussian();
  return t;
}

inline constexpr double kDivergenceCap = 1e12;
inline constexpr int kMaxHalvings = 60;

// shared descent driver; Eval(theta, grad_out or nullptr) -> objective
template <class Eval>
FitResult descend(int d, const TrainConfig& cfg, Eval&& eval) {
  require(cfg.eta0 > 0.0, "TrainConfig: eta0 must be > 0");
  require(cfg.iters >= 1, "TrainConfig: iters must be >= 1");
  FitResult fit;
  fit.theta = initial_theta(d, cfg);
  Vec grad(d);
  double obj = eval(fit.theta, &grad);
  fit.trace.push_back(obj);
  if (!(obj <= kDivergenceCap)) {
    fit.diverged = true;
    return fit;
  }
  double damp = 1.0;
  for (long long t = 1; t <= cfg.iters; ++t) {
    double step = cfg.eta0 / std::sqrt(static_cast<double>(t)) * damp;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h) {
      const Vec candidate = fit.theta - step * grad;
      const double cand_obj = eval(candidate, nullptr);
      if (!(cand_obj <= kDivergenceCap)) {
        fit.diverged = true;
        return fit;
      }
      if (cand_obj <= obj) {
        fit.theta = candidate;
        obj = cand_obj;
        fit.trace.push_back(obj);
        accepted = true;
        break;
      }
      step *= 0.5;
      damp *= 0.5;
    }
    if (!accepted) break;  // no descent direction at this scale: stop early
    if (t < cfg.iters) obj = eval(fit.theta, &grad);
  }
  return fit;
}

}  // namespace detail

// minimize (1/n) sum_i 1/2 (<theta,x_i>^p - y_i)^2
inline FitResult erm_fit(const Dataset& data, int degree, const TrainConfig& cfg) {
  require(degree >= 1, "erm_fit: degree must be >= 1");
  require(data.size() >= 1, "erm_fit: empty dataset");
  const double n = static_cast<double>(data.size());
  const double dp = static_cast<double>(degree);
  auto eval = [&](const Vec& theta, Vec* grad) {
    if (grad) grad->setZero();
    double obj = 0.0;
    Vec x(data.dim());
    for (long long i = 0; i < data.size(); ++i) {
      x = data.X.row(i).transpose();
      const double s = theta.dot(x);
      const double w = pow_int(s, degree);
      const double diff = w - data.y[i];
      obj += 0.5 * diff * diff;
      if (grad) {
        const double coef = diff * dp * pow_int(s, degree - 1);
        grad->noalias() += coef * x;
      }
    }
    if (grad) *grad /= n;
    return obj / n;
  };
  return detail::descend(data.dim(), cfg, eval);
}

// minimize (1/n) sum_i sup_{|delta| <= eps} 1/2 (<theta, x_i + delta>^p - y_i)^2;
// at eps = 0 the evaluations reduce to erm_fit term by term, bitwise
inline FitResult adversarial_fit(const Dataset& data, int degree, double eps,
                                 const NormSpec& nspec, const TrainConfig& cfg) {
  require(degree >= 1, "adversarial_fit: degree must be >= 1");
  require(data.size() >= 1, "adversarial_fit: empty dataset");
  require(eps >= 0.0, "adversarial_fit: eps must be >= 0");
  const double n = static_cast<double>(data.size());
  const double dp = static_cast<double>(degree);
  auto eval = [&](const Vec& theta, Vec* grad) {
    const RidgeModel m(theta, degree);
    Vec sub;
    if (grad) {
      grad->setZero();
      sub = dual_norm_subgradient(theta, nspec);
    }
    double obj = 0.0;
    Vec x(data.dim());
    for (long long i = 0; i < data.size(); ++i) {
      x = data.X.row(i).transpose();
      const WorstCaseLs wc = worst_case_ls_loss(m, x, data.y[i], eps, nspec);
      obj += wc.value;
      if (grad && wc.endpoint != ScoreEndpoint::Interior) {
        const double z = wc.argmax_score;
        const double coef = (pow_int(z, degree) - data.y[i]) * dp * pow_int(z, degree - 1);
        if (wc.endpoint == ScoreEndpoint::Lower)
          grad->noalias() += coef * (x - eps * sub);
        else
          grad->noalias() += coef * (x + eps * sub);
      }
    }
    if (grad) *grad /= n;
    return obj / n;
  };
  return detail::descend(data.dim(), cfg, eval);
}

// ---------------------------------------------------------------------------
// frontier sweep: adversarial fits across an eps grid, evaluated at population
// level with the closed-form trade-off bound recomputed at each fitted theta

struct FrontierRow {
  double eps = 0.0;
  Vec theta_hat;
  Estimate R;
  Estimate R_eps;
  Estimate L_eps;
  double bound = 0.0;
  bool failed = false;
  bool verdict = true;  // R + R_eps + 3 se >= bound
};

inline std::vector<FrontierRow> frontier_sweep(const DataSpec& spec,
                                               const std::vector<double>& eps_grid,
                                               const NormSpec& nspec, const TrainConfig& cfg,
                                               long long eval_n, std::uint64_t eval_seed) {
  require(!eps_grid.empty(), "frontier_sweep: empty eps grid");
  require(spec.task == Task::Regression, "frontier_sweep: regression spec required");
  const Dataset data = make_training_set(spec, cfg.n, cfg.seed);
  std::vector<FrontierRow> rows;
  rows.reserve(eps_grid.size());
  for (const double eps : eps_grid) {
    FrontierRow row;
    row.eps = eps;
    const FitResult fit = adversarial_fit(data, spec.degree, eps, nspec, cfg);
    row.theta_hat = fit.theta;
    row.failed = fit.diverged;
    if (!row.failed) {
      const RidgeModel m(fit.theta, spec.degree);
      const LossKind kind = LossKind::ls();
      row.R = standard_risk(m, kind, spec, eval_n, eval_seed);
      row.R_eps = adversarial_risk(m, kind, spec, eps, nspec, eval_n, eval_seed);
      row.L_eps = local_smoothness(m, spec, eps, nspec, eval_n, eval_seed);
      row.bound = tradeoff_bound(
          RidgeBoundInputs::from_model(m, spec.sigma, nspec, eps, spec.sigma2));
      // conservative: se(R + R_eps) <= se(R) + se(R_eps)
      const double lhs = row.R.value + row.R_eps.value;
      const double se = row.R.std_error + row.R_eps.std_error;
      row.verdict = lhs + 3.0 * se >= row.bound;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tradeoff

#pragma once

// closed-form ridge-regression quantities: the lower bound on the mean local
// smoothness factor, the accuracy/robustness trade-off bound, the epsilon
// threshold, and a Monte Carlo audit of every inequality in the derivation
// chain behind the smoothness lower bound.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "tradeoff/distributions.hpp"
#include "tradeoff/models.hpp"
#include "tradeoff/numerics.hpp"

namespace tradeoff {

struct RidgeBoundInputs {
  double theta_sigma = 0.0;  // ||theta||_Sigma
  double theta_dual = 0.0;   // ||theta||_*
  int degree = 1;
  double eps = 0.0;
  double sigma2 = 0.0;

  static RidgeBoundInputs from_model(const RidgeModel& m, const Covariance& cov,
                                     const NormSpec& nspec, double eps, double sigma2) {
    return RidgeBoundInputs{sigma_norm(m.theta, cov), dual_norm(m.theta, nspec), m.degree, eps,
                            sigma2};
  }
};

inline void check_inputs(const RidgeBoundInputs& in) {
  require(in.theta_sigma >= 0.0 && in.theta_dual >= 0.0 && in.eps >= 0.0 && in.sigma2 >= 0.0,
          "RidgeBoundInputs: all fields must be nonnegative");
  require(in.degree >= 1, "RidgeBoundInputs: degree must be >= 1");
}

// L_eps(f_theta) >= 1/2 ((||theta||_Sigma + ||theta||_* eps)^p - ||theta||_Sigma^p)^2
inline double l_eps_lower_bound(const RidgeBoundInputs& in) {
  check_inputs(in);
  const double gap = pow_int(in.theta_sigma + in.theta_dual * in.eps, in.degree) -
                     pow_int(in.theta_sigma, in.degree);
  return 0.5 * gap * gap;
}

// R + R_eps >= max{ (1/12)((||theta||_Sigma + ||theta||_* eps)^p - ||theta||_Sigma^p)^2,
//                   sigma^2 / 3 }
inline double tradeoff_bound(const RidgeBoundInputs& in) {
  return std::max(l_eps_lower_bound(in) / 6.0, in.sigma2 / 3.0);
}

// eps threshold: robustness is unattainable for an accurate predictor unless
// eps clears min{ (C_p^p / p) sqrt(lambda*/SNR_p), C_p sqrt(lambda*/SNR_p^{1/p}) }
struct ThresholdResult {
  double branch_moment = 0.0;  // (C_p^p / p) sqrt(lambda* / SNR_p)
  double branch_root = 0.0;    // C_p sqrt(lambda* / SNR_p^{1/p})
  double value = 0.0;          // min of the two
};

inline ThresholdResult epsilon_threshold(int p, double c_p, double lambda_star_value,
                                         double snr_p_value) {
  require(p >= 1, "epsilon_threshold: p must be >= 1");
  require(c_p > 0.0 && lambda_star_value > 0.0, "epsilon_threshold: inputs must be positive");
  require(snr_p_value > 0.0, "epsilon_threshold: SNR must be positive");
  ThresholdResult out;
  out.branch_moment = pow_int(c_p, p) / static_cast<double>(p) *
                      std::sqrt(lambda_star_value / snr_p_value);
  out.branch_root =
      c_p * std::sqrt(lambda_star_value / std::pow(snr_p_value, 1.0 / static_cast<double>(p)));
  out.value = std::min(out.branch_moment, out.branch_root);
  return out;
}

// ---------------------------------------------------------------------------
// audit of the smoothness lower-bound derivation. With s = <theta, X> and
// t = ||theta||_* eps, the chain is
//   T0 = E((|s|+t)^p - |s|^p)^2
//   T1 = E(sum_{k=1..p} C(p,k)|s|^{p-k} t^k)^2          = T0 (binomial)
//   T2 = t^{2p} + E(sum_{k=1..p-1} C(p,k)|s|^{p-k}t^k)^2  <= T1 ((a+b)^2 >= a^2+b^2)
//   T3 = t^{2p} + double sum of moments                   = T2 (expand the square)
//   T4 = T3 with E|s|^m replaced by ||theta||_Sigma^m     <= T3 (power mean)
//   T5 = t^{2p} + (sum_{k=1..p-1} C(p,k)||theta||_Sigma^{p-k}t^k)^2 = T4 (refactor)
//   T6 = 1/2 ((||theta||_Sigma+t)^p - ||theta||_Sigma^p)^2 <= T5 (a^2+b^2 >= (a+b)^2/2)
// each quantity is evaluated along its own displayed expression so the audit
// can catch transcription errors in any single link.

enum class ChainRelation { Equal, Geq };

struct ChainLink {
  std::string lhs_label;
  std::string rhs_label;
  ChainRelation relation = ChainRelation::Equal;
  double lhs = 0.0;
  double rhs = 0.0;
  double combined_se = 0.0;
  bool ok = false;
};

struct ChainAudit {
  std::vector<Estimate> terms;  // T0..T6 in chain order
  std::vector<std::string> labels;
  std::vector<ChainLink> links;
  bool all_ok = true;
};

inline ChainAudit binomial_chain_audit(const RidgeModel& m, double eps, const NormSpec& nspec,
                                       const DataSpec& spec, long long n, std::uint64_t seed) {
  require(spec.task == Task::Regression, "binomial_chain_audit: regression spec required");
  require(spec.d == m.theta.size(), "binomial_chain_audit: dimension mismatch");
  require(eps >= 0.0, "binomial_chain_audit: eps must be >= 0");
  const int p = m.degree;
  const double dn = dual_norm(m.theta, nspec);
  const double t = dn * eps;
  const double ts = sigma_norm(m.theta, spec.sigma);
  const double t2p = pow_int(t, 2 * p);

  // channels: c0 closed-form square, c1 binomial-sum square,
  // c2 truncated-sum square, c3 the same square expanded term by term
  auto per_sample = [&](long long i) {
    SampleStream xs = make_stream(seed, static_cast<std::uint64_t>(i), StreamRole::Covariate);
    const Vec x = sample_x(spec, xs);
    const double s = std::abs(m.theta.dot(x));
    const double c0g = pow_int(s + t, p) - pow_int(s, p);
    double full = 0.0;
    for (int k = 1; k <= p; ++k)
      full += binomial_coeff(p, k) * pow_int(s, p - k) * pow_int(t, k);
    double trunc = 0.0;
    for (int k = 1; k <= p - 1; ++k)
      trunc += binomial_coeff(p, k) * pow_int(s, p - k) * pow_int(t, k);
    double expanded = 0.0;
    for (int j = 1; j <= p - 1; ++j)
      for (int k = 1; k <= p - 1; ++k)
        expanded += binomial_coeff(p, j) * binomial_coeff(p, k) * pow_int(s, 2 * p - j - k) *
                    pow_int(t, j + k);
    return std::array<double, 4>{c0g * c0g, full * full, trunc * trunc, expanded};
  };
  const auto est = mc_estimate<4>(n, seed, per_sample);

  ChainAudit audit;
  audit.labels = {"E((|s|+t)^p - |s|^p)^2",
                  "E(binomial sum)^2",
                  "t^{2p} + E(truncated sum)^2",
                  "t^{2p} + moment double sum",
                  "t^{2p} + power-mean double sum",
                  "t^{2p} + (sigma-norm sum)^2",
                  "1/2 ((|theta|_S + t)^p - |theta|_S^p)^2"};
  audit.terms.resize(7);
  audit.terms[0] = est[0];
  audit.terms[1] = est[1];
  audit.terms[2] = Estimate{t2p + est[2].value, est[2].std_error, n, seed, false};
  audit.terms[3] = Estimate{t2p + est[3].value, est[3].std_error, n, seed, false};

  double pm = 0.0;  // double sum with E|s|^m lower-bounded by ||theta||_Sigma^m
  for (int j = 1; j <= p - 1; ++j)
    for (int k = 1; k <= p - 1; ++k)
      pm += binomial_coeff(p, j) * binomial_coeff(p, k) * pow_int(ts, 2 * p - j - k) *
            pow_int(t, j + k);
  audit.terms[4] = Estimate{t2p + pm, 0.0, 0, seed, false};

  double sig_sum = 0.0;
  for (int k = 1; k <= p - 1; ++k)
    sig_sum += binomial_coeff(p, k) * pow_int(ts, p - k) * pow_int(t, k);
  audit.terms[5] = Estimate{t2p + sig_sum * sig_sum, 0.0, 0, seed, false};

  const RidgeBoundInputs inputs{ts, dn, p, eps, spec.sigma2};
  audit.terms[6] = Estimate{l_eps_lower_bound(inputs), 0.0, 0, seed, false};

  const ChainRelation rel[6] = {ChainRelation::Equal, ChainRelation::Geq, ChainRelation::Equal,
                                ChainRelation::Geq,   ChainRelation::Equal, ChainRelation::Geq};
  for (int l = 0; l < 6; ++l) {
    ChainLink link;
    link.lhs_label = audit.labels[static_cast<std::size_t>(l)];
    link.rhs_label = audit.labels[static_cast<std::size_t>(l + 1)];
    link.relation = rel[l];
    link.lhs = audit.terms[static_cast<std::size_t>(l)].value;
    link.rhs = audit.terms[static_cast<std::size_t>(l + 1)].value;
    const double se_l = audit.terms[static_cast<std::size_t>(l)].std_error;
    const double se_r = audit.terms[static_cast<std::size_t>(l + 1)].std_error;
    link.combined_se = std::sqrt(se_l * se_l + se_r * se_r);
    const double tol = 3.0 * link.combined_se + 1e-9 * std::max(1.0, std::abs(link.lhs));
    link.ok = link.relation == ChainRelation::Equal ? std::abs(link.lhs - link.rhs) <= tol
                                                    : link.lhs >= link.rhs - tol;
    audit.all_ok = audit.all_ok && link.ok;
    audit.links.push_back(std::move(link));
  }
  return audit;
}

}  // namespace tradeoff

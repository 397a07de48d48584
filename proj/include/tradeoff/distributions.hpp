#pragma once

// data-generating processes for the regression and classification
// experiments, and the distribution constants C_p and SNR_p.

#include <cmath>
#include <optional>
#include <utility>

#include "tradeoff/models.hpp"
#include "tradeoff/numerics.hpp"

namespace tradeoff {

enum class Task { Regression, Classification };
enum class XFamily { Gaussian, Rademacher, UniformCube };
enum class NoiseKind { Gaussian, Uniform };

// covariate law: zero-mean unit-variance coordinates from the chosen family,
// colored by Sigma^{1/2}. regression labels: Y = <theta*, X>^p + Z with
// E Z^2 = sigma2. classification labels: one-hot draws from the reference
// classifier's floored softmax.
struct DataSpec {
  Task task = Task::Regression;
  int d = 1;
  Covariance sigma;
  XFamily x_family = XFamily::Gaussian;

  // regression block
  Vec theta_star;
  int degree = 1;
  double sigma2 = 0.0;
  NoiseKind noise = NoiseKind::Gaussian;

  // classification block
  std::optional<LinearClassifier> pi;

  static DataSpec regression(Covariance cov, XFamily family, Vec theta_star, int degree,
                             double sigma2, NoiseKind noise = NoiseKind::Gaussian) {
    require(degree >= 1, "DataSpec: degree must be >= 1");
    require(sigma2 >= 0.0, "DataSpec: sigma2 must be >= 0");
    require(theta_star.size() == cov.dim(), "DataSpec: theta_star dimension mismatch");
    check_finite(theta_star, "DataSpec: non-finite theta_star");
    DataSpec s{Task::Regression, cov.dim(), std::move(cov), family,
               std::move(theta_star), degree, sigma2, noise, std::nullopt};
    return s;
  }

  static DataSpec classification(Covariance cov, XFamily family, LinearClassifier reference) {
    require(reference.d() == cov.dim(), "DataSpec: classifier dimension mismatch");
    DataSpec s{Task::Classification, cov.dim(), std::move(cov), family,
               Vec(), 1, 0.0, NoiseKind::Gaussian, std::move(reference)};
    return s;
  }

  int label_dim() const { return task == Task::Regression ? 1 : pi->k(); }
};

inline Vec sample_x(const DataSpec& spec, SampleStream& stream) {
  Vec raw(spec.d);
  switch (spec.x_family) {
    case XFamily::Gaussian:
      for (int i = 0; i < spec.d; ++i) raw[i] = stream.gaussian();
      break;
    case XFamily::Rademacher:
      for (int i = 0; i < spec.d; ++i) raw[i] = stream.rademacher();
      break;
    case XFamily::UniformCube: {
      const double half = 1.7320508075688772;  // sqrt(3): unit variance on [-h, h]
      for (int i = 0; i < spec.d; ++i) raw[i] = stream.uniform(-half, half);
      break;
    }
  }
  return spec.sigma.sqrt() * raw;
}

inline double sample_noise(const DataSpec& spec, SampleStream& stream) {
  if (spec.sigma2 == 0.0) return 0.0;
  const double sd = std::sqrt(spec.sigma2);
  if (spec.noise == NoiseKind::Gaussian) return sd * stream.gaussian();
  const double half = 1.7320508075688772 * sd;  // matches variance sigma2
  return stream.uniform(-half, half);
}

inline double sample_label_regression(const DataSpec& spec, const Vec& x,
                                      SampleStream& stream) {
  require(spec.task == Task::Regression, "sample_label_regression: wrong task");
  return pow_int(spec.theta_star.dot(x), spec.degree) + sample_noise(spec, stream);
}

inline Vec sample_label_onehot(const DataSpec& spec, const Vec& x, SampleStream& stream) {
  require(spec.task == Task::Classification, "sample_label_onehot: wrong task");
  const Vec probs = predict_softmax(*spec.pi, x);
  const double u = stream.uniform01();
  double acc = 0.0;
  Vec y = Vec::Zero(probs.size());
  for (Eigen::Index j = 0; j < probs.size(); ++j) {
    acc += probs[j];
    if (u <= acc || j + 1 == probs.size()) {
      y[j] = 1.0;
      return y;
    }
  }
  y[probs.size() - 1] = 1.0;
  return y;
}

// one draw of the label given x; regression labels come back as 1-vectors
inline Vec sample_label(const DataSpec& spec, const Vec& x, SampleStream& stream) {
  if (spec.task == Task::Regression) {
    Vec y(1);
    y[0] = sample_label_regression(spec, x, stream);
    return y;
  }
  return sample_label_onehot(spec, x, stream);
}

// ---------------------------------------------------------------------------
// distribution constants

// C_p with (E|<theta,X>|^{2p})^{1/(2p)} <= C_p ||theta||_Sigma.
// gaussian: ((2p-1)!!)^{1/(2p)} exactly. other families: empirical sup of the
// ratio over 64 random directions, with the delta-method standard error of
// the winning direction.
inline Estimate c_p_constant(const DataSpec& spec, int p, long long n,
                             std::uint64_t seed = 7) {
  require(p >= 1, "c_p_constant: p must be >= 1");
  if (spec.x_family == XFamily::Gaussian) {
    const double v = std::pow(odd_double_factorial(p), 1.0 / (2.0 * p));
    return Estimate{v, 0.0, 0, seed, false};
  }
  constexpr int kDirs = 64;
  std::vector<Vec> dirs;
  dirs.reserve(kDirs);
  for (int r = 0; r < kDirs; ++r) {
    SampleStream ds = make_stream(seed, static_cast<std::uint64_t>(r), StreamRole::Direction);
    Vec t(spec.d);
    for (int i = 0; i < spec.d; ++i) t[i] = ds.gaussian();
    if (sigma_norm(t, spec.sigma) == 0.0) t = Vec::Ones(spec.d);
    dirs.push_back(std::move(t));
  }
  auto per_sample = [&](long long i) {
    SampleStream xs = make_stream(seed, static_cast<std::uint64_t>(i), StreamRole::Covariate);
    const Vec x = sample_x(spec, xs);
    std::array<double, kDirs> out{};
    for (int r = 0; r < kDirs; ++r) out[r] = pow_int(std::abs(dirs[r].dot(x)), 2 * p);
    return out;
  };
  const auto moments = mc_estimate<kDirs>(n, seed, per_sample);
  double best = 0.0, best_se = 0.0;
  for (int r = 0; r < kDirs; ++r) {
    const double sn = sigma_norm(dirs[r], spec.sigma);
    const double mean = std::max(moments[r].value, 0.0);
    const double v = std::pow(mean, 1.0 / (2.0 * p)) / sn;
    if (v > best) {
      best = v;
      // d/dm of m^{1/(2p)} propagates the moment SE through the root
      const double dm = mean > 0.0
                            ? std::pow(mean, 1.0 / (2.0 * p) - 1.0) / (2.0 * p) / sn
                            : 0.0;
      best_se = moments[r].std_error * dm;
    }
  }
  return Estimate{best, best_se, n, seed, false};
}

// SNR_p = E<X,theta*>^{2p} / sigma2; infinite when sigma2 = 0
inline Estimate snr_p(const DataSpec& spec, long long n, std::uint64_t seed = 7) {
  require(spec.task == Task::Regression, "snr_p: regression spec required");
  if (spec.sigma2 == 0.0) return Estimate{kInfinity, 0.0, 0, seed, false};
  const int p = spec.degree;
  if (spec.x_family == XFamily::Gaussian) {
    const double sn = sigma_norm(spec.theta_star, spec.sigma);
    const double v = odd_double_factorial(p) * pow_int(sn * sn, p) / spec.sigma2;
    return Estimate{v, 0.0, 0, seed, false};
  }
  auto per_sample = [&](long long i) {
    SampleStream xs = make_stream(seed, static_cast<std::uint64_t>(i), StreamRole::Covariate);
    const Vec x = sample_x(spec, xs);
    return std::array<double, 1>{pow_int(spec.theta_star.dot(x), 2 * p) / spec.sigma2};
  };
  const auto est = mc_estimate<1>(n, seed, per_sample);
  return est[0];
}

}  // namespace tradeoff

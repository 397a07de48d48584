#pragma once

// p-norms, dual norms, covariance utilities, lambda*, and the deterministic
// per-sample random stream + reduction plumbing used by every estimator.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace tradeoff {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// integer power by repeated multiplication, fixed order so results are
// reproducible across call sites
inline double pow_int(double base, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= base;
  return r;
}

inline double odd_double_factorial(int p) {  // (2p-1)!!
  double r = 1.0;
  for (int m = 2 * p - 1; m > 1; m -= 2) r *= static_cast<double>(m);
  return r;
}

inline double binomial_coeff(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// ---------------------------------------------------------------------------
// norms

struct NormSpec {
  double exponent = 2.0;  // in [1, inf]

  static NormSpec l1() { return NormSpec{1.0}; }
  static NormSpec l2() { return NormSpec{2.0}; }
  static NormSpec linf() { return NormSpec{kInfinity}; }
  static NormSpec lp(double p) {
    require(p >= 1.0, "NormSpec: exponent must be >= 1");
    return NormSpec{p};
  }

  bool is_l1() const { return exponent == 1.0; }
  bool is_l2() const { return exponent == 2.0; }
  bool is_linf() const { return std::isinf(exponent); }

  double dual_exponent() const {
    if (is_l1()) return kInfinity;
    if (is_linf()) return 1.0;
    return exponent / (exponent - 1.0);
  }
};

inline void check_finite(const Vec& v, const char* msg) {
  require(v.allFinite(), msg);
}

inline double norm(const Vec& v, const NormSpec& spec) {
  check_finite(v, "norm: non-finite entry");
  require(spec.exponent >= 1.0, "norm: exponent must be >= 1");
  if (v.size() == 0) return 0.0;
  if (spec.is_linf()) return v.cwiseAbs().maxCoeff();
  if (spec.is_l1()) return v.cwiseAbs().sum();
  if (spec.is_l2()) return std::sqrt(v.squaredNorm());
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    s += std::pow(std::abs(v[i]) / m, spec.exponent);
  return m * std::pow(s, 1.0 / spec.exponent);
}

inline double dual_norm(const Vec& v, const NormSpec& spec) {
  return norm(v, NormSpec{spec.dual_exponent()});
}

// unit vector u (in the perturbation norm) with <v,u> = dual_norm(v);
// this is the direction of the worst-case perturbation for a linear score
inline Vec dual_attainment(const Vec& v, const NormSpec& spec) {
  check_finite(v, "dual_attainment: non-finite entry");
  const Eigen::Index d = v.size();
  require(d > 0, "dual_attainment: empty vector");
  Vec u = Vec::Zero(d);
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) {
    u[0] = 1.0;  // any unit vector attains <0,u> = 0
    return u;
  }
  if (spec.is_l1()) {  // dual is linf: push the single largest coordinate
    Eigen::Index j = 0;
    v.cwiseAbs().maxCoeff(&j);
    u[j] = v[j] > 0.0 ? 1.0 : -1.0;
    return u;
  }
  if (spec.is_linf()) {  // dual is l1: push every coordinate by its sign
    for (Eigen::Index i = 0; i < d; ++i)
      u[i] = v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
    return u;
  }
  const double q = spec.dual_exponent();
  for (Eigen::Index i = 0; i < d; ++i) {
    const double a = std::abs(v[i]) / m;  // prescale: u is 0-homogeneous in v
    const double w = std::pow(a, q - 1.0);
    u[i] = v[i] >= 0.0 ? w : -w;
  }
  return u / norm(u, spec);
}

// subgradient of theta -> dual_norm(theta); zero vector at theta = 0
inline Vec dual_norm_subgradient(const Vec& v, const NormSpec& spec) {
  if (v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0) return Vec::Zero(v.size());
  return dual_attainment(v, spec);
}

// ---------------------------------------------------------------------------
// covariance

class Covariance {
 public:
  explicit Covariance(Mat m) {
    require(m.rows() == m.cols() && m.rows() > 0, "Covariance: matrix must be square");
    require(m.allFinite(), "Covariance: non-finite entry");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    require(asym <= 1e-12, "Covariance: matrix not symmetric within 1e-12");
    matrix_ = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(matrix_);
    require(es.info() == Eigen::Success, "Covariance: eigendecomposition failed");
    eigenvalues_ = es.eigenvalues();
    require(eigenvalues_.minCoeff() >= -1e-10, "Covariance: negative eigenvalue beyond tolerance");
    Vec clipped = eigenvalues_.cwiseMax(0.0);
    sqrt_ = es.eigenvectors() * clipped.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  }

  static Covariance identity(int d) { return Covariance(Mat::Identity(d, d)); }
  static Covariance diagonal(const Vec& diag) {
    return Covariance(Mat(diag.asDiagonal()));
  }

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const Mat& matrix() const { return matrix_; }
  const Mat& sqrt() const { return sqrt_; }
  double lambda_max() const { return eigenvalues_.maxCoeff(); }

 private:
  Mat matrix_;
  Mat sqrt_;
  Vec eigenvalues_;
};

inline double sigma_norm(const Vec& theta, const Covariance& cov) {
  require(theta.size() == cov.dim(), "sigma_norm: dimension mismatch");
  check_finite(theta, "sigma_norm: non-finite entry");
  const double q = theta.dot(cov.matrix() * theta);
  require(q >= -1e-10 * (1.0 + theta.squaredNorm()),
          "sigma_norm: quadratic form negative beyond tolerance");
  return std::sqrt(std::max(q, 0.0));
}

// ---------------------------------------------------------------------------
// random streams: counter-based splitmix64, one stream per (seed, id)

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}
}  // namespace detail

struct SampleStream {
  std::uint64_t state;

  SampleStream(std::uint64_t seed, std::uint64_t stream_id) {
    state = detail::mix64(seed + 0x9E3779B97F4A7C15ull) ^
            detail::mix64(stream_id * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull);
  }

  std::uint64_t next_u64() {
    state += 0x9E3779B97F4A7C15ull;
    return detail::mix64(state);
  }

  double uniform01() {  // strictly inside (0,1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double gaussian() {  // Box-Muller, cosine branch only: stateless across calls
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double rademacher() { return (next_u64() & 1ull) ? 1.0 : -1.0; }
};

// fixed role layout keeps covariate/label/perturbation draws independent
enum class StreamRole : std::uint64_t {
  Covariate = 0,
  Label = 1,
  PairedLabel = 2,
  Perturbation = 3,
  Setup = 4,
  Init = 5,
  Direction = 6,
};

inline SampleStream make_stream(std::uint64_t seed, std::uint64_t sample_index, StreamRole role) {
  return SampleStream(seed, sample_index * 8ull + static_cast<std::uint64_t>(role));
}

// ---------------------------------------------------------------------------
// estimates and deterministic parallel reduction

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  long long n = 0;
  std::uint64_t seed = 0;
  bool lower_bound_only = false;  // true when the inner sup is only certified from below
};

// process-wide worker cap; results never depend on it
inline std::atomic<int>& thread_count_ref() {
  static std::atomic<int> count{1};
  return count;
}
inline void set_thread_count(int n) { thread_count_ref().store(n < 1 ? 1 : n); }
inline int thread_count() { return thread_count_ref().load(); }

namespace detail {
inline constexpr long long kChunk = 4096;  // fixed chunk size anchors summation order

template <std::size_t M, class F>
void accumulate_chunks(long long n, F& per_sample,
                       std::vector<std::array<double, M>>& sums,
                       std::vector<std::array<double, M>>& sumsqs) {
  const long long nchunks = (n + kChunk - 1) / kChunk;
  sums.assign(static_cast<std::size_t>(nchunks), {});
  sumsqs.assign(static_cast<std::size_t>(nchunks), {});
  const int workers = std::min<long long>(std::max(thread_count(), 1), std::max(nchunks, 1ll));
  auto run_chunk = [&](long long c) {
    const long long lo = c * kChunk;
    const long long hi = std::min(n, lo + kChunk);
    std::array<double, M> s{}, ss{};
    for (long long i = lo; i < hi; ++i) {
      const std::array<double, M> v = per_sample(i);
      for (std::size_t m = 0; m < M; ++m) {
        s[m] += v[m];
        ss[m] += v[m] * v[m];
      }
    }
    sums[static_cast<std::size_t>(c)] = s;
    sumsqs[static_cast<std::size_t>(c)] = ss;
  };
  if (workers <= 1) {
    for (long long c = 0; c < nchunks; ++c) run_chunk(c);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (long long c = w; c < nchunks; c += workers) run_chunk(c);
    });
  for (auto& t : pool) t.join();
}
}  // namespace detail

// Monte Carlo means with standard errors over M channels; per_sample(i) must be
// a pure function of i. Chunked fixed-order reduction makes the result
// bit-identical for every worker count.
template <std::size_t M, class F>
std::array<Estimate, M> mc_estimate(long long n, std::uint64_t seed, F per_sample) {
  require(n >= 1, "mc_estimate: need n >= 1");
  std::vector<std::array<double, M>> sums, sumsqs;
  detail::accumulate_chunks<M>(n, per_sample, sums, sumsqs);
  std::array<double, M> total{}, totalsq{};
  for (std::size_t c = 0; c < sums.size(); ++c)
    for (std::size_t m = 0; m < M; ++m) {
      total[m] += sums[c][m];
      totalsq[m] += sumsqs[c][m];
    }
  std::array<Estimate, M> out{};
  const double nd = static_cast<double>(n);
  for (std::size_t m = 0; m < M; ++m) {
    const double mean = total[m] / nd;
    double var = 0.0;
    if (n > 1) var = std::max(0.0, (totalsq[m] - nd * mean * mean) / (nd - 1.0));
    out[m] = Estimate{mean, std::sqrt(var / nd), n, seed, false};
  }
  return out;
}

// max of smoothness/label terms vs the standard+adversarial sum
struct BoundReport {
  Estimate smoothness_term;
  Estimate label_term;
  double bound = 0.0;  // max of the two term values
  Estimate lhs;        // standard + adversarial risk
  bool verdict = true;        // lhs + 3se >= bound - 3se(max term)
  bool exact_inner_sup = true;
};

inline bool bound_verdict(const BoundReport& r) {
  const double bound_se = r.smoothness_term.value >= r.label_term.value
                              ? r.smoothness_term.std_error
                              : r.label_term.std_error;
  return r.lhs.value + 3.0 * r.lhs.std_error >= r.bound - 3.0 * bound_se;
}

// ---------------------------------------------------------------------------
// lambda* = sup_{theta != 0} ||theta||_Sigma^2 / ||theta||_*^2

inline double norm_ratio(const Vec& theta, const Covariance& cov, const NormSpec& spec) {
  const double dn = dual_norm(theta, spec);
  require(dn > 0.0, "norm_ratio: theta must be nonzero");
  const double sn = sigma_norm(theta, cov);
  return (sn * sn) / (dn * dn);
}

enum class LambdaMethod { Auto, ClosedForm, Search };

// closed form exists for l2 perturbations (self-dual): largest eigenvalue.
// otherwise multi-start projected ascent on the unit dual-norm sphere; the
// search value is a certified lower bound of the supremum.
inline double lambda_star(const Covariance& cov, const NormSpec& spec,
                          LambdaMethod method = LambdaMethod::Auto) {
  if (method != LambdaMethod::Search && spec.is_l2()) return cov.lambda_max();

  const int d = cov.dim();
  const NormSpec dual{spec.dual_exponent()};
  double best = 0.0;
  auto consider = [&](const Vec& theta) {
    const double dn = norm(theta, dual);
    if (!(dn > 0.0)) return;
    best = std::max(best, norm_ratio(theta, cov, spec));
  };
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    consider(e);
    e[i] = -1.0;
    consider(e);
  }
  consider(Vec::Ones(d));

  constexpr int kRestarts = 32;
  constexpr int kSteps = 500;
  for (int r = 0; r < kRestarts; ++r) {
    SampleStream stream(0x6c616d626461ull, static_cast<std::uint64_t>(r));  // fixed internal seed
    Vec theta(d);
    for (int i = 0; i < d; ++i) theta[i] = stream.gaussian();
    double dn = norm(theta, dual);
    if (!(dn > 0.0)) continue;
    theta /= dn;
    for (int t = 1; t <= kSteps; ++t) {
      const double step = 0.1 / std::sqrt(static_cast<double>(t));
      theta += step * 2.0 * (cov.matrix() * theta);
      dn = norm(theta, dual);
      if (!(dn > 1e-300)) break;
      theta /= dn;
      consider(theta);
    }
  }
  return best;
}

}  // namespace tradeoff

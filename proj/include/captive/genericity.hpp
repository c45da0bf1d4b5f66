#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "captive/branch_enum.hpp"
#include "captive/captivity.hpp"
#include "captive/circle_map.hpp"
#include "captive/cocycle.hpp"

namespace captive {

// ---------------------------------------------------------------------------
// Constants of the perturbation argument
// ---------------------------------------------------------------------------

/// Closed interval [a, b] of logarithmic expansion rates.
struct RateInterval {
  double a = 0.0;
  double b = 0.0;
  bool contains(double r) const { return a <= r && r <= b; }
};

struct ProofConstants {
  double rho = 0.0;
  double lambda = 0.0;
  double Lambda = 0.0;
  double log_lambda = 0.0;
  double log_Lambda = 0.0;
  std::vector<RateInterval> intervals;  ///< I_j, each of length < rho / 3
  double epsilon = 0.0;                 ///< shrink margin: (a_j + eps, b_j - eps) still cover
  std::size_t N = 0;
  std::size_t q = 0;

  std::size_t J() const { return intervals.size(); }
  /// Lowest j whose interval contains the rate, if any.
  std::optional<std::size_t> classify(double rate) const;
  /// Re-checks every defining relation: N formula, q inequality, interval
  /// lengths, and that the shrunk open intervals cover [log lambda, log Lambda].
  bool satisfies_definitions() const;
};

/// N(rho) = ceil(6 rho^-1 log ceil(2 Lambda)).
std::size_t count_constant(double rho, double Lambda);

/// (q + 1) N e^{-q rho / 2} < 1 / (4 J).
bool q_condition(std::size_t q, std::size_t N, double rho, std::size_t J);

/// Equal-length overlapping cover of [log lambda, log Lambda] and the
/// smallest q satisfying q_condition (linear scan).
ProofConstants proof_constants(double rho, double lambda, double Lambda);

struct Grids {
  std::vector<double> points;  ///< T(n), in turns
  std::vector<double> angles;  ///< S(n), angle theta in turns of (cos 2 pi theta, sin 2 pi theta)
  bool truncated = false;      ///< replaced by `cap` uniform points
};

/// T(n) and S(n) with ceil(2 Lambda)^n points each, or uniform grids of
/// `cap` points when that is exceeded.
Grids grids(std::size_t n, double Lambda, std::size_t cap);

// ---------------------------------------------------------------------------
// Affine parameter map t -> (S_n(x; alpha; tau_t))_{alpha in A}
// ---------------------------------------------------------------------------

template <typename Scalar>
struct AffineParameterMap {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix linear;  ///< p x m, linear(a, i) = sum_k phi_i'(x_[a]_k) / (E^k)'(x_[a]_k)
  Vector offset;  ///< S_n(x; a; tau)
  double x = 0.0;
  std::vector<Word> words;

  Eigen::Index rows() const { return linear.rows(); }
  Eigen::Index cols() const { return linear.cols(); }

  template <typename Derived>
  Vector operator()(const Eigen::MatrixBase<Derived>& t) const {
    return offset + linear * t;
  }
};

using AffineMap = AffineParameterMap<double>;

/// G_{x,A} for a perturbation family; one backward pass per word.
AffineMap g_map(const CircleMap& map, const PerturbationFamily& family, double x,
                std::span<const Word> words);

/// Relative singular-value threshold below which the linear part is
/// treated as rank deficient.
inline constexpr double kRankTolerance = 1e-10;

/// Jac of an affine map with the given linear part: product of singular
/// values (= sqrt det(L L^T)) when L is surjective, 0 otherwise.
template <typename Derived>
typename Derived::Scalar jacobian(const Eigen::MatrixBase<Derived>& linear) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index p = linear.rows();
  const Eigen::Index m = linear.cols();
  if (p == 0) return Scalar(1);
  if (p > m) return Scalar(0);
  Eigen::JacobiSVD<Matrix> svd{Matrix(linear)};
  const auto& sv = svd.singularValues();
  const Scalar largest = sv(0);
  const Scalar smallest = sv(p - 1);
  if (largest == Scalar(0) || smallest < Scalar(kRankTolerance) * largest) return Scalar(0);
  return sv.prod();
}

template <typename Scalar>
Scalar jacobian(const AffineParameterMap<Scalar>& g) {
  return jacobian(g.linear);
}

/// Jac(M) >= Jac(M|_L) on random coordinate subspaces L.
bool jac_monotonicity_check(const AffineMap& g, std::size_t trials, std::uint64_t seed);

struct LebCheck {
  double empirical = 0.0;  ///< fraction of the unit ball of R^m mapped into X
  double bound = 0.0;      ///< C Jac^-1 Leb(X), normalized by the unit-ball volume
  double sigma = 0.0;      ///< Monte Carlo standard error at the bound
  bool pass = false;
};

/// Volume of the unit ball in R^d.
double unit_ball_volume(std::size_t d);

/// Monte Carlo check of Leb{|z| <= 1 : g(z) in X} <= C Jac^-1 Leb(X), X the
/// ball of the given radius about g(0). Throws std::domain_error if Jac = 0.
LebCheck leb_bound_check(const AffineMap& g, double radius, std::size_t samples,
                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Witness sets and parameter scans
// ---------------------------------------------------------------------------

struct Witness {
  double x = 0.0;
  double slope = 0.0;
  std::size_t interval_index = 0;  ///< j (0-based)
  std::size_t count = 0;           ///< N(tau, R; n) at x
  std::vector<Word> B;             ///< selected q-truncations, sorted
  std::map<Word, std::vector<Word>> sigma;
  double size_threshold = 0.0;     ///< e^{rho n} l^{-q} / (2 J)
};

/// Constructive extraction at depth n: take the argmax (x, slope), keep the
/// branches whose log-rate falls in the most populated I_j, group them by
/// [alpha]_q and keep the 2 (q + 1) N largest groups. Absent when n <= q,
/// when there are too few groups, or when a group misses the size bound.
std::optional<Witness> witness_extract(const CircleMap& map, const RoofFunction& tau,
                                       double R, std::size_t n, const ProofConstants& constants,
                                       const XStrategy& strategy, std::size_t workers = 1);

struct ScanDepth {
  std::size_t n = 0;
  double threshold = 0.0;  ///< e^{rho n}
  std::size_t exceed = 0;
  double fraction = 0.0;
  double std_error = 0.0;
};

struct ScanReport {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t parameters = 0;
  std::size_t grid_points = 0;
  double R = 0.0;
  double rho = 0.0;
  std::vector<ScanDepth> depths;
};

/// Fraction of t uniform in [-1, 1]^m with N(tau_t, R; n) > e^{rho n}
/// (sampled with a fixed grid of base points). Sample i draws from
/// stream_for(seed, i), so the report is independent of `workers`.
ScanReport parameter_scan(const CircleMap& map, const PerturbationFamily& family, double R,
                          double rho, std::span<const std::size_t> depths, std::size_t samples,
                          std::uint64_t seed, std::size_t grid_points = 64,
                          std::size_t workers = 1);

struct JacSurvey {
  std::size_t trials = 0;
  std::size_t evaluations = 0;  ///< Jac values computed (several extensions per trial)
  double min_jac = 0.0;
  double median_jac = 0.0;
  std::size_t at_least_one = 0;  ///< evaluations with Jac >= 1
  double required_scale = 0.0;  ///< s with s^p min_jac = 1
};

/// Numerical check of the good-basis property: for random x and random
/// B subset of A^nu with #B = p (nu + 1), pick B' of size p greedily by
/// volume and evaluate Jac(G_{x,A}) for random extensions A of B' to depth n.
JacSurvey jac_survey(const CircleMap& map, const PerturbationFamily& family, std::size_t p,
                     std::size_t nu, std::size_t n, std::size_t trials, std::uint64_t seed);

}  // namespace captive

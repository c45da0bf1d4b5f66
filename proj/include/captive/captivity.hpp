#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "captive/branch_enum.hpp"
#include "captive/circle_map.hpp"
#include "captive/cocycle.hpp"

namespace captive {

/// Slope interval [S - theta_R / D, S + theta_R / D] of the image cone
/// Df^n(x_alpha) K_R; closed at both ends.
struct ConeInterval {
  double center = 0.0;
  double half_width = 0.0;
  double weight = 0.0;  ///< 1 / D
  Word word;

  double lo() const { return center - half_width; }
  double hi() const { return center + half_width; }
  bool contains(double slope) const { return lo() <= slope && slope <= hi(); }
};

ConeInterval cone_interval(const BranchState& branch, double theta_R);

/// R'_m = ||tau'|| + lambda^-m (R - ||tau'||), the radius of the cone that
/// contains Df^m K_R.
double refined_radius(double sup_deriv, double lambda, double R, std::size_t m);

struct OverlapResult {
  std::size_t depth = 0;
  std::optional<double> witness;  ///< leftmost point of maximal depth
  std::vector<Word> words;        ///< intervals containing the witness, sorted
};

/// Maximum number of closed intervals sharing a point. Endpoint sweep with
/// openings processed before closings at equal coordinates.
OverlapResult max_overlap(std::span<const ConeInterval> intervals);

/// Guard band applied to every interval endpoint when checking counts for
/// floating-point fragility.
inline constexpr double kGuardBand = 1e-9;

/// Inner sup over directions v at a single base point x.
struct PointCount {
  double x = 0.0;
  std::size_t count = 0;
  double slope = 0.0;
  std::size_t widened = 0;   ///< count with endpoints pushed out by kGuardBand
  std::size_t narrowed = 0;  ///< count with endpoints pulled in by kGuardBand
  std::vector<Word> words;   ///< filled only when requested

  bool marginal() const { return widened != narrowed; }
};

PointCount ncal_at(const CircleMap& map, const RoofFunction& tau, double R, std::size_t n,
                   double x, bool with_words = true);

/// Base points: K equally spaced points k/K.
struct GridStrategy {
  std::size_t points = 512;
};
/// The grid T(n) = {x : ceil(2 Lambda)^n x in Z}, replaced by a uniform
/// grid of `cap` points when it would be larger.
struct PaperGridStrategy {
  std::size_t cap = 1u << 16;
};
/// Start from a uniform grid, then repeatedly refine around the current
/// argmax until the maximum is unchanged for two rounds.
struct AdaptiveStrategy {
  std::size_t points = 64;
  std::size_t refine_points = 16;
  std::size_t max_rounds = 12;
};
using XStrategy = std::variant<GridStrategy, PaperGridStrategy, AdaptiveStrategy>;

std::string strategy_name(const XStrategy& strategy);

/// Initial base points of a strategy (for adaptive, the starting grid).
std::vector<double> sample_points(const XStrategy& strategy, std::size_t n, double Lambda);

/// Sup of ncal_at over the sampled base points. Exact in the direction for
/// each sampled x, hence a certified lower bound for the sup over the torus.
struct NcalResult {
  std::size_t value = 0;
  double x = 0.0;
  double slope = 0.0;
  std::vector<Word> words;
  bool marginal = false;  ///< widened and narrowed sups disagree
  std::size_t points_sampled = 0;
};

NcalResult ncal(const CircleMap& map, const RoofFunction& tau, double R, std::size_t n,
                const XStrategy& strategy, std::size_t workers = 1);

struct RootEntry {
  std::size_t n = 0;
  double value = 0.0;
  double root = 0.0;
  bool violation = false;
};

struct FeketeRoots {
  std::vector<RootEntry> entries;
  bool exact = false;  ///< inputs are exact sups; otherwise flags are advisory
  bool any_violation = false;
};

/// n-th roots of a submultiplicative sequence; entry m is flagged when
/// root(m) > root(k) + slack for some earlier k dividing m.
FeketeRoots fekete_roots(std::span<const std::pair<std::size_t, double>> values, bool exact,
                         double slack = 1e-12);

struct WeightedResult {
  double value = 0.0;
  double x = 0.0;
  double slope = 0.0;  ///< for weighted_n: the maximizing slope
  Word reference;      ///< for weighted_m: the maximizing reference branch
};

/// sup_x sup_v sum of 1/D over branches whose cone contains v.
WeightedResult weighted_n(const CircleMap& map, const RoofFunction& tau, double R,
                          std::size_t n, const XStrategy& strategy, std::size_t workers = 1);
WeightedResult weighted_n_at(const CircleMap& map, const RoofFunction& tau, double R,
                             std::size_t n, double x);

enum class TransversalityMode { intersecting, disjoint };

/// sup_x sup_w sum of 1/D over branches whose cone meets (intersecting) or
/// misses (disjoint) the cone of the reference branch w.
WeightedResult weighted_m(const CircleMap& map, const RoofFunction& tau, double R,
                          std::size_t n, const XStrategy& strategy,
                          TransversalityMode mode = TransversalityMode::intersecting,
                          std::size_t workers = 1);
WeightedResult weighted_m_at(const CircleMap& map, const RoofFunction& tau, double R,
                             std::size_t n, double x,
                             TransversalityMode mode = TransversalityMode::intersecting);

/// (min over sampled x of min_alpha D_n)^(-1/n).
double chi_estimate(const CircleMap& map, std::size_t n, std::span<const double> points);
double chi_estimate(const CircleMap& map, std::size_t n, std::size_t grid_points = 64);

/// Certified bracket on the count of words with |eta - S(y; alpha)| <=
/// R~ / (E^n)'(y_alpha), where the infinite sums S are only known up to
/// tail_bound(n).
struct NtildeBracket {
  std::size_t lower = 0;
  std::size_t upper = 0;
};

NtildeBracket ntilde_at(const CircleMap& map, const RoofFunction& tau, double R_tilde,
                        std::size_t n, double x);
NtildeBracket ntilde(const CircleMap& map, const RoofFunction& tau, double R_tilde,
                     std::size_t n, const XStrategy& strategy, std::size_t workers = 1);

struct SpreadResult {
  double spread = 0.0;                ///< (max S_n - min S_n) + 2 tail
  double birkhoff_obstruction = 0.0;  ///< max - min periodic Birkhoff average
  std::size_t max_period = 0;
};

SpreadResult coboundary_spread(const CircleMap& map, const RoofFunction& tau, double x,
                               std::size_t n, std::size_t max_period = 8);

/// Terms of the refined submultiplicativity bound at a base point x:
///   N_R(n+m)(x) <= N_{R'_m}(n)(x) * max_{beta in A^n} N_R(m)(x_beta).
struct SubmultiplicativeTerms {
  std::size_t combined = 0;        ///< N_R(n + m) at x
  std::size_t head = 0;            ///< N_{R'_m}(n) at x
  std::size_t tail_max = 0;        ///< max over x_beta of N_R(m)
  bool holds() const { return combined <= head * tail_max; }
};

SubmultiplicativeTerms submultiplicative_terms(const CircleMap& map, const RoofFunction& tau,
                                               double R, std::size_t n, std::size_t m,
                                               double x);

/// Per-depth record of the captivity diagnostics.
struct CaptivityRecord {
  std::size_t n = 0;
  std::size_t ncal = 0;
  double root = 0.0;
  double witness_x = 0.0;
  double witness_slope = 0.0;
  std::vector<Word> witness_words;
  double m_value = 0.0;
  double n_value = 0.0;
  double chi = 0.0;
  bool marginal = false;
};

struct CaptivityReport {
  std::vector<CaptivityRecord> records;
  double R = 0.0;
  double lambda = 0.0;
  double Lambda = 0.0;
  double sup_deriv = 0.0;
  std::string strategy;
  bool any_marginal() const;
};

CaptivityReport captivity_report(const CircleMap& map, const RoofFunction& tau, double R,
                                 std::span<const std::size_t> depths,
                                 const XStrategy& strategy, std::size_t workers = 1);

}  // namespace captive

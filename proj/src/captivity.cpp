#include "captive/captivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "captive/parallel.hpp"
#include "captive/summation.hpp"

namespace captive {

namespace {

/// Cone data of all l^n branches at one base point, in enumeration order.
struct ConeArrays {
  std::vector<double> center;
  std::vector<double> derivative;  // D = (E^n)'(x_alpha)
};

ConeArrays collect(const CircleMap& map, const RoofFunction& tau, std::size_t n, double x) {
  if (n == 0) throw std::invalid_argument("depth n must be at least 1");
  ConeArrays out;
  const std::size_t total = static_cast<std::size_t>(std::pow(map.degree(), n) + 0.5);
  out.center.reserve(total);
  out.derivative.reserve(total);
  for_each_branch(map, &tau, x, n, [&](const BranchState& s) {
    out.center.push_back(s.S);
    out.derivative.push_back(s.D);
  });
  return out;
}

std::vector<double> uniform_points(std::size_t count) {
  std::vector<double> pts(count);
  for (std::size_t k = 0; k < count; ++k)
    pts[k] = static_cast<double>(k) / static_cast<double>(count);
  return pts;
}

/// Word with the given position in the lexicographic enumeration.
Word word_from_index(std::size_t index, unsigned degree, std::size_t n) {
  Word w{std::vector<Symbol>(n, 0)};
  for (std::size_t k = n; k-- > 0;) {
    w.symbols[k] = static_cast<Symbol>(index % degree);
    index /= degree;
  }
  return w;
}

struct SweepHit {
  std::size_t depth = 0;
  double at = 0.0;
};

/// Max depth of [lo_i - pad, hi_i + pad]; inputs sorted ascending.
SweepHit sweep(const std::vector<double>& lo, const std::vector<double>& hi, double pad) {
  SweepHit best;
  std::size_t depth = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < lo.size()) {
    if (lo[i] - pad <= hi[j] + pad) {
      ++depth;
      if (depth > best.depth) best = {depth, lo[i] - pad};
      ++i;
    } else {
      --depth;
      ++j;
    }
  }
  return best;
}

struct Endpoints {
  std::vector<double> lo;
  std::vector<double> hi;
};

Endpoints endpoints(const ConeArrays& cones, double radius) {
  Endpoints e;
  e.lo.resize(cones.center.size());
  e.hi.resize(cones.center.size());
  for (std::size_t i = 0; i < cones.center.size(); ++i) {
    const double h = radius / cones.derivative[i];
    e.lo[i] = cones.center[i] - h;
    e.hi[i] = cones.center[i] + h;
  }
  return e;
}

double theta_R_of(const CircleMap& map, const RoofFunction& tau, double R) {
  return theta(tau, map.lambda(), R).theta_R;
}

/// Evaluate `eval` over the strategy's base points and return the result
/// with the largest score (first one on ties). Adaptive strategies refine
/// around the current argmax until the best score is unchanged for two
/// consecutive rounds.
template <typename T, typename Eval, typename Score>
T sup_over_points(const XStrategy& strategy, std::size_t n, double Lambda, std::size_t workers,
                  Eval&& eval, Score&& score, std::size_t* sampled = nullptr,
                  std::vector<T>* all = nullptr) {
  auto run = [&](const std::vector<double>& pts) {
    std::vector<T> out(pts.size());
    parallel_for(pts.size(), workers, [&](std::size_t i) { out[i] = eval(pts[i]); });
    return out;
  };
  const std::vector<double> pts = sample_points(strategy, n, Lambda);
  std::vector<T> results = run(pts);
  std::size_t count = pts.size();
  auto best_it = std::max_element(results.begin(), results.end(),
                                  [&](const T& a, const T& b) { return score(a) < score(b); });
  T best = *best_it;
  double best_x = pts[static_cast<std::size_t>(best_it - results.begin())];
  if (all) *all = results;

  if (const auto* adaptive = std::get_if<AdaptiveStrategy>(&strategy)) {
    double spacing = 1.0 / static_cast<double>(adaptive->points);
    const std::size_t half = std::max<std::size_t>(1, adaptive->refine_points / 2);
    int stable = 0;
    for (std::size_t round = 0; round < adaptive->max_rounds && stable < 2; ++round) {
      spacing /= static_cast<double>(half);
      std::vector<double> local;
      for (std::size_t k = 0; k <= 2 * half; ++k) {
        if (k == half) continue;
        local.push_back(canonical(best_x + (static_cast<double>(k) - static_cast<double>(half)) * spacing));
      }
      std::vector<T> local_results = run(local);
      count += local.size();
      if (all) all->insert(all->end(), local_results.begin(), local_results.end());
      bool improved = false;
      for (std::size_t i = 0; i < local.size(); ++i) {
        if (score(local_results[i]) > score(best)) {
          best = local_results[i];
          best_x = local[i];
          improved = true;
        }
      }
      stable = improved ? 0 : stable + 1;
    }
  }
  if (sampled) *sampled = count;
  return best;
}

}  // namespace

ConeInterval cone_interval(const BranchState& branch, double theta_R) {
  return {branch.S, theta_R / branch.D, 1.0 / branch.D, branch.word};
}

double refined_radius(double sup_deriv, double lambda, double R, std::size_t m) {
  return sup_deriv + std::pow(lambda, -static_cast<double>(m)) * (R - sup_deriv);
}

OverlapResult max_overlap(std::span<const ConeInterval> intervals) {
  OverlapResult result;
  if (intervals.empty()) return result;
  std::vector<double> lo(intervals.size());
  std::vector<double> hi(intervals.size());
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    lo[i] = intervals[i].lo();
    hi[i] = intervals[i].hi();
  }
  std::sort(lo.begin(), lo.end());
  std::sort(hi.begin(), hi.end());
  const SweepHit hit = sweep(lo, hi, 0.0);
  result.depth = hit.depth;
  result.witness = hit.at;
  for (const auto& iv : intervals)
    if (iv.contains(hit.at)) result.words.push_back(iv.word);
  std::sort(result.words.begin(), result.words.end());
  return result;
}

PointCount ncal_at(const CircleMap& map, const RoofFunction& tau, double R, std::size_t n,
                   double x, bool with_words) {
  const double theta_R = theta_R_of(map, tau, R);
  const ConeArrays cones = collect(map, tau, n, x);
  Endpoints e = endpoints(cones, theta_R);
  std::vector<double> lo = e.lo;
  std::vector<double> hi = e.hi;
  std::sort(lo.begin(), lo.end());
  std::sort(hi.begin(), hi.end());

  PointCount pc;
  pc.x = canonical(x);
  const SweepHit hit = sweep(lo, hi, 0.0);
  pc.count = hit.depth;
  pc.slope = hit.at;
  pc.widened = sweep(lo, hi, kGuardBand).depth;
  pc.narrowed = sweep(lo, hi, -kGuardBand).depth;
  if (with_words) {
    for (std::size_t i = 0; i < e.lo.size(); ++i)
      if (e.lo[i] <= pc.slope && pc.slope <= e.hi[i])
        pc.words.push_back(word_from_index(i, map.degree(), n));
  }
  return pc;
}

std::string strategy_name(const XStrategy& strategy) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GridStrategy>) return "grid";
        else if constexpr (std::is_same_v<S, PaperGridStrategy>) return "paper_grid";
        else return "adaptive";
      },
      strategy);
}

std::vector<double> sample_points(const XStrategy& strategy, std::size_t n, double Lambda) {
  if (const auto* g = std::get_if<GridStrategy>(&strategy)) return uniform_points(g->points);
  if (const auto* a = std::get_if<AdaptiveStrategy>(&strategy)) return uniform_points(a->points);
  const auto& p = std::get<PaperGridStrategy>(strategy);
  const double base = std::ceil(2.0 * Lambda);
  double size = 1.0;
  for (std::size_t k = 0; k < n && size <= static_cast<double>(p.cap); ++k) size *= base;
  if (size > static_cast<double>(p.cap)) return uniform_points(p.cap);
  return uniform_points(static_cast<std::size_t>(size));
}

NcalResult ncal(const CircleMap& map, const RoofFunction& tau, double R, std::size_t n,
                const XStrategy& strategy, std::size_t workers) {
  theta_R_of(map, tau, R);  // validate R before fanning out
  std::vector<PointCount> all;
  NcalResult result;
  const PointCount best = sup_over_points<PointCount>(
      strategy, n, map.Lambda(), workers,
      [&](double x) { return ncal_at(map, tau, R, n, x, false); },
      [](const PointCount& pc) { return static_cast<double>(pc.count); },
      &result.points_sampled, &all);
  std::size_t max_wide = 0;
  std::size_t max_narrow = 0;
  for (const auto& pc : all) {
    max_wide = std::max(max_wide, pc.widened);
    max_narrow = std::max(max_narrow, pc.narrowed);
  }
  const PointCount witness = ncal_at(map, tau, R, n, best.x, true);
  result.value = witness.count;
  result.x = witness.x;
  result.slope = witness.slope;
  result.words = witness.words;
  result.marginal = max_wide != max_narrow;
  return result;
}

FeketeRoots fekete_roots(std::span<const std::pair<std::size_t, double>> values, bool exact,
                         double slack) {
  FeketeRoots out;
  out.exact = exact;
  for (const auto& [n, v] : values) {
    if (n == 0) throw std::invalid_argument("depth must be positive");
    out.entries.push_back({n, v, std::pow(v, 1.0 / static_cast<double>(n)), false});
  }
  for (auto& later : out.entries) {
    for (const auto& earlier : out.entries) {
      if (earlier.n < later.n && later.n % earlier.n == 0 && later.root > earlier.root + slack)
        later.violation = true;
    }
    out.any_violation = out.any_violation || later.violation;
  }
  return out;
}

WeightedResult weighted_n_at(const CircleMap& map, const RoofFunction& tau, double R,
                             std::size_t n, double x) {
  const double theta_R = theta_R_of(map, tau, R);
  const ConeArrays cones = collect(map, tau, n, x);
  const Endpoints e = endpoints(cones, theta_R);
  const std::size_t count = e.lo.size();
  std::vector<std::size_t> by_lo(count);
  std::iota(by_lo.begin(), by_lo.end(), 0);
  std::vector<std::size_t> by_hi = by_lo;
  std::sort(by_lo.begin(), by_lo.end(), [&](auto a, auto b) { return e.lo[a] < e.lo[b]; });
  std::sort(by_hi.begin(), by_hi.end(), [&](auto a, auto b) { return e.hi[a] < e.hi[b]; });

  WeightedResult best;
  best.x = canonical(x);
  CompensatedSum open;  // weights of the currently open intervals
  std::size_t i = 0;
  std::size_t j = 0;
  bool first = true;
  while (i < count) {
    if (e.lo[by_lo[i]] <= e.hi[by_hi[j]]) {
      open += 1.0 / cones.derivative[by_lo[i]];
      const double value = open.value();
      if (first || value > best.value) {
        best.value = value;
        best.slope = e.lo[by_lo[i]];
        first = false;
      }
      ++i;
    } else {
      open += -1.0 / cones.derivative[by_hi[j]];
      ++j;
    }
  }
  return best;
}

WeightedResult weighted_n(const CircleMap& map, const RoofFunction& tau, double R,
                          std::size_t n, const XStrategy& strategy, std::size_t workers) {
  theta_R_of(map, tau, R);
  return sup_over_points<WeightedResult>(
      strategy, n, map.Lambda(), workers,
      [&](double x) { return weighted_n_at(map, tau, R, n, x); },
      [](const WeightedResult& w) { return w.value; });
}

WeightedResult weighted_m_at(const CircleMap& map, const RoofFunction& tau, double R,
                             std::size_t n, double x, TransversalityMode mode) {
  const double theta_R = theta_R_of(map, tau, R);
  const ConeArrays cones = collect(map, tau, n, x);
  const Endpoints e = endpoints(cones, theta_R);
  const std::size_t count = e.lo.size();

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> by_hi = order;
  std::vector<std::size_t> by_lo = order;
  std::sort(by_hi.begin(), by_hi.end(), [&](auto a, auto b) { return e.hi[a] < e.hi[b]; });
  std::sort(by_lo.begin(), by_lo.end(), [&](auto a, auto b) { return e.lo[a] < e.lo[b]; });
  std::vector<double> hi_sorted(count);
  std::vector<double> lo_sorted(count);
  std::vector<double> prefix_hi(count + 1, 0.0);  // weights of the k smallest hi
  std::vector<double> suffix_lo(count + 1, 0.0);  // weights of lo_sorted[k..]
  for (std::size_t k = 0; k < count; ++k) {
    hi_sorted[k] = e.hi[by_hi[k]];
    lo_sorted[k] = e.lo[by_lo[k]];
    prefix_hi[k + 1] = prefix_hi[k] + 1.0 / cones.derivative[by_hi[k]];
  }
  for (std::size_t k = count; k-- > 0;)
    suffix_lo[k] = suffix_lo[k + 1] + 1.0 / cones.derivative[by_lo[k]];
  const double total = prefix_hi[count];

  WeightedResult best;
  best.x = canonical(x);
  std::size_t best_index = 0;
  bool first = true;
  for (std::size_t w = 0; w < count; ++w) {
    // closed intervals: disjoint iff hi_z < lo_w or lo_z > hi_w
    const auto left = static_cast<std::size_t>(
        std::lower_bound(hi_sorted.begin(), hi_sorted.end(), e.lo[w]) - hi_sorted.begin());
    const auto right = static_cast<std::size_t>(
        std::upper_bound(lo_sorted.begin(), lo_sorted.end(), e.hi[w]) - lo_sorted.begin());
    const double disjoint = prefix_hi[left] + suffix_lo[right];
    const double value = mode == TransversalityMode::disjoint ? disjoint : total - disjoint;
    if (first || value > best.value) {
      best.value = value;
      best.slope = cones.center[w];
      best_index = w;
      first = false;
    }
  }
  best.reference = word_from_index(best_index, map.degree(), n);
  return best;
}

WeightedResult weighted_m(const CircleMap& map, const RoofFunction& tau, double R,
                          std::size_t n, const XStrategy& strategy, TransversalityMode mode,
                          std::size_t workers) {
  theta_R_of(map, tau, R);
  return sup_over_points<WeightedResult>(
      strategy, n, map.Lambda(), workers,
      [&](double x) { return weighted_m_at(map, tau, R, n, x, mode); },
      [](const WeightedResult& w) { return w.value; });
}

double chi_estimate(const CircleMap& map, std::size_t n, std::span<const double> points) {
  if (n == 0) throw std::invalid_argument("depth n must be at least 1");
  double min_d = std::numeric_limits<double>::infinity();
  for (double x : points)
    for_each_branch(map, nullptr, x, n,
                    [&](const BranchState& s) { min_d = std::min(min_d, s.D); });
  return std::pow(min_d, -1.0 / static_cast<double>(n));
}

double chi_estimate(const CircleMap& map, std::size_t n, std::size_t grid_points) {
  const auto pts = uniform_points(grid_points);
  return chi_estimate(map, n, pts);
}

NtildeBracket ntilde_at(const CircleMap& map, const RoofFunction& tau, double R_tilde,
                        std::size_t n, double x) {
  if (!(R_tilde > 0.0)) throw std::invalid_argument("R~ must be positive");
  const double tail = tail_bound(tau, map.lambda(), n);
  const ConeArrays cones = collect(map, tau, n, x);
  std::vector<double> lo_in, hi_in, lo_out, hi_out;
  lo_out.reserve(cones.center.size());
  hi_out.reserve(cones.center.size());
  for (std::size_t i = 0; i < cones.center.size(); ++i) {
    const double h = R_tilde / cones.derivative[i];
    const double c = cones.center[i];
    // every infinite extension keeps S within c +/- tail
    if (h - tail >= 0.0) {
      lo_in.push_back(c - (h - tail));
      hi_in.push_back(c + (h - tail));
    }
    lo_out.push_back(c - (h + tail));
    hi_out.push_back(c + (h + tail));
  }
  for (auto* v : {&lo_in, &hi_in, &lo_out, &hi_out}) std::sort(v->begin(), v->end());
  NtildeBracket b;
  b.lower = sweep(lo_in, hi_in, 0.0).depth;
  b.upper = sweep(lo_out, hi_out, 0.0).depth;
  return b;
}

NtildeBracket ntilde(const CircleMap& map, const RoofFunction& tau, double R_tilde,
                     std::size_t n, const XStrategy& strategy, std::size_t workers) {
  const auto pts = sample_points(strategy, n, map.Lambda());
  std::vector<NtildeBracket> per(pts.size());
  parallel_for(pts.size(), workers,
               [&](std::size_t i) { per[i] = ntilde_at(map, tau, R_tilde, n, pts[i]); });
  NtildeBracket out;
  for (const auto& b : per) {
    out.lower = std::max(out.lower, b.lower);
    out.upper = std::max(out.upper, b.upper);
  }
  return out;
}

SpreadResult coboundary_spread(const CircleMap& map, const RoofFunction& tau, double x,
                               std::size_t n, std::size_t max_period) {
  double smin = std::numeric_limits<double>::infinity();
  double smax = -smin;
  for_each_branch(map, &tau, x, n, [&](const BranchState& s) {
    smin = std::min(smin, s.S);
    smax = std::max(smax, s.S);
  });
  SpreadResult out;
  out.max_period = max_period;
  out.spread = (smax - smin) + 2.0 * tail_bound(tau, map.lambda(), n);
  double bmin = std::numeric_limits<double>::infinity();
  double bmax = -bmin;
  for (std::size_t p = 1; p <= max_period; ++p) {
    for (const Word& w : all_words(map.degree(), p)) {
      const double avg = birkhoff_average(map, tau, w);
      bmin = std::min(bmin, avg);
      bmax = std::max(bmax, avg);
    }
  }
  out.birkhoff_obstruction = max_period > 0 ? bmax - bmin : 0.0;
  return out;
}

SubmultiplicativeTerms submultiplicative_terms(const CircleMap& map, const RoofFunction& tau,
                                               double R, std::size_t n, std::size_t m,
                                               double x) {
  SubmultiplicativeTerms t;
  t.combined = ncal_at(map, tau, R, n + m, x, false).count;
  const double refined = refined_radius(tau.sup_deriv(), map.lambda(), R, m);
  t.head = ncal_at(map, tau, refined, n, x, false).count;
  for_each_branch(map, &tau, x, n, [&](const BranchState& s) {
    t.tail_max = std::max(t.tail_max, ncal_at(map, tau, R, m, s.y, false).count);
  });
  return t;
}

bool CaptivityReport::any_marginal() const {
  return std::any_of(records.begin(), records.end(),
                     [](const CaptivityRecord& r) { return r.marginal; });
}

CaptivityReport captivity_report(const CircleMap& map, const RoofFunction& tau, double R,
                                 std::span<const std::size_t> depths,
                                 const XStrategy& strategy, std::size_t workers) {
  CaptivityReport report;
  report.R = R;
  report.lambda = map.lambda();
  report.Lambda = map.Lambda();
  report.sup_deriv = tau.sup_deriv();
  report.strategy = strategy_name(strategy);
  for (std::size_t n : depths) {
    CaptivityRecord rec;
    rec.n = n;
    const NcalResult nc = ncal(map, tau, R, n, strategy, workers);
    rec.ncal = nc.value;
    rec.root = std::pow(static_cast<double>(nc.value), 1.0 / static_cast<double>(n));
    rec.witness_x = nc.x;
    rec.witness_slope = nc.slope;
    rec.witness_words = nc.words;
    rec.marginal = nc.marginal;
    rec.m_value = weighted_m(map, tau, R, n, strategy, TransversalityMode::intersecting, workers).value;
    rec.n_value = weighted_n(map, tau, R, n, strategy, workers).value;
    const auto pts = sample_points(strategy, n, map.Lambda());
    rec.chi = chi_estimate(map, n, pts);
    report.records.push_back(std::move(rec));
  }
  return report;
}

}  // namespace captive

#include "captive/genericity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "captive/parallel.hpp"
#include "captive/random.hpp"

namespace captive {

std::optional<std::size_t> ProofConstants::classify(double rate) const {
  for (std::size_t j = 0; j < intervals.size(); ++j)
    if (intervals[j].contains(rate)) return j;
  return std::nullopt;
}

std::size_t count_constant(double rho, double Lambda) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  return static_cast<std::size_t>(std::ceil(6.0 / rho * std::log(std::ceil(2.0 * Lambda))));
}

bool q_condition(std::size_t q, std::size_t N, double rho, std::size_t J) {
  const double lhs = static_cast<double>(q + 1) * static_cast<double>(N) *
                     std::exp(-static_cast<double>(q) * rho / 2.0);
  return lhs < 1.0 / (4.0 * static_cast<double>(J));
}

bool ProofConstants::satisfies_definitions() const {
  if (intervals.empty()) return false;
  if (N != count_constant(rho, Lambda)) return false;
  if (!q_condition(q, N, rho, J())) return false;
  for (std::size_t k = 1; k < q; ++k)
    if (q_condition(k, N, rho, J())) return false;
  for (const auto& iv : intervals)
    if (!(iv.b - iv.a < rho / 3.0) || !(iv.b - iv.a > 2.0 * epsilon)) return false;
  // walk the union of the shrunk open intervals from log lambda upward
  double reach = log_lambda;
  for (std::size_t step = 0; step <= intervals.size(); ++step) {
    double next = reach;
    for (const auto& iv : intervals)
      if (iv.a + epsilon < reach && reach < iv.b - epsilon) next = std::max(next, iv.b - epsilon);
    if (next == reach) return false;
    reach = next;
    if (reach > log_Lambda) return true;
  }
  return false;
}

ProofConstants proof_constants(double rho, double lambda, double Lambda) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (!(lambda > 1.0) || !(Lambda >= lambda))
    throw std::invalid_argument("expansion bounds must satisfy 1 < lambda <= Lambda");
  ProofConstants pc;
  pc.rho = rho;
  pc.lambda = lambda;
  pc.Lambda = Lambda;
  pc.log_lambda = std::log(lambda);
  pc.log_Lambda = std::log(Lambda);

  // width w < rho/3, shrink eps = w/8, step w/2: consecutive shrunk
  // intervals overlap by w/4 and the first one starts below log lambda.
  const double w = 0.9 * rho / 3.0;
  pc.epsilon = w / 8.0;
  double a = pc.log_lambda - w / 4.0;
  do {
    pc.intervals.push_back({a, a + w});
    a += w / 2.0;
  } while (!(pc.intervals.back().b - pc.epsilon > pc.log_Lambda));

  pc.N = count_constant(rho, Lambda);
  for (std::size_t q = 1;; ++q) {
    if (q_condition(q, pc.N, rho, pc.J())) {
      pc.q = q;
      break;
    }
    if (q > 100000000) throw std::runtime_error("no admissible q found");
  }
  return pc;
}

Grids grids(std::size_t n, double Lambda, std::size_t cap) {
  if (n == 0) throw std::invalid_argument("grid depth must be at least 1");
  const double base = std::ceil(2.0 * Lambda);
  double size = 1.0;
  for (std::size_t k = 0; k < n && size <= static_cast<double>(cap); ++k) size *= base;
  Grids g;
  g.truncated = size > static_cast<double>(cap);
  const std::size_t count = g.truncated ? cap : static_cast<std::size_t>(size);
  g.points.resize(count);
  for (std::size_t k = 0; k < count; ++k)
    g.points[k] = static_cast<double>(k) / static_cast<double>(count);
  g.angles = g.points;
  return g;
}

AffineMap g_map(const CircleMap& map, const PerturbationFamily& family, double x,
                std::span<const Word> words) {
  AffineMap g;
  const auto p = static_cast<Eigen::Index>(words.size());
  const auto m = static_cast<Eigen::Index>(family.size());
  g.linear = AffineMap::Matrix::Zero(p, m);
  g.offset = AffineMap::Vector::Zero(p);
  g.x = canonical(x);
  g.words.assign(words.begin(), words.end());
  for (Eigen::Index a = 0; a < p; ++a) {
    const Word& w = words[static_cast<std::size_t>(a)];
    if (w.length() != words.front().length())
      throw std::invalid_argument("all words of G_{x,A} must share one length");
    double y = g.x;
    double D = 1.0;
    for (Symbol s : w.symbols) {
      y = map.inverse_branch(s, y);
      D *= map.derivative(y);
      g.offset(a) += family.base.derivative(y) / D;
      for (Eigen::Index i = 0; i < m; ++i)
        g.linear(a, i) += family.basis[static_cast<std::size_t>(i)].eval(y, 1) / D;
    }
  }
  return g;
}

bool jac_monotonicity_check(const AffineMap& g, std::size_t trials, std::uint64_t seed) {
  const double full = jacobian(g.linear);
  const auto m = static_cast<std::size_t>(g.cols());
  if (m == 0) return true;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto gen = stream_for(seed, trial);
    const std::size_t k = 1 + static_cast<std::size_t>(uniform_index(gen, m));
    std::vector<Eigen::Index> cols(m);
    for (std::size_t i = 0; i < m; ++i) cols[i] = static_cast<Eigen::Index>(i);
    for (std::size_t i = 0; i < k; ++i)  // partial Fisher-Yates
      std::swap(cols[i], cols[i + static_cast<std::size_t>(uniform_index(gen, m - i))]);
    cols.resize(k);
    std::sort(cols.begin(), cols.end());
    AffineMap::Matrix restricted(g.rows(), static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c) restricted.col(static_cast<Eigen::Index>(c)) = g.linear.col(cols[c]);
    if (jacobian(restricted) > full + 1e-9 * std::max(1.0, full)) return false;
  }
  return true;
}

double unit_ball_volume(std::size_t d) {
  const double h = static_cast<double>(d) / 2.0;
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

LebCheck leb_bound_check(const AffineMap& g, double radius, std::size_t samples,
                         std::uint64_t seed) {
  const double jac = jacobian(g.linear);
  if (jac == 0.0) throw std::domain_error("Jac = 0: the measure bound is vacuous");
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  const auto m = static_cast<std::size_t>(g.cols());
  const auto p = static_cast<std::size_t>(g.rows());

  auto gen = stream_for(seed, 0);
  AffineMap::Vector z(static_cast<Eigen::Index>(m));
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    // uniform in the unit ball: Gaussian direction, radius u^(1/m)
    for (std::size_t i = 0; i < m; ++i) {
      const double u1 = 1.0 - uniform01(gen);
      const double u2 = uniform01(gen);
      z(static_cast<Eigen::Index>(i)) =
          std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    const double r = std::pow(uniform01(gen), 1.0 / static_cast<double>(m));
    z *= r / z.norm();
    if ((g.linear * z).norm() <= radius) ++hits;
  }

  LebCheck out;
  out.empirical = static_cast<double>(hits) / static_cast<double>(samples);
  // {|z| <= 1, Mz in X} lies in (preimage in ker^perp) x (unit ball of ker)
  const double leb_x = unit_ball_volume(p) * std::pow(radius, static_cast<double>(p));
  out.bound = unit_ball_volume(m - p) / unit_ball_volume(m) * leb_x / jac;
  const double b = std::clamp(out.bound, 0.0, 1.0);
  out.sigma = std::sqrt(b * (1.0 - b) / static_cast<double>(samples));
  out.pass = out.empirical <= out.bound + 3.0 * out.sigma;
  return out;
}

std::optional<Witness> witness_extract(const CircleMap& map, const RoofFunction& tau,
                                       double R, std::size_t n, const ProofConstants& constants,
                                       const XStrategy& strategy, std::size_t workers) {
  const std::size_t q = constants.q;
  if (n <= q || constants.J() == 0) return std::nullopt;
  const NcalResult top = ncal(map, tau, R, n, strategy, workers);
  const double theta_R = theta(tau, map.lambda(), R).theta_R;

  struct Member {
    Word word;
    std::size_t j;
  };
  std::vector<Member> members;
  std::vector<std::size_t> per_interval(constants.J(), 0);
  for (const BranchState& b : enumerate_branches(map, tau, top.x, n, workers)) {
    if (!cone_interval(b, theta_R).contains(top.slope)) continue;
    const auto j = constants.classify(std::log(b.D) / static_cast<double>(n));
    if (!j) continue;
    ++per_interval[*j];
    members.push_back({b.word, *j});
  }
  const std::size_t j_best = static_cast<std::size_t>(
      std::max_element(per_interval.begin(), per_interval.end()) - per_interval.begin());

  std::map<Word, std::vector<Word>> groups;
  for (const auto& mem : members)
    if (mem.j == j_best) groups[mem.word.truncated(q)].push_back(mem.word);

  const std::size_t need = 2 * (q + 1) * constants.N;
  if (groups.size() < need) return std::nullopt;

  std::vector<const std::pair<const Word, std::vector<Word>>*> ranked;
  for (const auto& g : groups) ranked.push_back(&g);
  std::stable_sort(ranked.begin(), ranked.end(), [](auto* a, auto* b) {
    return a->second.size() > b->second.size();
  });

  Witness w;
  w.x = top.x;
  w.slope = top.slope;
  w.interval_index = j_best;
  w.count = top.value;
  w.size_threshold = std::exp(constants.rho * static_cast<double>(n)) *
                     std::pow(static_cast<double>(map.degree()), -static_cast<double>(q)) /
                     (2.0 * static_cast<double>(constants.J()));
  for (std::size_t k = 0; k < need; ++k) {
    if (static_cast<double>(ranked[k]->second.size()) < w.size_threshold) return std::nullopt;
    w.B.push_back(ranked[k]->first);
    w.sigma.emplace(ranked[k]->first, ranked[k]->second);
  }
  std::sort(w.B.begin(), w.B.end());
  return w;
}

ScanReport parameter_scan(const CircleMap& map, const PerturbationFamily& family, double R,
                          double rho, std::span<const std::size_t> depths, std::size_t samples,
                          std::uint64_t seed, std::size_t grid_points, std::size_t workers) {
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  const double uniform_bound = family.uniform_derivative_bound();
  if (!(R > uniform_bound))
    throw InvalidConeRadius("scan radius R must exceed the uniform bound " +
                            std::to_string(uniform_bound) + " on |tau_t'| over the cube");

  const auto m = static_cast<Eigen::Index>(family.size());
  const GridStrategy grid{grid_points};
  const auto points = sample_points(grid, 1, map.Lambda());
  std::vector<std::vector<std::size_t>> counts(samples);
  parallel_for(samples, workers, [&](std::size_t i) {
    auto gen = stream_for(seed, i);
    Eigen::VectorXd t(m);
    for (Eigen::Index k = 0; k < m; ++k) t(k) = uniform(gen, -1.0, 1.0);
    const RoofFunction tau_t = apply_params(family, t);
    counts[i].reserve(depths.size());
    for (std::size_t n : depths) {
      std::size_t best = 0;
      for (double x : points) best = std::max(best, ncal_at(map, tau_t, R, n, x, false).count);
      counts[i].push_back(best);
    }
  });

  ScanReport report;
  report.seed = seed;
  report.samples = samples;
  report.parameters = family.size();
  report.grid_points = grid_points;
  report.R = R;
  report.rho = rho;
  for (std::size_t d = 0; d < depths.size(); ++d) {
    ScanDepth sd;
    sd.n = depths[d];
    sd.threshold = std::exp(rho * static_cast<double>(sd.n));
    for (const auto& c : counts)
      // strict, with a relative guard so that N = l^n never exceeds e^{n log l}
      if (static_cast<double>(c[d]) > sd.threshold * (1.0 + 1e-12)) ++sd.exceed;
    sd.fraction = static_cast<double>(sd.exceed) / static_cast<double>(samples);
    sd.std_error = std::sqrt(sd.fraction * (1.0 - sd.fraction) / static_cast<double>(samples));
    report.depths.push_back(sd);
  }
  return report;
}

JacSurvey jac_survey(const CircleMap& map, const PerturbationFamily& family, std::size_t p,
                     std::size_t nu, std::size_t n, std::size_t trials, std::uint64_t seed) {
  if (p == 0 || nu == 0 || n < nu) throw std::invalid_argument("need p >= 1 and n >= nu >= 1");
  if (p > family.size()) throw std::invalid_argument("p must not exceed the family size m");
  const unsigned l = map.degree();
  const double words_nu = std::pow(static_cast<double>(l), static_cast<double>(nu));
  if (words_nu < static_cast<double>(p)) throw std::invalid_argument("fewer than p words of length nu");
  const std::size_t b_size =
      static_cast<std::size_t>(std::min(words_nu, static_cast<double>(p * (nu + 1))));
  constexpr std::size_t kExtensions = 4;

  auto random_extension = [&](std::mt19937_64& gen, const Word& beta) {
    Word w = beta;
    while (w.length() < n) w.symbols.push_back(static_cast<Symbol>(uniform_index(gen, l)));
    return w;
  };

  std::vector<double> jacs;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto gen = stream_for(seed, trial);
    const double x = uniform01(gen);
    std::set<Word> pool;
    while (pool.size() < b_size) {
      Word w;
      for (std::size_t k = 0; k < nu; ++k) w.symbols.push_back(static_cast<Symbol>(uniform_index(gen, l)));
      pool.insert(std::move(w));
    }
    std::vector<Word> B(pool.begin(), pool.end());
    std::vector<Word> extended;
    for (const auto& beta : B) extended.push_back(random_extension(gen, beta));
    const AffineMap all = g_map(map, family, x, extended);

    // greedy volume selection of B'
    std::vector<Eigen::Index> chosen;
    for (std::size_t step = 0; step < p; ++step) {
      Eigen::Index best_row = -1;
      double best_jac = -1.0;
      for (Eigen::Index r = 0; r < all.rows(); ++r) {
        if (std::find(chosen.begin(), chosen.end(), r) != chosen.end()) continue;
        AffineMap::Matrix sub(static_cast<Eigen::Index>(chosen.size() + 1), all.cols());
        for (std::size_t c = 0; c < chosen.size(); ++c) sub.row(static_cast<Eigen::Index>(c)) = all.linear.row(chosen[c]);
        sub.row(static_cast<Eigen::Index>(chosen.size())) = all.linear.row(r);
        const double jv = jacobian(sub);
        if (jv > best_jac) {
          best_jac = jv;
          best_row = r;
        }
      }
      chosen.push_back(best_row);
    }
    for (std::size_t e = 0; e < kExtensions; ++e) {
      std::vector<Word> A;
      for (Eigen::Index r : chosen) A.push_back(random_extension(gen, B[static_cast<std::size_t>(r)]));
      jacs.push_back(jacobian(g_map(map, family, x, A).linear));
    }
  }

  JacSurvey s;
  s.trials = trials;
  s.evaluations = jacs.size();
  if (jacs.empty()) return s;
  std::vector<double> sorted = jacs;
  std::sort(sorted.begin(), sorted.end());
  s.min_jac = sorted.front();
  s.median_jac = sorted[sorted.size() / 2];
  s.at_least_one = static_cast<std::size_t>(
      std::count_if(jacs.begin(), jacs.end(), [](double v) { return v >= 1.0; }));
  s.required_scale = s.min_jac > 0.0 ? std::pow(s.min_jac, -1.0 / static_cast<double>(p))
                                     : std::numeric_limits<double>::infinity();
  return s;
}

}  // namespace captive

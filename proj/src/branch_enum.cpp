#include "captive/branch_enum.hpp"

#include <cmath>
#include <sstream>

#include "captive/parallel.hpp"
#include "captive/summation.hpp"

namespace captive {

Word Word::from_display(std::initializer_list<Symbol> display) {
  return Word{std::vector<Symbol>(std::rbegin(display), std::rend(display))};
}

Word Word::truncated(std::size_t p) const {
  if (p > symbols.size()) throw std::out_of_range("truncation longer than word");
  return Word{std::vector<Symbol>(symbols.begin(), symbols.begin() + static_cast<std::ptrdiff_t>(p))};
}

std::string Word::to_string() const {
  bool wide = false;
  for (Symbol s : symbols) wide = wide || s >= 10;
  std::ostringstream os;
  for (auto it = symbols.rbegin(); it != symbols.rend(); ++it) {
    if (wide && it != symbols.rbegin()) os << ',';
    os << *it;
  }
  return os.str();
}

BranchState extend(const BranchState& state, Symbol symbol, const CircleMap& map,
                   const RoofFunction& tau) {
  BranchState next;
  next.word = state.word;
  next.word.symbols.push_back(symbol);
  next.y = map.inverse_branch(symbol, state.y);
  next.D = map.derivative(next.y) * state.D;
  next.S = state.S + tau.derivative(next.y) / next.D;
  return next;
}

std::vector<BranchState> enumerate_branches(const CircleMap& map, const RoofFunction& tau,
                                            double x, std::size_t n, std::size_t workers) {
  if (n == 0) return {root_state(x)};
  const unsigned l = map.degree();
  std::vector<std::vector<BranchState>> parts(l);
  const BranchState root = root_state(x);
  parallel_for(l, workers, [&](std::size_t j) {
    const BranchState top = extend(root, static_cast<Symbol>(j), map, tau);
    for_each_branch_from(map, &tau, top, n - 1,
                         [&](const BranchState& s) { parts[j].push_back(s); });
  });
  std::vector<BranchState> out;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  out.reserve(total);
  for (auto& p : parts)
    for (auto& s : p) out.push_back(std::move(s));
  return out;
}

double distortion_sum(const CircleMap& map, double x, std::size_t n) {
  CompensatedSum sum;
  for_each_branch(map, nullptr, x, n, [&](const BranchState& s) { sum += 1.0 / s.D; });
  return sum.value();
}

std::size_t count_small_derivative(const CircleMap& map, double x, std::size_t n, double b) {
  const double threshold = std::exp(b * static_cast<double>(n)) * (1.0 + 1e-12);
  std::size_t count = 0;
  for_each_branch(map, nullptr, x, n, [&](const BranchState& s) {
    if (s.D <= threshold) ++count;
  });
  return count;
}

double tail_bound(double sup_deriv, double lambda, std::size_t n) {
  if (!(lambda > 1.0)) throw std::invalid_argument("lambda must exceed 1");
  return sup_deriv * std::pow(lambda, -static_cast<double>(n)) / (lambda - 1.0);
}

namespace {

// One Newton step on F^p(x) - x - k = 0, kept only if the residual shrinks.
double polish_periodic(const CircleMap& map, double x, std::size_t p) {
  auto residual = [&](double z, double* slope) {
    double f = z, d = 1.0;
    for (std::size_t i = 0; i < p; ++i) {
      d *= map.derivative(canonical(f));
      f = map.lift(f);
    }
    if (slope) *slope = d;
    return f - z - std::round(f - z);
  };
  double d = 0.0;
  const double r = residual(x, &d);
  const double candidate = x - r / (d - 1.0);
  if (candidate < 0.0 || candidate > 1.0) return x;
  return std::abs(residual(candidate, nullptr)) <= std::abs(r) ? candidate : x;
}

}  // namespace

PeriodicPoint periodic_point(const CircleMap& map, const Word& alpha) {
  if (alpha.length() == 0) throw std::invalid_argument("periodic word must be nonempty");
  const double contraction = std::pow(map.lambda(), -static_cast<double>(alpha.length()));
  const double factor = contraction / (1.0 - contraction);
  double x = 0.5;
  for (int it = 0; it < 10000; ++it) {
    double y = x;
    for (Symbol s : alpha.symbols) y = map.inverse_branch(s, y);
    const double step = std::abs(y - x);
    x = y;
    if (step * factor <= 1e-13 || step == 0.0) {
      x = polish_periodic(map, x, alpha.length());
      if (x >= 1.0 - 1e-12) return {0.0, true};
      return {x, false};
    }
  }
  throw ConvergenceError("periodic point iteration did not converge");
}

std::vector<double> periodic_orbit(const CircleMap& map, const Word& alpha) {
  const PeriodicPoint p = periodic_point(map, alpha);
  std::vector<double> orbit;
  orbit.reserve(alpha.length());
  double z = p.boundary ? 1.0 : p.x;
  orbit.push_back(canonical(z));
  for (std::size_t k = 0; k + 1 < alpha.length(); ++k) {
    z = map.inverse_branch(alpha.symbols[k], z);
    orbit.push_back(canonical(z));
  }
  return orbit;
}

double birkhoff_average(const CircleMap& map, const RoofFunction& tau, const Word& alpha) {
  double sum = 0.0;
  for (double z : periodic_orbit(map, alpha)) sum += tau(z);
  return sum / static_cast<double>(alpha.length());
}

std::vector<Word> all_words(unsigned degree, std::size_t p) {
  std::vector<Word> out;
  Word w{std::vector<Symbol>(p, 0)};
  for (;;) {
    out.push_back(w);
    std::size_t k = p;
    while (k > 0) {
      --k;
      if (++w.symbols[k] < degree) break;
      w.symbols[k] = 0;
      if (k == 0) return out;
    }
    if (p == 0) return out;
  }
}

}  // namespace captive

#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "captive/circle_map.hpp"
#include "captive/cocycle.hpp"

namespace captive {

/// Word alpha = (alpha_n, ..., alpha_1) over {0, ..., l-1}.
///
/// Stored in depth order: symbols[k-1] = alpha_k is the branch chosen at the
/// k-th backward step from the root. The truncation [alpha]_p is therefore
/// the first p stored symbols, and the default ordering is lexicographic in
/// (alpha_1, ..., alpha_n), which is the enumeration order.
struct Word {
  std::vector<Symbol> symbols;

  /// Build from the conventional display order (alpha_n, ..., alpha_1).
  static Word from_display(std::initializer_list<Symbol> display);

  std::size_t length() const { return symbols.size(); }
  Word truncated(std::size_t p) const;
  /// Display-order string "alpha_n...alpha_1" (comma separated when l > 10).
  std::string to_string() const;

  auto operator<=>(const Word&) const = default;
  bool operator==(const Word&) const = default;
};

/// Backward branch x_alpha with D = (E^n)'(x_alpha) and
/// S = S_n(x; alpha) = sum_k tau'(x_[alpha]_k) / (E^k)'(x_[alpha]_k).
struct BranchState {
  Word word;
  double y = 0.0;
  double D = 1.0;
  double S = 0.0;
};

inline BranchState root_state(double x) { return {Word{}, canonical(x), 1.0, 0.0}; }

/// One backward step: y' = g_symbol(y), D' = E'(y') D, S' = S + tau'(y') / D'.
BranchState extend(const BranchState& state, Symbol symbol, const CircleMap& map,
                   const RoofFunction& tau);

namespace detail {

template <typename Visitor>
void descend(const CircleMap& map, const RoofFunction* tau, std::size_t remaining,
             BranchState& state, Visitor& visit) {
  if (remaining == 0) {
    visit(static_cast<const BranchState&>(state));
    return;
  }
  const double y = state.y;
  const double D = state.D;
  const double S = state.S;
  for (Symbol j = 0; j < map.degree(); ++j) {
    const double yj = map.inverse_branch(j, y);
    const double Dj = map.derivative(yj) * D;
    state.y = yj;
    state.D = Dj;
    state.S = tau ? S + tau->derivative(yj) / Dj : 0.0;
    state.word.symbols.push_back(j);
    descend(map, tau, remaining - 1, state, visit);
    state.word.symbols.pop_back();
  }
  state.y = y;
  state.D = D;
  state.S = S;
}

}  // namespace detail

/// Depth-first walk over the l^depth extensions of `start`, calling
/// visit(const BranchState&) on each leaf in lexicographic order. The state
/// passed to the visitor is reused between calls. `tau` may be null, in
/// which case S stays 0.
template <typename Visitor>
void for_each_branch_from(const CircleMap& map, const RoofFunction* tau,
                          const BranchState& start, std::size_t depth, Visitor&& visit) {
  BranchState state = start;
  state.word.symbols.reserve(start.word.length() + depth);
  detail::descend(map, tau, depth, state, visit);
}

template <typename Visitor>
void for_each_branch(const CircleMap& map, const RoofFunction* tau, double x,
                     std::size_t n, Visitor&& visit) {
  for_each_branch_from(map, tau, root_state(x), n, std::forward<Visitor>(visit));
}

/// All l^n branches of E^n over x in lexicographic order. With workers > 1
/// the top-level subtrees are walked concurrently and concatenated in
/// symbol order, so the result does not depend on the worker count.
std::vector<BranchState> enumerate_branches(const CircleMap& map, const RoofFunction& tau,
                                            double x, std::size_t n, std::size_t workers = 1);

/// sum over y in E^{-n}(x) of 1 / (E^n)'(y).
double distortion_sum(const CircleMap& map, double x, std::size_t n);

/// #{y in E^{-n}(x) : (E^n)'(y) <= e^{b n}}, with relative tolerance 1e-12
/// on the threshold.
std::size_t count_small_derivative(const CircleMap& map, double x, std::size_t n, double b);

/// sup over infinite extensions of |S(x; alpha) - S_n(x; alpha)|, i.e.
/// ||tau'|| lambda^-n / (lambda - 1).
double tail_bound(double sup_deriv, double lambda, std::size_t n);
inline double tail_bound(const RoofFunction& tau, double lambda, std::size_t n) {
  return tail_bound(tau.sup_deriv(), lambda, n);
}

struct PeriodicPoint {
  double x = 0.0;
  /// Set when the fixed point sits on the partition boundary 0 == 1 (the
  /// all-(l-1) word); x is then reported as 0.
  bool boundary = false;
};

/// Fixed point of the composed inverse branch g_alpha = g_{alpha_n} o ... o
/// g_{alpha_1}, i.e. the point of period |alpha| with itinerary alpha.
PeriodicPoint periodic_point(const CircleMap& map, const Word& alpha);

/// Orbit of periodic_point(alpha), listed along the backward chain.
std::vector<double> periodic_orbit(const CircleMap& map, const Word& alpha);

/// (1/p) sum_{i<p} tau(E^i x) at x = periodic_point(alpha), p = |alpha|.
double birkhoff_average(const CircleMap& map, const RoofFunction& tau, const Word& alpha);

/// All words of length p (lexicographic).
std::vector<Word> all_words(unsigned degree, std::size_t p);

}  // namespace captive

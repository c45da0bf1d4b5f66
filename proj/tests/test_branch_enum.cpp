#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "captive/branch_enum.hpp"
#include "oracles.hpp"

using namespace captive;
using oracle::kPi;

namespace {
const CircleMap kDoubling = CircleMap::linear(2);
const RoofFunction kCosDeriv(TrigPoly::sine(1, 1 / (2 * kPi)));  // tau' = cos 2 pi x
}  // namespace

TEST_CASE("extend") {
  const BranchState root = root_state(0.0);
  const BranchState a = extend(root, 0, kDoubling, kCosDeriv);
  CHECK(a.y == 0.0);
  CHECK(a.D == 2.0);
  CHECK(a.S == doctest::Approx(0.5).epsilon(1e-15));
  const BranchState b = extend(root, 1, kDoubling, kCosDeriv);
  CHECK(b.y == 0.5);
  CHECK(b.D == 2.0);
  CHECK(b.S == doctest::Approx(-0.5).epsilon(1e-15));

  const RoofFunction c(TrigPoly::constant(0.3));
  BranchState s = root_state(0.37);
  for (Symbol sym : {1u, 0u, 1u, 1u}) {
    s = extend(s, sym, kDoubling, c);
    CHECK(s.S == 0.0);
  }
  CHECK(s.word == Word::from_display({1, 1, 0, 1}));
}

TEST_CASE("word conventions") {
  const Word w = Word::from_display({2, 0, 1});  // alpha_3 = 2, alpha_1 = 1
  CHECK(w.symbols == std::vector<Symbol>{1, 0, 2});
  CHECK(w.truncated(2) == Word::from_display({0, 1}));
  CHECK(w.to_string() == "201");
  CHECK(Word::from_display({10, 3}).to_string() == "10,3");
}

TEST_CASE("enumerate_branches order and count") {
  const auto states = enumerate_branches(kDoubling, kCosDeriv, 0.2, 3);
  REQUIRE(states.size() == 8);
  for (std::size_t i = 1; i < states.size(); ++i) CHECK(states[i - 1].word < states[i].word);
  CHECK(states.front().word == Word::from_display({0, 0, 0}));
  CHECK(states[1].word == Word::from_display({1, 0, 0}));
}

TEST_CASE("slopes at depth two") {
  const auto states = enumerate_branches(kDoubling, kCosDeriv, 0.0, 2);
  REQUIRE(states.size() == 4);
  const Word words[] = {Word::from_display({0, 0}), Word::from_display({1, 0}),
                        Word::from_display({0, 1}), Word::from_display({1, 1})};
  const double slopes[] = {0.75, 0.25, -0.5, -0.5};
  for (int i = 0; i < 4; ++i) {
    CHECK(states[i].word == words[i]);
    CHECK(states[i].S == doctest::Approx(slopes[i]).epsilon(1e-14));
    CHECK(oracle::branch(kDoubling, kCosDeriv, 0.0, words[i]).S ==
          doctest::Approx(slopes[i]).epsilon(1e-12));
  }
}

TEST_CASE("zero roof") {
  const CircleMap m(2, TrigPoly(0.0, {0.05}, {}));
  const RoofFunction zero;
  for (const auto& b : enumerate_branches(m, zero, 0.3, 5)) {
    CHECK(b.S == 0.0);
    CHECK(b.D >= std::pow(m.lambda(), 5) * (1 - 1e-14));
    CHECK(b.D <= std::pow(m.Lambda(), 5) * (1 + 1e-14));
  }
}

TEST_CASE("incremental states agree with the non-incremental oracle") {
  const CircleMap maps[] = {CircleMap(2, TrigPoly(0.0, {0.05, 0.01}, {0.02, -0.02})),
                            CircleMap(3, TrigPoly(0.0, {0.03}, {}))};
  const RoofFunction tau(TrigPoly(0.0, {0.2, -0.1}, {0.15}));
  for (const auto& m : maps) {
    const std::size_t n = m.degree() == 2 ? 10 : 6;
    for (double x : {0.0, 0.31, 0.77}) {
      const auto states = enumerate_branches(m, tau, x, n);
      REQUIRE(states.size() == static_cast<std::size_t>(std::pow(m.degree(), n)));
      std::set<double> ys;
      for (std::size_t i = 0; i < states.size(); i += 7) {
        const auto& s = states[i];
        const auto ref = oracle::branch(m, tau, x, s.word);
        CHECK(std::abs(s.S - ref.S) <= 1e-10);
        CHECK(std::abs(s.D - ref.D) <= 1e-10 * ref.D);
        CHECK(std::abs(s.y - ref.y) <= 1e-10);
      }
      for (const auto& s : states) {
        ys.insert(s.y);
        double z = s.y;
        for (std::size_t k = 0; k < n; ++k) z = m.eval(z);
        CHECK(std::min(std::abs(z - x), 1 - std::abs(z - x)) <= 1e-10);
      }
      CHECK(ys.size() == states.size());
    }
  }
}

TEST_CASE("slope bounds") {
  const CircleMap m(2, TrigPoly(0.0, {0.05}, {}));
  const RoofFunction tau(TrigPoly(0.0, {0.2}, {0.1}));
  const double theta_tau = tau.sup_deriv() / (m.lambda() - 1);
  const std::size_t n = 8;
  const auto shallow = enumerate_branches(m, tau, 0.4, n);
  const auto deep = enumerate_branches(m, tau, 0.4, n + 1);
  for (std::size_t i = 0; i < deep.size(); ++i) {
    CHECK(std::abs(deep[i].S) <= theta_tau);
    // deep[i] extends shallow[i / 2] by one symbol
    const auto& parent = shallow[i / 2];
    REQUIRE(deep[i].word.truncated(n) == parent.word);
    CHECK(std::abs(deep[i].S - parent.S) <= tau.sup_deriv() * std::pow(m.lambda(), -double(n + 1)));
  }
}

TEST_CASE("parallel enumeration matches serial") {
  const CircleMap m(3, TrigPoly(0.0, {0.03}, {}));
  const RoofFunction tau(TrigPoly::sine(1, 0.1));
  const auto a = enumerate_branches(m, tau, 0.2, 6, 1);
  const auto b = enumerate_branches(m, tau, 0.2, 6, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].word == b[i].word);
    CHECK(a[i].S == b[i].S);
    CHECK(a[i].D == b[i].D);
  }
}

TEST_CASE("distortion_sum") {
  for (std::size_t n : {1u, 5u, 12u}) {
    CHECK(distortion_sum(kDoubling, 0.3, n) == 1.0);
    CHECK(distortion_sum(CircleMap::linear(3), 0.7, n) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const CircleMap m(2, TrigPoly(0.0, {0.05}, {}));
  const double s10 = distortion_sum(m, 0.3, 10);
  const double s12 = distortion_sum(m, 0.3, 12);
  double direct = 0.0;
  for (const auto& b : oracle::all_branches(m, RoofFunction(), 0.3, 10)) direct += 1.0 / b.D;
  CHECK(s10 == doctest::Approx(direct).epsilon(1e-10));
  CHECK(std::max(s10 / s12, s12 / s10) <= 1.1);
}

TEST_CASE("count_small_derivative") {
  for (std::size_t n : {3u, 8u}) {
    CHECK(count_small_derivative(kDoubling, 0.2, n, std::log(2.0)) == (1u << n));
    CHECK(count_small_derivative(kDoubling, 0.2, n, std::log(2.0) - 1e-6) == 0);
  }
  const CircleMap m(2, TrigPoly(0.0, {0.05}, {}));
  std::size_t direct = 0;
  for (const auto& b : oracle::all_branches(m, RoofFunction(), 0.3, 10)) direct += b.D <= std::exp(6.0);
  const std::size_t count = count_small_derivative(m, 0.3, 10, 0.6);
  CHECK(count == direct);
  const double s = distortion_sum(m, 0.3, 10);
  CHECK(static_cast<double>(count) <= std::max(s, 1 / s) * std::exp(6.0));
}

TEST_CASE("tail_bound") {
  CHECK(tail_bound(1.0, 2.0, 3) == 0.125);
  CHECK(tail_bound(RoofFunction(TrigPoly::constant(1.0)), 2.0, 5) == 0.0);
  CHECK(tail_bound(2.0, 2.0, 1) == 1.0);
}

TEST_CASE("periodic points") {
  const PeriodicPoint fixed = periodic_point(kDoubling, Word::from_display({0}));
  CHECK(fixed.x == 0.0);
  CHECK_FALSE(fixed.boundary);

  const PeriodicPoint third = periodic_point(kDoubling, Word::from_display({0, 1}));
  CHECK(third.x == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(kDoubling.eval(kDoubling.eval(third.x)) == doctest::Approx(third.x).epsilon(1e-12));

  const PeriodicPoint edge = periodic_point(kDoubling, Word::from_display({1}));
  CHECK(edge.x == 0.0);
  CHECK(edge.boundary);

  const CircleMap m(3, TrigPoly(0.0, {0.03}, {0.01, -0.01}));
  for (const auto& w : all_words(3, 3)) {
    const PeriodicPoint p = periodic_point(m, w);
    double z = p.x;
    for (int k = 0; k < 3; ++k) z = m.eval(z);
    CHECK(std::min(std::abs(z - p.x), 1 - std::abs(z - p.x)) <= 1e-10);
  }
}

TEST_CASE("birkhoff averages") {
  const RoofFunction c(TrigPoly::constant(0.4));
  for (const auto& w : all_words(2, 3)) CHECK(birkhoff_average(kDoubling, c, w) == doctest::Approx(0.4));

  const CircleMap m(2, TrigPoly(0.0, {0.05}, {}));
  const RoofFunction cob = coboundary_from(TrigPoly(0.0, {0.1}, {0.05}), 0.3, m);
  for (std::size_t p = 1; p <= 5; ++p)
    for (const auto& w : all_words(2, p)) CHECK(std::abs(birkhoff_average(m, cob, w) - 0.3) <= 1e-9);

  // sin 2 pi x is odd about 1/2, so it averages to 0 on the orbits of 0 and
  // {1/3, 2/3}; the period-3 orbit {1/7, 2/7, 4/7} is not symmetric
  const RoofFunction generic(TrigPoly::sine(1, 1 / (2 * kPi)));
  const double a = birkhoff_average(kDoubling, generic, Word::from_display({0}));
  const double b = birkhoff_average(kDoubling, generic, Word::from_display({0, 1}));
  const double c3 = birkhoff_average(kDoubling, generic, Word::from_display({0, 0, 1}));
  CHECK(std::abs(a) <= 1e-12);
  CHECK(std::abs(b) <= 1e-12);
  const double direct =
      (std::sin(2 * kPi / 7) + std::sin(4 * kPi / 7) + std::sin(8 * kPi / 7)) / (3 * 2 * kPi);
  CHECK(c3 == doctest::Approx(direct).epsilon(1e-10));
  CHECK(std::abs(c3 - a) > 0.01);
}

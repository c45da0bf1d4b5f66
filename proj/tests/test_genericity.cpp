#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "captive/genericity.hpp"
#include "oracles.hpp"

using namespace captive;
using oracle::kPi;

namespace {

// smallest q >= 1 with (q + 1) N e^{-q rho / 2} < 1 / (4 J), by plain scan
std::size_t scan_q(std::size_t N, double rho, std::size_t J) {
  for (std::size_t q = 1;; ++q)
    if ((q + 1.0) * N * std::exp(-(q * rho) / 2) < 1.0 / (4.0 * J)) return q;
}

double gram_oracle(const Eigen::MatrixXd& L) {
  const Eigen::MatrixXd G = L * L.transpose();
  return std::sqrt(std::max(0.0, G.partialPivLu().determinant()));
}

AffineMap affine(const Eigen::MatrixXd& L) {
  AffineMap g;
  g.linear = L;
  g.offset = Eigen::VectorXd::Zero(L.rows());
  return g;
}

const CircleMap kDoubling = CircleMap::linear(2);
const RoofFunction kGeneric(TrigPoly::sine(1, 1 / (2 * kPi)));

}  // namespace

TEST_CASE("proof constants") {
  const ProofConstants c = proof_constants(0.3, 2.0, 2.0);
  CHECK(c.N == static_cast<std::size_t>(std::ceil(6 * std::log(4.0) / 0.3)));
  CHECK(c.N == 28);
  CHECK(c.J() == 1);
  CHECK(c.q == scan_q(28, 0.3, 1));
  CHECK(c.q == 59);
  CHECK(c.satisfies_definitions());
  CHECK(q_condition(59, 28, 0.3, 1));
  CHECK_FALSE(q_condition(58, 28, 0.3, 1));

  // linear map: one interval of positive length around log lambda
  REQUIRE(c.intervals.size() == 1);
  CHECK(c.intervals[0].a < std::log(2.0));
  CHECK(c.intervals[0].b > std::log(2.0));
  CHECK(c.intervals[0].b - c.intervals[0].a < 0.3 / 3);
  CHECK(c.classify(std::log(2.0)) == std::optional<std::size_t>(0));

  const ProofConstants wide = proof_constants(0.2, 1.5, 2.6);
  CHECK(wide.satisfies_definitions());
  CHECK(wide.N == count_constant(0.2, 2.6));
  CHECK(wide.q == scan_q(wide.N, 0.2, wide.J()));
  for (double r = std::log(1.5); r <= std::log(2.6); r += 1e-3) {
    const auto j = wide.classify(r);
    REQUIRE(j);
    CHECK(wide.intervals[*j].contains(r));
    for (std::size_t i = 0; i < *j; ++i) CHECK_FALSE(wide.intervals[i].contains(r));
  }
}

TEST_CASE("grids") {
  const Grids g1 = grids(1, 2.0, 1u << 16);
  CHECK(g1.points == std::vector<double>{0.0, 0.25, 0.5, 0.75});
  CHECK(g1.angles.size() == 4);
  CHECK_FALSE(g1.truncated);
  CHECK(grids(2, 2.0, 1u << 16).points.size() == 16);
  const Grids big = grids(20, 2.0, 1u << 16);
  CHECK(big.points.size() == (1u << 16));
  CHECK(big.truncated);
}

TEST_CASE("g_map") {
  const PerturbationFamily flat{RoofFunction(), {TrigPoly::constant(1.0)}};
  const auto words = all_words(2, 3);
  const AffineMap z = g_map(kDoubling, flat, 0.2, words);
  CHECK(z.linear.isZero(0.0));

  const PerturbationFamily one{RoofFunction(), {TrigPoly::sine(1)}};
  const std::vector<Word> w0 = {Word::from_display({0})};
  const AffineMap g = g_map(kDoubling, one, 0.0, w0);
  CHECK(g.linear(0, 0) == doctest::Approx(kPi).epsilon(1e-15));
}

TEST_CASE("g_map is affine and matches direct slopes") {
  const CircleMap m(2, TrigPoly(0.0, {0.05}, {}));
  const PerturbationFamily fam = fourier_family(RoofFunction(TrigPoly(0.0, {0.1}, {0.05})), 3, 0.2);
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto all = all_words(2, 6);
  std::vector<Word> words(all.begin(), all.begin() + 10);
  for (double x : {0.0, 0.35}) {
    const AffineMap g = g_map(m, fam, x, words);
    for (std::size_t a = 0; a < words.size(); ++a)
      CHECK(g.offset(static_cast<Eigen::Index>(a)) ==
            doctest::Approx(oracle::branch(m, fam.base, x, words[a]).S).epsilon(1e-10));
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd t(6);
      for (int i = 0; i < 6; ++i) t(i) = u(gen);
      const RoofFunction tau_t = apply_params(fam, t);
      const Eigen::VectorXd v = g(t);
      for (std::size_t a = 0; a < words.size(); ++a)
        CHECK(std::abs(v(static_cast<Eigen::Index>(a)) - oracle::branch(m, tau_t, x, words[a]).S) <= 1e-10);
    }
  }
}

TEST_CASE("jacobian") {
  CHECK(jacobian(Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(1.0));
  Eigen::MatrixXd L(2, 3);
  L << 3, 0, 0, 0, 4, 0;
  CHECK(jacobian(L) == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(jacobian(Eigen::MatrixXd::Zero(2, 3)) == 0.0);
  CHECK(jacobian(Eigen::MatrixXd::Ones(3, 2)) == 0.0);  // p > m
  Eigen::MatrixXd rank1(2, 3);
  rank1 << 1, 2, 3, 2, 4, 6;
  CHECK(jacobian(rank1) == 0.0);

  Eigen::MatrixXf Lf(2, 3);
  Lf << 3, 0, 0, 0, 4, 0;
  CHECK(jacobian(Lf) == doctest::Approx(12.0f));

  std::mt19937_64 gen(23);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + trial % 7, p = 1 + trial % m;
    Eigen::MatrixXd A(p, m);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < m; ++j) A(i, j) = nd(gen);
    const double oracle_value = gram_oracle(A);
    CHECK(std::abs(jacobian(A) - oracle_value) <= 1e-9 * oracle_value);
  }
}

TEST_CASE("jac monotonicity") {
  CHECK(jac_monotonicity_check(affine(Eigen::MatrixXd::Identity(3, 3)), 50, 1));
  Eigen::MatrixXd L(2, 3);
  L << 3, 0, 0, 0, 4, 0;
  CHECK(jacobian(Eigen::MatrixXd(L.leftCols(2))) == doctest::Approx(jacobian(L)));
  CHECK(jac_monotonicity_check(affine(L), 50, 2));
  std::mt19937_64 gen(29);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd R(3, 6);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 6; ++j) R(i, j) = nd(gen);
  CHECK(jac_monotonicity_check(affine(R), 100, 3));
}

TEST_CASE("leb bound") {
  CHECK(unit_ball_volume(0) == doctest::Approx(1.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(kPi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4 * kPi / 3));

  const LebCheck id = leb_bound_check(affine(Eigen::MatrixXd::Identity(1, 1)), 0.1, 100000, 5);
  CHECK(id.empirical == doctest::Approx(0.1).epsilon(0.05));
  CHECK(id.bound == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(id.pass);

  const LebCheck ten = leb_bound_check(affine(10 * Eigen::MatrixXd::Identity(1, 1)), 0.1, 100000, 5);
  CHECK(ten.empirical == doctest::Approx(0.01).epsilon(0.15));
  CHECK(ten.bound == doctest::Approx(id.bound / 10).epsilon(1e-12));
  CHECK(ten.pass);

  std::mt19937_64 gen(31);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd A(2, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = nd(gen);
  CHECK(leb_bound_check(affine(A), 0.3, 100000, 7).pass);

  CHECK_THROWS_AS(leb_bound_check(affine(Eigen::MatrixXd::Zero(1, 2)), 0.1, 10, 1), std::domain_error);
}

TEST_CASE("witness extraction") {
  ProofConstants c = proof_constants(0.1, 2.0, 2.0);
  c.N = 1;
  c.q = 3;
  const auto w = witness_extract(kDoubling, RoofFunction(), 1.0, 8, c, GridStrategy{8});
  REQUIRE(w);
  CHECK(w->B.size() == 8);
  for (const auto& beta : w->B) {
    CHECK(w->sigma.at(beta).size() == 32);
    for (const auto& a : w->sigma.at(beta)) CHECK(a.truncated(3) == beta);
  }

  c.q = 8;
  CHECK_FALSE(witness_extract(kDoubling, RoofFunction(), 1.0, 8, c, GridStrategy{8}));
  c.q = 9;
  CHECK_FALSE(witness_extract(kDoubling, RoofFunction(), 1.0, 8, c, GridStrategy{8}));

  // q = 2 leaves only 4 groups, fewer than 2 (q + 1) N = 6
  c.q = 2;
  CHECK_FALSE(witness_extract(kDoubling, kGeneric, 2.0, 12, c, GridStrategy{64}));
}

TEST_CASE("parameter scan") {
  const PerturbationFamily frozen = fourier_family(RoofFunction(), 2, 0.0);
  const std::vector<std::size_t> depths = {3, 5};
  const ScanReport all = parameter_scan(kDoubling, frozen, 1.0, 0.5 * std::log(2.0), depths, 5, 1, 8);
  for (const auto& d : all.depths) CHECK(d.fraction == 1.0);
  const ScanReport none = parameter_scan(kDoubling, frozen, 1.0, std::log(2.0), depths, 5, 1, 8);
  for (const auto& d : none.depths) CHECK(d.fraction == 0.0);

  const PerturbationFamily fam = fourier_family(kGeneric, 2, 0.1);
  const double R = fam.uniform_derivative_bound() + 0.5;
  const ScanReport a = parameter_scan(kDoubling, fam, R, 0.4, depths, 12, 99, 16, 1);
  const ScanReport b = parameter_scan(kDoubling, fam, R, 0.4, depths, 12, 99, 16, 3);
  for (std::size_t i = 0; i < depths.size(); ++i) {
    CHECK(a.depths[i].exceed == b.depths[i].exceed);
    CHECK(a.depths[i].std_error == b.depths[i].std_error);
  }
  CHECK_THROWS_AS(parameter_scan(kDoubling, fam, 0.5, 0.4, depths, 4, 1, 8), InvalidConeRadius);
}

TEST_CASE("jac survey") {
  const PerturbationFamily fam = fourier_family(kGeneric, 4, 1.0);
  const JacSurvey s = jac_survey(kDoubling, fam, 2, 2, 4, 6, 11);
  CHECK(s.trials == 6);
  CHECK(s.min_jac >= 0.0);
  CHECK(s.min_jac <= s.median_jac);
  CHECK(s.evaluations >= s.trials);
  CHECK(s.at_least_one <= s.evaluations);
  const JacSurvey again = jac_survey(kDoubling, fam, 2, 2, 4, 6, 11);
  CHECK(again.min_jac == s.min_jac);
}

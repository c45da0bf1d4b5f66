#include "captive/circle_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace captive {

double canonical(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

Symbol BranchPartition::branch_of(double x) const {
  const auto it = std::upper_bound(endpoints.begin(), endpoints.end(), x);
  return static_cast<Symbol>(std::max<std::ptrdiff_t>(0, (it - endpoints.begin()) - 1));
}

ExpansionBounds expansion_bounds(unsigned degree, const TrigPoly& perturbation,
                                 std::size_t grid) {
  const double l = static_cast<double>(degree);
  const double d1 = perturbation.derivative_bound(1);
  ExpansionBounds closed{l - d1, l + d1};
  if (d1 == 0.0) return closed;

  double lo = l + d1;
  double hi = l - d1;
  const double h = 1.0 / static_cast<double>(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    const double v = l + perturbation.eval(static_cast<double>(i) * h, 1);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double slack = perturbation.derivative_bound(3) * h * h / 8.0;
  return {std::max(closed.lambda, lo - slack), std::min(closed.Lambda, hi + slack)};
}

CircleMap::CircleMap(unsigned degree, TrigPoly perturbation)
    : degree_(degree), perturbation_(std::move(perturbation)) {
  if (degree_ < 2) throw InvalidMap("degree must be at least 2");

  const double f0 = perturbation_.eval(0.0);
  shift_ = std::round(f0);
  if (std::abs(f0 - shift_) > 1e-12) {
    std::ostringstream os;
    os << "F(0) = " << f0 << " is not an integer; 0 must be a fixed point";
    throw InvalidMap(os.str());
  }
  linear_ = perturbation_.is_constant();

  bounds_ = captive::expansion_bounds(degree_, perturbation_);
  if (!(bounds_.lambda > 1.0)) {
    std::ostringstream os;
    os << "map is not expanding: certified lower bound lambda = " << bounds_.lambda;
    throw InvalidMap(os.str());
  }

  partition_.endpoints.resize(degree_);
  partition_.endpoints[0] = 0.0;
  for (unsigned j = 1; j < degree_; ++j)
    partition_.endpoints[j] = solve_lift(static_cast<double>(j), 0.0, 1.0);
  for (unsigned j = 1; j < degree_; ++j) {
    if (!(partition_.endpoints[j] > partition_.endpoints[j - 1]))
      throw InvalidMap("branch partition endpoints are not increasing");
  }
}

double CircleMap::lift(double x) const {
  if (linear_) return static_cast<double>(degree_) * x;
  return static_cast<double>(degree_) * x + perturbation_.eval(x) - shift_;
}

double CircleMap::derivative(double x) const {
  if (linear_) return static_cast<double>(degree_);
  return static_cast<double>(degree_) + perturbation_.eval(x, 1);
}

double CircleMap::second_derivative(double x) const {
  if (linear_) return 0.0;
  return perturbation_.eval(x, 2);
}

double CircleMap::solve_lift(double target, double lo, double hi) const {
  if (linear_) return target / static_cast<double>(degree_);

  double y = std::clamp(target / static_cast<double>(degree_), lo, hi);
  int polish = 1;  // one extra Newton step once inside tolerance
  for (int it = 0; it < kInverseIterations; ++it) {
    const double r = lift(y) - target;
    if (r == 0.0) break;
    if (std::abs(r) <= kInverseTolerance && polish-- == 0) break;
    if (r > 0.0) hi = y; else lo = y;
    double next = y - r / derivative(y);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    y = next;
  }
  const double residual = std::abs(lift(y) - target);
  if (!(residual <= kInverseTolerance)) {
    std::ostringstream os;
    os << "inverse branch did not converge: target " << target << ", residual " << residual;
    throw ConvergenceError(os.str());
  }
  return y;
}

double CircleMap::inverse_branch(Symbol j, double x) const {
  if (j >= degree_) throw std::out_of_range("symbol outside alphabet");
  const double lo = partition_.endpoints[j];
  const double hi = j + 1 < degree_ ? partition_.endpoints[j + 1] : 1.0;
  return solve_lift(x + static_cast<double>(j), lo, hi);
}

}  // namespace captive

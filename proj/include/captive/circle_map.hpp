#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "captive/trig_poly.hpp"

namespace captive {

/// Raised when a map fails validation (not expanding, no fixed point at 0).
class InvalidMap : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an inverse-branch solve misses its residual tolerance.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using Symbol = unsigned;

/// Canonical representative of x in [0, 1).
double canonical(double x);

struct ExpansionBounds {
  double lambda;  ///< certified lower bound on E'
  double Lambda;  ///< certified upper bound on E'
};

/// Points 0 = alpha_0 < ... < alpha_{l-1} < 1 with F(alpha_j) = j, so that
/// E maps [alpha_j, alpha_{j+1}) onto the circle bijectively.
struct BranchPartition {
  std::vector<double> endpoints;

  std::size_t size() const { return endpoints.size(); }
  /// Symbol j with x in [alpha_j, alpha_{j+1}).
  Symbol branch_of(double x) const;
};

/// Expanding circle map of degree l given by the lift
///   F(x) = l x + p(x),   p a trigonometric polynomial,
/// normalized so that F(0) = 0. Immutable after construction.
class CircleMap {
public:
  static constexpr double kInverseTolerance = 1e-12;
  static constexpr int kInverseIterations = 100;

  /// Throws InvalidMap when degree < 2, F(0) is not an integer, or the
  /// certified lower expansion bound is <= 1.
  CircleMap(unsigned degree, TrigPoly perturbation);

  static CircleMap linear(unsigned degree) { return CircleMap(degree, TrigPoly()); }

  unsigned degree() const { return degree_; }
  const TrigPoly& perturbation() const { return perturbation_; }
  bool is_linear() const { return linear_; }

  double lift(double x) const;
  double eval(double x) const { return canonical(lift(canonical(x))); }
  double derivative(double x) const;
  double second_derivative(double x) const;

  ExpansionBounds expansion_bounds() const { return bounds_; }
  double lambda() const { return bounds_.lambda; }
  double Lambda() const { return bounds_.Lambda; }
  /// sup |F''|, closed form.
  double second_derivative_bound() const { return perturbation_.derivative_bound(2); }

  const BranchPartition& partition() const { return partition_; }

  /// Unique y in I(j) with F(y) = x + j. x must lie in [0, 1]; the closed
  /// right end is allowed so that periodic-point iterations can reach the
  /// boundary fixed point. Throws ConvergenceError.
  double inverse_branch(Symbol j, double x) const;

private:
  double solve_lift(double target, double lo, double hi) const;

  unsigned degree_;
  TrigPoly perturbation_;
  double shift_ = 0.0;
  bool linear_ = false;
  ExpansionBounds bounds_{};
  BranchPartition partition_;
};

/// Certified expansion bounds of a lift: grid extrema of F' corrected by
/// sup|F'''| h^2/8, intersected with the closed-form bounds l -/+ sup|p'|.
ExpansionBounds expansion_bounds(unsigned degree, const TrigPoly& perturbation,
                                 std::size_t grid = 1u << 14);

}  // namespace captive

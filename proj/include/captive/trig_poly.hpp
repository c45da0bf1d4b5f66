#pragma once

#include <cstddef>
#include <vector>

namespace captive {

/// Real trigonometric polynomial on the circle R/Z,
///   p(x) = c + sum_k ( a_k sin(2 pi k x) + b_k cos(2 pi k x) ),  k = 1..K.
/// x is measured in full turns.
class TrigPoly {
public:
  TrigPoly() = default;
  TrigPoly(double constant, std::vector<double> sin_coeffs,
           std::vector<double> cos_coeffs);

  static TrigPoly constant(double c) { return TrigPoly(c, {}, {}); }
  static TrigPoly sine(std::size_t k, double amplitude = 1.0);
  static TrigPoly cosine(std::size_t k, double amplitude = 1.0);

  double constant_term() const { return constant_; }
  const std::vector<double>& sin_coeffs() const { return sin_; }
  const std::vector<double>& cos_coeffs() const { return cos_; }
  std::size_t max_frequency() const { return sin_.size(); }

  /// order-th derivative at x (order 0 is the value).
  double eval(double x, int order = 0) const;
  double operator()(double x) const { return eval(x, 0); }
  double derivative(double x) const { return eval(x, 1); }

  /// Closed-form bound on sup |p^(order)|; exact when a single
  /// frequency is present (order >= 1).
  double derivative_bound(int order) const;

  /// Certified upper bound on sup |p^(order)| for order >= 1: the smaller
  /// of derivative_bound(order) and a grid maximum plus the second-order
  /// slack sup|p^(order+2)| h^2 / 8.
  double certified_sup(int order, std::size_t grid = 1u << 14) const;

  bool is_constant() const;

  TrigPoly& operator+=(const TrigPoly& other);
  TrigPoly& operator*=(double s);
  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator*(double s, TrigPoly p) { return p *= s; }

private:
  void normalize();

  double constant_ = 0.0;
  std::vector<double> sin_;
  std::vector<double> cos_;
};

}  // namespace captive

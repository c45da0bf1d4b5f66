#include "captive/trig_poly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace captive {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TrigPoly::TrigPoly(double constant, std::vector<double> sin_coeffs,
                   std::vector<double> cos_coeffs)
    : constant_(constant), sin_(std::move(sin_coeffs)), cos_(std::move(cos_coeffs)) {
  normalize();
}

TrigPoly TrigPoly::sine(std::size_t k, double amplitude) {
  std::vector<double> s(k, 0.0);
  s[k - 1] = amplitude;
  return TrigPoly(0.0, std::move(s), {});
}

TrigPoly TrigPoly::cosine(std::size_t k, double amplitude) {
  std::vector<double> c(k, 0.0);
  c[k - 1] = amplitude;
  return TrigPoly(0.0, {}, std::move(c));
}

void TrigPoly::normalize() {
  const std::size_t k = std::max(sin_.size(), cos_.size());
  sin_.resize(k, 0.0);
  cos_.resize(k, 0.0);
}

double TrigPoly::eval(double x, int order) const {
  double sum = order == 0 ? constant_ : 0.0;
  for (std::size_t i = 0; i < sin_.size(); ++i) {
    const double a = sin_[i];
    const double b = cos_[i];
    if (a == 0.0 && b == 0.0) continue;
    const double w = kTwoPi * static_cast<double>(i + 1);
    const double s = std::sin(w * x);
    const double c = std::cos(w * x);
    // d/dx rotates (sin, cos) -> (cos, -sin) and multiplies by w
    double term = 0.0;
    switch (order & 3) {
      case 0: term = a * s + b * c; break;
      case 1: term = a * c - b * s; break;
      case 2: term = -a * s - b * c; break;
      default: term = -a * c + b * s; break;
    }
    sum += std::pow(w, order) * term;
  }
  return sum;
}

double TrigPoly::derivative_bound(int order) const {
  if (order == 0) {
    double total = std::abs(constant_);
    for (std::size_t i = 0; i < sin_.size(); ++i)
      total += std::abs(sin_[i]) + std::abs(cos_[i]);
    return total;
  }
  std::size_t active = 0;
  double total = 0.0;
  double single = 0.0;
  for (std::size_t i = 0; i < sin_.size(); ++i) {
    if (sin_[i] == 0.0 && cos_[i] == 0.0) continue;
    ++active;
    const double scale = std::pow(kTwoPi * static_cast<double>(i + 1), order);
    total += scale * (std::abs(sin_[i]) + std::abs(cos_[i]));
    single = scale * std::hypot(sin_[i], cos_[i]);
  }
  return active == 1 ? single : total;
}

double TrigPoly::certified_sup(int order, std::size_t grid) const {
  const double closed_form = derivative_bound(order);
  if (closed_form == 0.0 || grid == 0) return closed_form;
  double grid_max = 0.0;
  const double h = 1.0 / static_cast<double>(grid);
  for (std::size_t i = 0; i < grid; ++i)
    grid_max = std::max(grid_max, std::abs(eval(static_cast<double>(i) * h, order)));
  // |p^(order)| peaks where p^(order+1) vanishes; the nearest grid point is
  // within h/2 of it.
  const double sampled = grid_max + derivative_bound(order + 2) * h * h / 8.0;
  return std::min(closed_form, sampled);
}

bool TrigPoly::is_constant() const {
  return std::all_of(sin_.begin(), sin_.end(), [](double v) { return v == 0.0; }) &&
         std::all_of(cos_.begin(), cos_.end(), [](double v) { return v == 0.0; });
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& other) {
  constant_ += other.constant_;
  const std::size_t k = std::max(sin_.size(), other.sin_.size());
  sin_.resize(k, 0.0);
  cos_.resize(k, 0.0);
  for (std::size_t i = 0; i < other.sin_.size(); ++i) {
    sin_[i] += other.sin_[i];
    cos_[i] += other.cos_[i];
  }
  return *this;
}

TrigPoly& TrigPoly::operator*=(double s) {
  constant_ *= s;
  for (auto& v : sin_) v *= s;
  for (auto& v : cos_) v *= s;
  return *this;
}

}  // namespace captive

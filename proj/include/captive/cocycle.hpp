#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "captive/circle_map.hpp"
#include "captive/trig_poly.hpp"

namespace captive {

/// Cone radius R not strictly above the certified sup |tau'|.
class InvalidConeRadius : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Roof function tau driving the fiber rotation. Either a trigonometric
/// polynomial, or such a polynomial plus an exact coboundary phi o E - phi
/// kept in composite form so that telescoping identities hold to rounding.
class RoofFunction {
public:
  explicit RoofFunction(TrigPoly poly = TrigPoly());

  /// tau = phi o E - phi + c (+ extra).
  static RoofFunction coboundary(TrigPoly phi, double c, const CircleMap& map,
                                 TrigPoly extra = TrigPoly());

  double operator()(double x) const;
  double derivative(double x) const;

  /// Certified upper bound on sup |tau'|.
  double sup_deriv() const { return sup_deriv_; }

  const TrigPoly& poly() const { return poly_; }
  bool has_coboundary_part() const { return cob_.has_value(); }
  /// phi of the coboundary part; empty polynomial when absent.
  const TrigPoly& transfer_function() const;

  /// Same roof with `delta` added to the polynomial part (re-certified).
  RoofFunction plus(const TrigPoly& delta) const;

private:
  struct CoboundaryPart {
    TrigPoly phi;
    std::shared_ptr<const CircleMap> map;
  };

  RoofFunction(TrigPoly poly, std::optional<CoboundaryPart> cob);
  void certify();

  TrigPoly poly_;
  std::optional<CoboundaryPart> cob_;
  double sup_deriv_ = 0.0;
};

struct Theta {
  double theta_tau;  ///< ||tau'|| / (lambda - 1)
  double theta_R;    ///< R / (lambda - 1)
};

/// Cone apertures. Throws InvalidConeRadius when R <= sup_deriv and
/// std::invalid_argument when lambda <= 1.
Theta theta(double sup_deriv, double lambda, double R);
inline Theta theta(const RoofFunction& tau, double lambda, double R) {
  return theta(tau.sup_deriv(), lambda, R);
}

inline RoofFunction coboundary_from(const TrigPoly& phi, double c, const CircleMap& map) {
  return RoofFunction::coboundary(phi, c, map);
}

/// tau_t = tau + sum_i t_i phi_i.
struct PerturbationFamily {
  RoofFunction base;
  std::vector<TrigPoly> basis;

  std::size_t size() const { return basis.size(); }

  /// Bound on sup |tau_t'| valid for every t in [-1, 1]^m.
  double uniform_derivative_bound() const;
};

/// Basis {s sin 2 pi k x, s cos 2 pi k x : 1 <= k <= modes}, m = 2 modes.
PerturbationFamily fourier_family(RoofFunction base, std::size_t modes = 4,
                                  double scale = 1.0);

RoofFunction apply_params(const PerturbationFamily& family,
                          const Eigen::Ref<const Eigen::VectorXd>& t);

}  // namespace captive

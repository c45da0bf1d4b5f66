#include "captive/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace captive {

namespace {
constexpr std::size_t kCertifyGrid = 1u << 14;
}

RoofFunction::RoofFunction(TrigPoly poly) : poly_(std::move(poly)) { certify(); }

RoofFunction::RoofFunction(TrigPoly poly, std::optional<CoboundaryPart> cob)
    : poly_(std::move(poly)), cob_(std::move(cob)) {
  certify();
}

RoofFunction RoofFunction::coboundary(TrigPoly phi, double c, const CircleMap& map,
                                      TrigPoly extra) {
  extra += TrigPoly::constant(c);
  return RoofFunction(std::move(extra),
                      CoboundaryPart{std::move(phi), std::make_shared<const CircleMap>(map)});
}

double RoofFunction::operator()(double x) const {
  double v = poly_.eval(x);
  if (cob_) v += cob_->phi.eval(cob_->map->lift(x)) - cob_->phi.eval(x);
  return v;
}

double RoofFunction::derivative(double x) const {
  double v = poly_.eval(x, 1);
  if (cob_)
    v += cob_->map->derivative(x) * cob_->phi.eval(cob_->map->lift(x), 1) -
         cob_->phi.eval(x, 1);
  return v;
}

const TrigPoly& RoofFunction::transfer_function() const {
  static const TrigPoly empty;
  return cob_ ? cob_->phi : empty;
}

RoofFunction RoofFunction::plus(const TrigPoly& delta) const {
  return RoofFunction(poly_ + delta, cob_);
}

void RoofFunction::certify() {
  if (!cob_) {
    sup_deriv_ = poly_.certified_sup(1, kCertifyGrid);
    return;
  }
  const TrigPoly& phi = cob_->phi;
  const CircleMap& map = *cob_->map;
  const double Lam = map.Lambda();
  const double f2 = map.perturbation().derivative_bound(2);
  const double f3 = map.perturbation().derivative_bound(3);
  const double p1 = phi.derivative_bound(1);
  const double p2 = phi.derivative_bound(2);
  const double p3 = phi.derivative_bound(3);

  const double closed = poly_.derivative_bound(1) + (Lam + 1.0) * p1;
  // tau''' = poly''' + F''' phi'(F) + 3 F'' F' phi''(F) + F'^3 phi'''(F) - phi'''
  const double third = poly_.derivative_bound(3) + f3 * p1 + 3.0 * f2 * Lam * p2 +
                       (Lam * Lam * Lam + 1.0) * p3;
  double grid_max = 0.0;
  const double h = 1.0 / static_cast<double>(kCertifyGrid);
  for (std::size_t i = 0; i < kCertifyGrid; ++i)
    grid_max = std::max(grid_max, std::abs(derivative(static_cast<double>(i) * h)));
  sup_deriv_ = std::min(closed, grid_max + third * h * h / 8.0);
}

Theta theta(double sup_deriv, double lambda, double R) {
  if (!(lambda > 1.0)) throw std::invalid_argument("lambda must exceed 1");
  if (!(R > sup_deriv)) {
    std::ostringstream os;
    os << "cone radius R = " << R << " must exceed sup|tau'| <= " << sup_deriv;
    throw InvalidConeRadius(os.str());
  }
  return {sup_deriv / (lambda - 1.0), R / (lambda - 1.0)};
}

double PerturbationFamily::uniform_derivative_bound() const {
  double total = base.sup_deriv();
  for (const auto& phi : basis) total += phi.certified_sup(1, kCertifyGrid);
  return total;
}

PerturbationFamily fourier_family(RoofFunction base, std::size_t modes, double scale) {
  PerturbationFamily family{std::move(base), {}};
  for (std::size_t k = 1; k <= modes; ++k) {
    family.basis.push_back(TrigPoly::sine(k, scale));
    family.basis.push_back(TrigPoly::cosine(k, scale));
  }
  return family;
}

RoofFunction apply_params(const PerturbationFamily& family,
                          const Eigen::Ref<const Eigen::VectorXd>& t) {
  if (static_cast<std::size_t>(t.size()) != family.basis.size())
    throw std::invalid_argument("parameter vector size does not match the basis");
  TrigPoly delta;
  for (std::size_t i = 0; i < family.basis.size(); ++i)
    delta += t(static_cast<Eigen::Index>(i)) * family.basis[i];
  return family.base.plus(delta);
}

}  // namespace captive

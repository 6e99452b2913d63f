#pragma once

#include <cmath>
#include <string>

#include "hslimit/error.hpp"

namespace hslimit {

namespace detail {

/// x^n by repeated squaring.
inline double ipow(double x, unsigned n) noexcept {
  double r = 1.0;
  while (n) {
    if (n & 1u)
      r *= x;
    x *= x;
    n >>= 1u;
  }
  return r;
}

} // namespace detail

/// Constitutive law linking density to pressure.
///
/// power:    P(r) = m/(m-1) r^{m-1},   Q(r) = r^m
/// singular: P(r) = eps r/(1-r),       Q(r) = eps (r/(1-r) + ln(1-r))
///
/// Q is the flux potential of the diffusion, Q'(r) = r P'(r), so that
/// div(r grad P(r)) = lap Q(r).
class PressureLaw {
public:
  enum class Kind { power, singular };

  static PressureLaw power(double m) {
    if (!(m > 1.0) || !std::isfinite(m))
      throw DomainError("power law exponent must satisfy m > 1");
    return PressureLaw(Kind::power, m);
  }
  static PressureLaw singular(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
      throw DomainError("singular law needs epsilon > 0");
    return PressureLaw(Kind::singular, epsilon);
  }

  Kind kind() const noexcept { return kind_; }
  bool is_power() const noexcept { return kind_ == Kind::power; }
  /// m for the power law, epsilon for the singular law.
  double parameter() const noexcept { return param_; }

  void check_domain(double rho) const {
    if (!(rho >= 0.0))
      throw DomainError("pressure law evaluated at negative density");
    if (kind_ == Kind::singular && !(rho < 1.0))
      throw DomainError("singular pressure is undefined for density >= 1 (got " +
                        std::to_string(rho) + ")");
  }

  double pressure(double rho) const {
    check_domain(rho);
    return pressure_unchecked(rho);
  }
  double flux_potential(double rho) const {
    check_domain(rho);
    return flux_potential_unchecked(rho);
  }
  double flux_potential_derivative(double rho) const {
    check_domain(rho);
    return flux_potential_derivative_unchecked(rho);
  }
  /// Internal energy density e with e(0) = 0 and e'(r) = P(r).
  double internal_energy(double rho) const {
    check_domain(rho);
    if (kind_ == Kind::power)
      return power_of(rho, param_) / (param_ - 1.0);
    return -param_ * (rho + std::log1p(-rho));
  }

  double pressure_unchecked(double rho) const noexcept {
    if (kind_ == Kind::power)
      return param_ / (param_ - 1.0) * power_of(rho, param_ - 1.0);
    return param_ * rho / (1.0 - rho);
  }
  double flux_potential_unchecked(double rho) const noexcept {
    if (kind_ == Kind::power)
      return power_of(rho, param_);
    return param_ * (rho / (1.0 - rho) + std::log1p(-rho));
  }
  double flux_potential_derivative_unchecked(double rho) const noexcept {
    if (kind_ == Kind::power)
      return param_ * power_of(rho, param_ - 1.0);
    const double gap = 1.0 - rho;
    return param_ * rho / (gap * gap);
  }

  bool operator==(const PressureLaw &) const = default;

private:
  PressureLaw(Kind k, double p) : kind_(k), param_(p) {}

  static double power_of(double x, double e) noexcept {
    if (x <= 0.0)
      return 0.0;
    // Integer exponents show up in every sweep (m and 2m-1); squaring is much
    // cheaper than pow inside the time loop.
    if (e == std::floor(e) && e < 4096.0)
      return detail::ipow(x, static_cast<unsigned>(e));
    return std::pow(x, e);
  }

  Kind kind_;
  double param_;
};

/// H(r) = r/(1-r) + ln(1-r), the singular-law diffusion potential over eps.
inline double congestion_potential(double rho) {
  return PressureLaw::singular(1.0).flux_potential(rho);
}

} // namespace hslimit

#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "hslimit/error.hpp"
#include "hslimit/parse.hpp"

namespace hslimit {

/// Radially symmetric confining potential V(x) = v(|x|).
///
/// zero:      V = 0
/// quadratic: V = (a/2)|x|^2            (alpha = A = a)
/// flat:      V = (a/2)(|x| - r0)_+^2   (alpha = 0, A = a); a flat-bottom well
///            used for configurations outside the strictly convex regime.
class Confinement {
public:
  enum class Kind { zero, quadratic, flat };

  static Confinement zero() { return Confinement(Kind::zero, 0.0, 0.0); }
  static Confinement quadratic(double a) {
    if (!(a > 0.0))
      throw DomainError("quadratic confinement needs a > 0");
    return Confinement(Kind::quadratic, a, 0.0);
  }
  static Confinement flat(double a, double r0) {
    if (!(a > 0.0) || !(r0 >= 0.0))
      throw DomainError("flat confinement needs a > 0, r0 >= 0");
    return Confinement(Kind::flat, a, r0);
  }

  Kind kind() const noexcept { return kind_; }
  double stiffness() const noexcept { return a_; }
  double flat_radius() const noexcept { return r0_; }

  double value(double x) const noexcept {
    const double r = std::abs(x);
    switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::quadratic: return 0.5 * a_ * r * r;
    case Kind::flat: {
      const double s = std::max(0.0, r - r0_);
      return 0.5 * a_ * s * s;
    }
    }
    return 0.0;
  }
  /// dV/dx on the line; radial derivative v'(r) for r >= 0.
  double gradient(double x) const noexcept {
    switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::quadratic: return a_ * x;
    case Kind::flat: {
      const double r = std::abs(x);
      if (r <= r0_)
        return 0.0;
      return std::copysign(a_ * (r - r0_), x);
    }
    }
    return 0.0;
  }
  /// Smallest radius with v(r) = level (level >= 0).
  double radius_at_level(double level) const {
    if (kind_ == Kind::zero)
      throw DomainError("zero potential has no level sets");
    const double s = std::sqrt(2.0 * std::max(0.0, level) / a_);
    return kind_ == Kind::flat ? r0_ + s : s;
  }

  /// Certified Hessian bounds alpha <= D^2 V <= A.
  double hessian_lower() const noexcept { return kind_ == Kind::quadratic ? a_ : 0.0; }
  double hessian_upper() const noexcept { return kind_ == Kind::zero ? 0.0 : a_; }

  bool operator==(const Confinement &) const = default;
  std::string describe() const;

private:
  Confinement(Kind k, double a, double r0) : kind_(k), a_(a), r0_(r0) {}
  Kind kind_;
  double a_;
  double r0_;
};

/// Even interaction kernel W; quadratic W = (b/2)|x|^2 has beta = B = b.
class Interaction {
public:
  enum class Kind { zero, quadratic };

  static Interaction zero() { return Interaction(Kind::zero, 0.0); }
  static Interaction quadratic(double b) { return Interaction(Kind::quadratic, b); }

  Kind kind() const noexcept { return kind_; }
  bool is_zero() const noexcept { return kind_ == Kind::zero || b_ == 0.0; }
  double stiffness() const noexcept { return b_; }
  bool is_even() const noexcept { return true; }

  double value(double z) const noexcept { return 0.5 * b_ * z * z; }
  double gradient(double z) const noexcept { return b_ * z; }

  double hessian_lower() const noexcept { return b_; }
  double hessian_upper() const noexcept { return b_; }

  bool operator==(const Interaction &) const = default;
  std::string describe() const;

private:
  Interaction(Kind k, double b) : kind_(k), b_(k == Kind::zero ? 0.0 : b) {}
  Kind kind_;
  double b_;
};

struct PotentialSpec {
  Confinement confinement = Confinement::zero();
  Interaction interaction = Interaction::zero();

  double alpha() const noexcept { return confinement.hessian_lower(); }
  double alpha_upper() const noexcept { return confinement.hessian_upper(); }
  double beta() const noexcept { return interaction.hessian_lower(); }
  double beta_upper() const noexcept { return interaction.hessian_upper(); }

  bool operator==(const PotentialSpec &) const = default;
};

/// W2 contraction constant gamma of the joint drift.
inline double contraction_constant(const PotentialSpec &p) {
  if (p.confinement.kind() == Confinement::Kind::zero)
    return p.beta();
  if (p.beta() <= 0.0)
    return p.alpha() + p.beta();
  return p.alpha();
}

namespace detail {
inline std::string format_number(double x) {
  std::string s = std::to_string(x);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.')
    s.pop_back();
  return s;
}
} // namespace detail

inline std::string Confinement::describe() const {
  switch (kind_) {
  case Kind::zero: return "zero";
  case Kind::quadratic: return "quadratic:" + detail::format_number(a_);
  case Kind::flat:
    return "flat:" + detail::format_number(a_) + ":" + detail::format_number(r0_);
  }
  return "zero";
}

inline std::string Interaction::describe() const {
  if (is_zero())
    return "zero";
  return "quadratic:" + detail::format_number(b_);
}

/// Parses `zero`, `quadratic:<a>` or `flat:<a>:<r0>`.
inline Confinement parse_confinement(const std::string &text) {
  try {
    if (text == "zero" || text == "0")
      return Confinement::zero();
    if (text.rfind("quadratic:", 0) == 0)
      return Confinement::quadratic(parse_real(text.substr(10)));
    if (text.rfind("flat:", 0) == 0) {
      const auto rest = text.substr(5);
      const auto colon = rest.find(':');
      if (colon == std::string::npos)
        throw ConfigError("flat potential needs flat:<a>:<r0>");
      return Confinement::flat(parse_real(rest.substr(0, colon)),
                               parse_real(rest.substr(colon + 1)));
    }
  } catch (const DomainError &e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unrecognized potential '" + text + "'");
}

/// Parses `zero` or `quadratic:<b>`.
inline Interaction parse_interaction(const std::string &text) {
  if (text == "zero" || text == "0")
    return Interaction::zero();
  if (text.rfind("quadratic:", 0) == 0)
    return Interaction::quadratic(parse_real(text.substr(10)));
  throw ConfigError("unrecognized interaction kernel '" + text + "'");
}

} // namespace hslimit

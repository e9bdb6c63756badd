#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "rdsym/geometry.hpp"

namespace rdsym {

/// Bounded time signal c0 + c1*sin(omega*t + phase); constant when c1 = 0.
struct TimeCoefficient {
  double c0 = 0.0;
  double c1 = 0.0;
  double omega = 0.0;
  double phase = 0.0;

  static TimeCoefficient constant(double c) { return {c, 0.0, 0.0, 0.0}; }

  double operator()(double t) const { return c0 + c1 * std::sin(omega * t + phase); }
  double lower() const { return c0 - std::abs(c1); }
  double upper() const { return c0 + std::abs(c1); }
  double sup_abs() const { return std::max(std::abs(lower()), std::abs(upper())); }
  bool is_constant() const { return c1 == 0.0; }
  bool operator==(const TimeCoefficient&) const = default;
};

/// Smooth radial envelope 1 + amp*cos(freq*pi*rho), rho the normalized
/// radial coordinate (r - A1)/(A2 - A1).
struct RadialModulation {
  double amp = 0.0;
  double freq = 1.0;

  double operator()(double rho) const {
    return 1.0 + amp * std::cos(freq * std::numbers::pi * rho);
  }
  double lower() const { return 1.0 - std::abs(amp); }
  double upper() const { return 1.0 + std::abs(amp); }
  bool operator==(const RadialModulation&) const = default;
};

/// Radius- and time-dependent coefficient g(r) * h(t).
struct SpaceTimeCoefficient {
  TimeCoefficient time_part;
  RadialModulation radial;
  bool modulated = false;

  static SpaceTimeCoefficient constant(double c) {
    return {TimeCoefficient::constant(c), {}, false};
  }

  double value(double rho_norm, double t) const {
    const double h = time_part(t);
    return modulated ? radial(rho_norm) * h : h;
  }

  /// Conservative interval bounds over all r and t.
  double lower() const {
    if (!modulated) return time_part.lower();
    const double a = radial.lower() * time_part.lower();
    const double b = radial.lower() * time_part.upper();
    const double c = radial.upper() * time_part.lower();
    const double d = radial.upper() * time_part.upper();
    return std::min(std::min(a, b), std::min(c, d));
  }
  double upper() const {
    if (!modulated) return time_part.upper();
    const double a = radial.lower() * time_part.lower();
    const double b = radial.lower() * time_part.upper();
    const double c = radial.upper() * time_part.lower();
    const double d = radial.upper() * time_part.upper();
    return std::max(std::max(a, b), std::max(c, d));
  }
  double sup_abs() const { return std::max(std::abs(lower()), std::abs(upper())); }
  bool operator==(const SpaceTimeCoefficient&) const = default;
};

/// Per-species rates a_i, b_i and couplings alpha_i of the competitive
/// system.  In competitive mode the alpha_i must stay above a positive
/// floor; general mode admits sign-free couplings.
struct CoefficientSet {
  std::array<TimeCoefficient, 2> a{};
  std::array<TimeCoefficient, 2> b{};
  std::array<SpaceTimeCoefficient, 2> alpha{};
  bool competitive = true;
  DomainSpec domain;

  double rho_norm(double r) const {
    return (r - domain.inner_radius) / (domain.outer_radius - domain.inner_radius);
  }

  double alpha_value(int i, double r, double t) const {
    return alpha[i].value(rho_norm(r), t);
  }

  double alpha_floor() const { return std::min(alpha[0].lower(), alpha[1].lower()); }
  double alpha_cap() const { return std::max(alpha[0].upper(), alpha[1].upper()); }

  void validate() const {
    if (competitive && !(alpha_floor() > 0.0))
      throw std::invalid_argument(
          "CoefficientSet: competitive mode requires inf alpha_i > 0 over the horizon");
  }
};

/// Reaction nonlinearity hook f_i(t, r, v) with its partial dv f_i.
/// The built-in logistic kind is f = a(t) v - b(t) v^2.
struct NonlinearitySpec {
  std::function<double(double t, double r, double v)> f;
  std::function<double(double t, double r, double v)> dv;
  bool logistic = false;
  TimeCoefficient a{};
  TimeCoefficient b{};

  static NonlinearitySpec make_logistic(TimeCoefficient a, TimeCoefficient b) {
    NonlinearitySpec n;
    n.logistic = true;
    n.a = a;
    n.b = b;
    n.f = [a, b](double t, double /*r*/, double v) { return a(t) * v - b(t) * v * v; };
    n.dv = [a, b](double t, double /*r*/, double v) { return a(t) - 2.0 * b(t) * v; };
    return n;
  }

  /// |dv f| bound on [0, vmax], exact for the logistic kind.
  double dv_bound(double vmax) const {
    if (logistic) return a.sup_abs() + 2.0 * b.sup_abs() * vmax;
    // Custom hooks: sample 0 and vmax, the dominant regime for concave kinds.
    double m = 0.0;
    for (double v : {0.0, 0.5 * vmax, vmax})
      for (double t : {0.0, 1.0, 2.5})
        m = std::max(m, std::abs(dv(t, 0.0, v)));
    return m;
  }
};

inline std::array<NonlinearitySpec, 2> make_logistic_pair(const CoefficientSet& c) {
  return {NonlinearitySpec::make_logistic(c.a[0], c.b[0]),
          NonlinearitySpec::make_logistic(c.a[1], c.b[1])};
}

}  // namespace rdsym

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace dlam {

using Rational = boost::rational<std::int64_t>;

/// Accepts "3", "3/2", "1.25" and "-0.5".
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& r);
double to_double(const Rational& r);

/// Fixed-precision rendering used in reports.
std::string format_real(double x);

/// A length measured in a tree: exact for the finite models, a Cauchy-stopped
/// estimate with an error term for limit trees.
struct Length {
  Rational exact{0};
  double value = 0.0;
  double error = 0.0;
  bool is_exact = true;
  bool converged = true;

  static Length of(Rational r) { return Length{r, to_double(r), 0.0, true, true}; }
  static Length estimate(double v, double err, bool conv) { return Length{Rational(0), v, err, false, conv}; }

  bool is_zero() const { return is_exact ? exact == Rational(0) : value == 0.0; }
  std::string to_string() const;
};

Length operator+(const Length& a, const Length& b);
Length operator*(std::int64_t k, const Length& a);

/// Threshold such as ε, exact when it was given as a rational.
struct Threshold {
  std::optional<Rational> exact;
  double value = 0.0;

  static Threshold of(Rational r) { return Threshold{r, to_double(r)}; }
  static Threshold of(double v) { return Threshold{std::nullopt, v}; }
  /// Rational syntax when possible, otherwise a floating literal.
  static Threshold parse(std::string_view text);
  std::string to_string() const;
};

/// length < threshold; estimates count as below only when value + error is.
bool strictly_below(const Length& length, const Threshold& threshold);

/// a <= b (+ slack for estimates).
bool at_most(const Length& a, const Length& b, double slack = 0.0);

}  // namespace dlam

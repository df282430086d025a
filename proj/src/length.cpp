#include "dlam/length.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dlam/word.hpp"

namespace dlam {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  if (s.empty()) throw FormatError("empty number");
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      std::size_t used = 0;
      const auto num = std::stoll(s.substr(0, slash), &used);
      if (used != slash) throw FormatError("bad rational '" + s + "'");
      const std::string den_text = s.substr(slash + 1);
      const auto den = std::stoll(den_text, &used);
      if (used != den_text.size() || den == 0) throw FormatError("bad rational '" + s + "'");
      return Rational(num, den);
    }
    bool negative = false;
    std::size_t i = 0;
    if (s[0] == '-' || s[0] == '+') {
      negative = s[0] == '-';
      i = 1;
    }
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool seen_dot = false;
    bool any_digit = false;
    for (; i < s.size(); ++i) {
      if (s[i] == '.' && !seen_dot) {
        seen_dot = true;
        continue;
      }
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) throw FormatError("bad number '" + s + "'");
      any_digit = true;
      num = num * 10 + (s[i] - '0');
      if (seen_dot) den *= 10;
      if (num > (std::int64_t{1} << 50) || den > (std::int64_t{1} << 50)) {
        throw FormatError("number '" + s + "' has too many digits for an exact value");
      }
    }
    if (!any_digit) throw FormatError("bad number '" + s + "'");
    return Rational(negative ? -num : num, den);
  } catch (const std::logic_error&) {
    throw FormatError("bad number '" + s + "'");
  }
}

std::string format_rational(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::string format_real(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string Length::to_string() const {
  if (is_exact) return format_rational(exact);
  return format_real(value) + " ± " + format_real(error) + (converged ? "" : " (unconverged)");
}

Length operator+(const Length& a, const Length& b) {
  if (a.is_exact && b.is_exact) return Length::of(a.exact + b.exact);
  return Length::estimate(a.value + b.value, a.error + b.error, a.converged && b.converged);
}

Length operator*(std::int64_t k, const Length& a) {
  if (a.is_exact) return Length::of(a.exact * k);
  return Length::estimate(static_cast<double>(k) * a.value, std::abs(static_cast<double>(k)) * a.error, a.converged);
}

Threshold Threshold::parse(std::string_view text) {
  try {
    return of(parse_rational(text));
  } catch (const FormatError&) {
    try {
      return of(std::stod(std::string(text)));
    } catch (const std::logic_error&) {
      throw FormatError("bad threshold '" + std::string(text) + "'");
    }
  }
}

std::string Threshold::to_string() const { return exact ? format_rational(*exact) : format_real(value); }

bool strictly_below(const Length& length, const Threshold& threshold) {
  if (length.is_exact) {
    if (threshold.exact) return length.exact < *threshold.exact;
    return to_double(length.exact) < threshold.value;
  }
  return length.value + length.error < threshold.value;
}

bool at_most(const Length& a, const Length& b, double slack) {
  if (a.is_exact && b.is_exact) return a.exact <= b.exact;
  return a.value <= b.value + a.error + b.error + slack;
}

}  // namespace dlam

// Weight arithmetic shared by the graph algorithms: plain doubles with a
// comparison slack, or exact rationals.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace penkey {

using Rational = boost::multiprecision::cpp_rational;

namespace detail {

template <class W>
struct WeightTraits;

template <>
struct WeightTraits<double> {
  static constexpr double kSlack = 1e-9;
  static double to_double(double w) { return w; }
  static bool less(double a, double b) { return a < b - kSlack; }
  static bool same(double a, double b) { return std::abs(a - b) <= kSlack; }
  static bool positive(double a) { return a > kSlack; }
};

template <>
struct WeightTraits<Rational> {
  static double to_double(const Rational& w) { return w.convert_to<double>(); }
  static bool less(const Rational& a, const Rational& b) { return a < b; }
  static bool same(const Rational& a, const Rational& b) { return a == b; }
  static bool positive(const Rational& a) { return a > 0; }
};

inline std::string rational_string(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

/// The rational p/q with q <= max_denominator whose double conversion is
/// exactly x, found among the continued-fraction convergents of x.
inline std::optional<Rational> exact_rational(double x,
                                              long long max_denominator = 1000000) {
  if (!std::isfinite(x)) return std::nullopt;
  using boost::multiprecision::cpp_int;
  const bool negative = x < 0.0;
  double rest = std::abs(x);
  cpp_int p_prev = 1, p = static_cast<long long>(std::floor(rest));
  cpp_int q_prev = 0, q = 1;
  double frac = rest - std::floor(rest);
  for (int iter = 0; iter < 64; ++iter) {
    const double approx = p.convert_to<double>() / q.convert_to<double>();
    if (approx == std::abs(x)) {
      Rational r(p, q);
      return negative ? Rational(-r) : r;
    }
    if (frac == 0.0) break;
    const double inv = 1.0 / frac;
    const double a = std::floor(inv);
    frac = inv - a;
    const cpp_int ai = static_cast<long long>(a);
    cpp_int p_next = ai * p + p_prev;
    cpp_int q_next = ai * q + q_prev;
    if (q_next > max_denominator) break;
    p_prev = p;
    p = p_next;
    q_prev = q;
    q = q_next;
  }
  return std::nullopt;
}

/// All values representable by exact_rational, or nothing.
inline std::optional<std::vector<Rational>> exact_rationals(const std::vector<double>& xs) {
  std::vector<Rational> out;
  out.reserve(xs.size());
  for (double x : xs) {
    auto r = exact_rational(x);
    if (!r) return std::nullopt;
    out.push_back(*r);
  }
  return out;
}

}  // namespace detail
}  // namespace penkey

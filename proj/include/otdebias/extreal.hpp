#pragma once

// Extended-real arithmetic helpers. Costs live in (-inf, +inf]; the value
// -inf is never representable, and the debiasing rule inf - inf = +inf is
// applied explicitly before any IEEE subtraction could produce a NaN.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace otd {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

inline bool is_finite(double x) { return std::isfinite(x); }

// Validates an extended-real value: finite or +inf, never -inf or NaN.
inline void check_extreal(double x, const char* what) {
  if (std::isnan(x)) throw std::invalid_argument(std::string(what) + ": NaN entry");
  if (x == -kInf) throw std::invalid_argument(std::string(what) + ": -inf entry");
}

// a + b over (-inf, +inf]; IEEE already does the right thing because -inf
// never appears, so inf + x = inf and inf + inf = inf.
inline double add_ext(double a, double b) { return a + b; }

// Stabilized log(sum_i exp(a_i)) over extended reals where entries may be
// -inf (vacuous terms). Returns -inf for an empty or all--inf input.
inline double logsumexp(std::span<const double> a) {
  double m = -kInf;
  for (double v : a)
    if (v > m) m = v;
  if (m == -kInf) return -kInf;
  if (m == kInf) return kInf;
  double s = 0.0;
  for (double v : a) s += std::exp(v - m);
  return m + std::log(s);
}

inline double logsumexp(const std::vector<double>& a) {
  return logsumexp(std::span<const double>(a.data(), a.size()));
}

}  // namespace otd

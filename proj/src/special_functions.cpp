#include "rsa/special_functions.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "rsa/error.hpp"

namespace rsa::stats {

namespace {

constexpr double kTolerance = 1e-14;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 10000;

// Continued fraction for I_x(a, b), evaluated with the modified Lentz method.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kTolerance) return h;
  }
  throw ValidationError(fmt::format("incomplete beta did not converge (a={}, b={}, x={})", a, b, x));
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

double incomplete_beta(double a, double b, double x, double complement) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (complement == 0.0) return 1.0;
  const double log_x = x < 0.5 ? std::log(x) : std::log1p(-complement);
  const double log_y = complement < 0.5 ? std::log(complement) : std::log1p(-x);
  const double front = std::exp(a * log_x + b * log_y - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, complement) / b;
}

double incomplete_beta(double a, double b, double x) {
  return incomplete_beta(a, b, x, 1.0 - x);
}

double student_t_sf(double t, double df) {
  if (!(df > 0.0)) throw ValidationError("degrees of freedom must be positive");
  if (std::isnan(t)) throw ValidationError("t statistic is NaN");
  if (std::isinf(t)) return t > 0.0 ? 0.0 : 1.0;
  if (t == 0.0) return 0.5;
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  const double half_tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x, y);
  return t > 0.0 ? half_tail : 1.0 - half_tail;
}

double student_t_two_sided(double t, double df) {
  const double p = 2.0 * student_t_sf(std::fabs(t), df);
  return p > 1.0 ? 1.0 : p;
}

double f_sf(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw ValidationError("degrees of freedom must be positive");
  if (std::isnan(f)) throw ValidationError("F statistic is NaN");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double denom = d2 + d1 * f;
  return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / denom, d1 * f / denom);
}

}  // namespace rsa::stats

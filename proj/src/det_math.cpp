#include "bench/det_math.hpp"

#include <cmath>
#include <limits>

namespace bench::detmath {

namespace {

// ln2 split for exact range reduction
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kInvLn2 = 1.44269504088896338700e+00;

}  // namespace

double det_exp(double x) {
  if (std::isnan(x)) return x;
  if (x > 709.0) return std::numeric_limits<double>::infinity();
  if (x < -745.0) return 0.0;

  // x = k*ln2 + r with |r| <= ln2/2
  double kd = x * kInvLn2;
  int k = static_cast<int>(kd >= 0 ? kd + 0.5 : kd - 0.5);
  double r = (x - k * kLn2Hi) - k * kLn2Lo;

  // Taylor series in fixed Horner order; |r| <= 0.347 so 13 terms are ample.
  double p = 1.0 / 6227020800.0;          // 1/13!
  p = p * r + 1.0 / 479001600.0;          // 1/12!
  p = p * r + 1.0 / 39916800.0;           // 1/11!
  p = p * r + 1.0 / 3628800.0;            // 1/10!
  p = p * r + 1.0 / 362880.0;             // 1/9!
  p = p * r + 1.0 / 40320.0;              // 1/8!
  p = p * r + 1.0 / 5040.0;               // 1/7!
  p = p * r + 1.0 / 720.0;                // 1/6!
  p = p * r + 1.0 / 120.0;                // 1/5!
  p = p * r + 1.0 / 24.0;                 // 1/4!
  p = p * r + 1.0 / 6.0;                  // 1/3!
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  return std::ldexp(p, k);
}

double sigmoid(double x) {
  if (x >= 40.0) return 1.0;
  if (x <= -40.0) return 0.0;
  if (x >= 0) {
    double e = det_exp(-x);
    return 1.0 / (1.0 + e);
  }
  double e = det_exp(x);
  return e / (1.0 + e);
}

}  // namespace bench::detmath

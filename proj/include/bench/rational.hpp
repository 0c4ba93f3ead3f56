#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bench::rational {

// Normalized rational: den > 0, gcd(num, den) = 1.
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;

  bool operator==(const Rat&) const = default;
};

enum class LiteralKind { number, percent, fraction, expression };

struct Value {
  bool exact = true;  // false once any step overflowed int64
  Rat rat;            // meaningful only when exact
  double approx = 0;  // always maintained
  LiteralKind kind = LiteralKind::number;
};

// Parses and evaluates arithmetic over rationals: + - * / ^ (integer
// exponent), parentheses, postfix %, unary sign, decimal and scientific
// literals, and the unicode forms of the operators. Returns nullopt when the
// text leaves the grammar or the evaluation is undefined (division by zero,
// fractional exponent).
std::optional<Value> evaluate(std::string_view text);

// Exact comparison when both sides stayed exact; otherwise relative tolerance
// 1e-6 with absolute floor 1e-9 near zero.
bool equivalent(const Value& a, const Value& b);

}  // namespace bench::rational

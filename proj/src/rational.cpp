#include "bench/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <vector>

namespace bench::rational {

namespace {

std::int64_t igcd(std::int64_t a, std::int64_t b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool normalize(Rat& r) {
  if (r.den == 0) return false;
  if (r.den < 0) {
    if (r.num == INT64_MIN || r.den == INT64_MIN) return false;
    r.num = -r.num;
    r.den = -r.den;
  }
  std::int64_t g = igcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return true;
}

struct Num {
  Value v;

  static Num from_rat(std::int64_t n, std::int64_t d) {
    Num out;
    out.v.rat = {n, d};
    out.v.exact = normalize(out.v.rat);
    out.v.approx = static_cast<double>(n) / static_cast<double>(d);
    return out;
  }
};

bool add_rat(Rat a, Rat b, Rat& out) {
  std::int64_t n1, n2, n, d;
  if (__builtin_mul_overflow(a.num, b.den, &n1)) return false;
  if (__builtin_mul_overflow(b.num, a.den, &n2)) return false;
  if (__builtin_add_overflow(n1, n2, &n)) return false;
  if (__builtin_mul_overflow(a.den, b.den, &d)) return false;
  out = {n, d};
  return normalize(out);
}

bool mul_rat(Rat a, Rat b, Rat& out) {
  // cross-reduce first to dodge avoidable overflow
  std::int64_t g1 = igcd(a.num, b.den), g2 = igcd(b.num, a.den);
  if (g1 > 1) { a.num /= g1; b.den /= g1; }
  if (g2 > 1) { b.num /= g2; a.den /= g2; }
  std::int64_t n, d;
  if (__builtin_mul_overflow(a.num, b.num, &n)) return false;
  if (__builtin_mul_overflow(a.den, b.den, &d)) return false;
  out = {n, d};
  return normalize(out);
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  std::optional<Value> run() {
    skip_ws();
    auto v = parse_expr();
    if (!v) return std::nullopt;
    skip_ws();
    if (pos_ != s_.size()) return std::nullopt;  // trailing junk leaves the grammar
    return v->v;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;
  int terms_ = 0;  // counts operator applications to classify literal vs expression

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  // Multi-byte operator forms: × ÷ −
  bool eat_utf8(std::string_view seq) {
    skip_ws();
    if (s_.substr(pos_, seq.size()) == seq) {
      pos_ += seq.size();
      return true;
    }
    return false;
  }

  std::optional<Num> parse_expr() {
    auto lhs = parse_term();
    if (!lhs) return std::nullopt;
    while (true) {
      int op = 0;
      if (eat('+')) op = 1;
      else if (eat('-') || eat_utf8("−")) op = -1;
      else break;
      auto rhs = parse_term();
      if (!rhs) return std::nullopt;
      ++terms_;
      Num out;
      out.v.approx = lhs->v.approx + op * rhs->v.approx;
      out.v.exact = lhs->v.exact && rhs->v.exact;
      if (out.v.exact) {
        Rat b = rhs->v.rat;
        if (op < 0) {
          if (b.num == INT64_MIN) out.v.exact = false;
          else b.num = -b.num;
        }
        if (out.v.exact) out.v.exact = add_rat(lhs->v.rat, b, out.v.rat);
      }
      lhs = out;
    }
    return lhs;
  }

  std::optional<Num> parse_term() {
    auto lhs = parse_power();
    if (!lhs) return std::nullopt;
    while (true) {
      int op = 0;
      if (eat('*') || eat_utf8("×")) op = 1;
      else if (eat('/') || eat_utf8("÷")) op = 2;
      else break;
      auto rhs = parse_power();
      if (!rhs) return std::nullopt;
      ++terms_;
      Num out;
      if (op == 2 && rhs->v.approx == 0 && (!rhs->v.exact || rhs->v.rat.num == 0))
        return std::nullopt;  // division by zero is undefined, not a mismatch
      out.v.approx = op == 1 ? lhs->v.approx * rhs->v.approx : lhs->v.approx / rhs->v.approx;
      out.v.exact = lhs->v.exact && rhs->v.exact;
      if (out.v.exact) {
        Rat b = rhs->v.rat;
        if (op == 2) {
          if (b.num == 0) return std::nullopt;
          std::swap(b.num, b.den);
        }
        out.v.exact = mul_rat(lhs->v.rat, b, out.v.rat);
      }
      lhs = out;
    }
    return lhs;
  }

  std::optional<Num> parse_power() {
    auto base = parse_unary();
    if (!base) return std::nullopt;
    skip_ws();
    if (!eat('^')) return base;
    auto exp = parse_power();  // right associative
    if (!exp) return std::nullopt;
    // Exponent must be an exact integer.
    if (!exp->v.exact || exp->v.rat.den != 1) return std::nullopt;
    std::int64_t e = exp->v.rat.num;
    if (e < -512 || e > 512) return std::nullopt;
    ++terms_;
    Num out;
    out.v.approx = std::pow(base->v.approx, static_cast<double>(e));
    out.v.exact = base->v.exact;
    if (out.v.exact) {
      Rat acc{1, 1};
      Rat b = base->v.rat;
      bool neg = e < 0;
      std::uint64_t k = neg ? static_cast<std::uint64_t>(-(e + 1)) + 1
                            : static_cast<std::uint64_t>(e);
      bool ok = true;
      while (k && ok) {
        if (k & 1) ok = mul_rat(acc, b, acc);
        k >>= 1;
        if (k && ok) ok = mul_rat(b, b, b);
      }
      if (ok && neg) {
        if (acc.num == 0) return std::nullopt;
        std::swap(acc.num, acc.den);
        ok = normalize(acc);
      }
      out.v.exact = ok;
      out.v.rat = acc;
    }
    return out;
  }

  std::optional<Num> parse_unary() {
    int sign = 1;
    while (true) {
      if (eat('+')) continue;
      if (eat('-') || eat_utf8("−")) {
        sign = -sign;
        continue;
      }
      break;
    }
    auto p = parse_primary();
    if (!p) return std::nullopt;
    if (sign < 0) {
      p->v.approx = -p->v.approx;
      if (p->v.exact) {
        if (p->v.rat.num == INT64_MIN) p->v.exact = false;
        else p->v.rat.num = -p->v.rat.num;
      }
    }
    return apply_percent(*p);
  }

  std::optional<Num> apply_percent(Num n) {
    while (eat('%')) {
      ++terms_;
      n.v.approx /= 100.0;
      if (n.v.exact) n.v.exact = mul_rat(n.v.rat, {1, 100}, n.v.rat);
      n.v.kind = LiteralKind::percent;
    }
    return n;
  }

  std::optional<Num> parse_primary() {
    skip_ws();
    if (eat('(')) {
      auto inner = parse_expr();
      if (!inner) return std::nullopt;
      if (!eat(')')) return std::nullopt;
      return inner;
    }
    return parse_number();
  }

  std::optional<Num> parse_number() {
    skip_ws();
    size_t start = pos_;
    std::string intpart, fracpart;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      intpart.push_back(s_[pos_++]);
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        fracpart.push_back(s_[pos_++]);
    }
    if (intpart.empty() && fracpart.empty()) {
      pos_ = start;
      return std::nullopt;
    }
    // optional exponent: 1.5e-3
    std::int64_t exp10 = 0;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      size_t mark = pos_++;
      bool neg = false;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) neg = s_[pos_++] == '-';
      std::string digits;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        digits.push_back(s_[pos_++]);
      if (digits.empty() || digits.size() > 4) {
        pos_ = mark;  // not an exponent after all
      } else {
        exp10 = std::atoll(digits.c_str());
        if (neg) exp10 = -exp10;
      }
    }

    // mantissa as integer / 10^frac
    Num out;
    out.v.exact = true;
    std::int64_t mant = 0;
    bool overflow = false;
    for (char c : intpart + fracpart) {
      if (__builtin_mul_overflow(mant, 10, &mant) ||
          __builtin_add_overflow(mant, c - '0', &mant)) {
        overflow = true;
        break;
      }
    }
    std::int64_t scale = static_cast<std::int64_t>(fracpart.size()) - exp10;
    if (!overflow) {
      Rat r{mant, 1};
      Rat ten{10, 1};
      std::int64_t k = scale;
      bool ok = true;
      if (k > 0) {
        for (std::int64_t i = 0; i < k && ok; ++i) ok = mul_rat(r, {1, 10}, r);
      } else {
        for (std::int64_t i = 0; i < -k && ok; ++i) ok = mul_rat(r, ten, r);
      }
      out.v.exact = ok;
      out.v.rat = r;
    } else {
      out.v.exact = false;
    }
    out.v.approx = std::strtod(std::string(s_.substr(start, pos_ - start)).c_str(), nullptr);
    out.v.kind = LiteralKind::number;
    return out;
  }
};

}  // namespace

std::optional<Value> evaluate(std::string_view text) {
  Parser p(text);
  auto v = p.run();
  if (!v) return std::nullopt;
  // Classify: a bare number/percent stays a literal; a/b is a fraction;
  // anything else with operators is an expression.
  size_t ops = 0, slashes = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '+' || c == '*' || c == '^') ++ops;
    if (c == '-' && i > 0 && (std::isdigit(static_cast<unsigned char>(text[i - 1])) ||
                              text[i - 1] == ')' || text[i - 1] == '%'))
      ++ops;  // binary minus only; leading sign keeps literal status
    if (c == '/') ++slashes;
    if (c == '(' || c == ')') ++ops;
  }
  if (v->kind != LiteralKind::percent) {
    if (ops == 0 && slashes == 1)
      v->kind = LiteralKind::fraction;
    else if (ops > 0 || slashes > 1)
      v->kind = LiteralKind::expression;
  } else if (ops > 0 || slashes > 0) {
    v->kind = LiteralKind::expression;
  }
  return v;
}

bool equivalent(const Value& a, const Value& b) {
  if (a.exact && b.exact) {
    // cross-multiply in 128-bit; exact for any int64 rationals
    __int128 lhs = static_cast<__int128>(a.rat.num) * b.rat.den;
    __int128 rhs = static_cast<__int128>(b.rat.num) * a.rat.den;
    return lhs == rhs;
  }
  double x = a.approx, y = b.approx;
  double scale = std::max(std::fabs(x), std::fabs(y));
  double tol = std::max(1e-9, 1e-6 * scale);
  return std::fabs(x - y) <= tol;
}

}  // namespace bench::rational

#include "cbrm/rational.hpp"

#include <cctype>
#include <cstdio>

#include "cbrm/errors.hpp"

namespace cbrm {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

[[noreturn]] void bad(std::string_view text) {
  throw Error(ErrorCode::InvalidArgument,
              "malformed rational '" + std::string(text) + "'");
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  const std::string_view num_part = body.substr(0, slash);
  if (!all_digits(num_part)) bad(text);
  BigInt num{std::string(num_part)};
  BigInt den = 1;
  if (slash != std::string_view::npos) {
    const std::string_view den_part = body.substr(slash + 1);
    if (!all_digits(den_part)) bad(text);
    den = BigInt{std::string(den_part)};
    if (den == 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "zero denominator in '" + std::string(text) + "'");
    }
  }
  if (negative) num = -num;
  return Rational(num, den);
}

std::string to_fraction(const Rational& r) {
  const BigInt& num = boost::multiprecision::numerator(r);
  const BigInt& den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_decimal(const Rational& r, int significant_digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.*g", significant_digits, to_double(r));
  std::string out(buf);
  // %#g keeps a trailing '.' for values like "1000000."
  if (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

}  // namespace cbrm

#include "dualiscope/exact.hpp"

#include <cctype>

#include "dualiscope/errors.hpp"

namespace dualiscope {

namespace {

bool digits_only(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rat frac(long num, long den) {
  if (den == 0) throw InvalidParameter("zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Rat parse_rat(const std::string& s) {
  std::string body = s;
  bool negative = false;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
    negative = body[0] == '-';
    body = body.substr(1);
  }
  std::string num = body, den = "1";
  if (auto slash = body.find('/'); slash != std::string::npos) {
    num = body.substr(0, slash);
    den = body.substr(slash + 1);
  }
  if (!digits_only(num) || !digits_only(den))
    throw InvalidParameter("not a rational literal: '" + s + "'");
  mpz_class n(num), d(den);
  if (d == 0) throw InvalidParameter("zero denominator in '" + s + "'");
  Rat r(n, d);
  r.canonicalize();
  if (negative) r = -r;
  return r;
}

Rat rat_from_double(double x) {
  Rat r;
  mpq_set_d(r.get_mpq_t(), x);
  return r;
}

double to_double(const Rat& x) { return x.get_d(); }

std::string rat_str(const Rat& x) { return x.get_str(); }

bool is_integer(const Rat& x) { return x.get_den() == 1; }

long to_long(const Rat& x) {
  if (!is_integer(x)) throw InvalidParameter("not an integer: " + rat_str(x));
  if (!x.get_num().fits_slong_p())
    throw InvalidParameter("integer out of range: " + rat_str(x));
  return x.get_num().get_si();
}

Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

Rat rat_pow(const Rat& base, long e) {
  if (e < 0) {
    if (base == 0) throw InvalidParameter("0 raised to a negative power");
    return 1 / rat_pow(base, -e);
  }
  Rat acc = 1, sq = base;
  long k = e;
  while (k > 0) {
    if (k & 1) acc *= sq;
    sq *= sq;
    k >>= 1;
  }
  return acc;
}

Rat factorial(long n) {
  if (n < 0) throw InvalidParameter("factorial of a negative integer");
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return Rat(f);
}

Rat rising_factorial(const Rat& a, long k) {
  if (k < 0) throw InvalidParameter("rising factorial with negative length");
  Rat acc = 1;
  for (long j = 0; j < k; ++j) acc *= a + j;
  return acc;
}

Rat falling_factorial(long l, long k) {
  if (k < 0) throw InvalidParameter("falling factorial with negative length");
  if (k > l) return 0;
  Rat acc = 1;
  for (long j = 0; j < k; ++j) acc *= Rat(l - j);
  return acc;
}

Rat binomial_coeff(long l, long k) {
  if (k < 0 || l < 0) throw InvalidParameter("binomial with negative argument");
  if (k > l) return 0;
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(l),
               static_cast<unsigned long>(k));
  return Rat(b);
}

Rat odd_double_factorial(long k) {
  if (k < 0) throw InvalidParameter("double factorial with negative argument");
  Rat acc = 1;
  for (long j = 1; j <= k; ++j) acc *= Rat(2 * j - 1);
  return acc;
}

}  // namespace dualiscope

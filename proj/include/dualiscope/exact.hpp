#pragma once

#include <gmpxx.h>

#include <string>

namespace dualiscope {

// Exact rational scalar. Every duality identity, stationarity check and
// absorption solve in this project is evaluated in exact arithmetic;
// doubles only enter at the uniformization / Monte Carlo layer.
//
// Rat(num, den) does NOT reduce the fraction (GMP semantics) and GMP
// assumes canonical operands, so direct two-argument construction is only
// safe for coprime literals. Build computed fractions with frac().
using Rat = mpq_class;

Rat frac(long num, long den);

// Parses "p", "-p", "p/q" (base 10). Throws InvalidParameter on anything else.
Rat parse_rat(const std::string& s);

// Exact binary expansion of a finite double.
Rat rat_from_double(double x);

double to_double(const Rat& x);
std::string rat_str(const Rat& x);

bool is_integer(const Rat& x);
// Requires is_integer and fits in long.
long to_long(const Rat& x);

Rat rat_abs(const Rat& x);
// e may be negative only for nonzero base.
Rat rat_pow(const Rat& base, long e);

Rat factorial(long n);
// a (a+1) ... (a+k-1); empty product = 1.
Rat rising_factorial(const Rat& a, long k);
// l (l-1) ... (l-k+1); 0 when k > l.
Rat falling_factorial(long l, long k);
Rat binomial_coeff(long l, long k);
// (2k-1)!! with (-1)!! = 1.
Rat odd_double_factorial(long k);

}  // namespace dualiscope

#pragma once

#include <map>
#include <string>
#include <vector>

#include "dualiscope/exact.hpp"

namespace dualiscope {

// Exact multivariate polynomial over the site variables, used to house the
// diffusion duality functions and their generator images. Coefficients are
// exact rationals; zero coefficients are never stored.
class Polynomial {
 public:
  using Exponents = std::vector<int>;  // one power per site

  explicit Polynomial(int n_vars) : n_vars_(n_vars) {}

  static Polynomial constant(int n_vars, const Rat& c);
  static Polynomial monomial(int n_vars, Exponents exp, const Rat& c);

  int n_vars() const { return n_vars_; }
  const std::map<Exponents, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial scaled(const Rat& c) const;

  // Exact partial derivative with respect to one site variable.
  Polynomial derivative(int var) const;
  // Multiplication by a single variable raised to `power`.
  Polynomial times_var(int var, int power = 1) const;

  Rat evaluate(const std::vector<Rat>& point) const;
  Rat max_abs_coefficient() const;
  bool operator==(const Polynomial& other) const;

  std::string str(const std::vector<std::string>& names = {}) const;

 private:
  void add_term(const Exponents& exp, const Rat& c);

  int n_vars_;
  std::map<Exponents, Rat> terms_;
};

}  // namespace dualiscope

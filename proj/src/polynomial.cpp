#include "dualiscope/polynomial.hpp"

#include <sstream>

#include "dualiscope/errors.hpp"

namespace dualiscope {

Polynomial Polynomial::constant(int n_vars, const Rat& c) {
  return monomial(n_vars, Exponents(n_vars, 0), c);
}

Polynomial Polynomial::monomial(int n_vars, Exponents exp, const Rat& c) {
  if (static_cast<int>(exp.size()) != n_vars)
    throw InvalidParameter("exponent vector length mismatch");
  Polynomial p(n_vars);
  p.add_term(exp, c);
  return p;
}

void Polynomial::add_term(const Exponents& exp, const Rat& c) {
  if (c == 0) return;
  auto it = terms_.find(exp);
  if (it == terms_.end()) {
    terms_.emplace(exp, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.n_vars_ != n_vars_)
    throw InvalidParameter("polynomial variable count mismatch");
  for (const auto& [exp, c] : other.terms_) add_term(exp, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (other.n_vars_ != n_vars_)
    throw InvalidParameter("polynomial variable count mismatch");
  for (const auto& [exp, c] : other.terms_) add_term(exp, Rat(-c));
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial out = *this;
  out += other;
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  Polynomial out = *this;
  out -= other;
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (other.n_vars_ != n_vars_)
    throw InvalidParameter("polynomial variable count mismatch");
  Polynomial out(n_vars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : other.terms_) {
      Exponents exp(n_vars_);
      for (int i = 0; i < n_vars_; ++i) exp[i] = ea[i] + eb[i];
      out.add_term(exp, ca * cb);
    }
  return out;
}

Polynomial Polynomial::scaled(const Rat& c) const {
  Polynomial out(n_vars_);
  if (c == 0) return out;
  for (const auto& [exp, coeff] : terms_) out.terms_.emplace(exp, coeff * c);
  return out;
}

Polynomial Polynomial::derivative(int var) const {
  Polynomial out(n_vars_);
  for (const auto& [exp, coeff] : terms_) {
    if (exp[var] == 0) continue;
    Exponents d = exp;
    --d[var];
    out.add_term(d, coeff * exp[var]);
  }
  return out;
}

Polynomial Polynomial::times_var(int var, int power) const {
  Polynomial out(n_vars_);
  for (const auto& [exp, coeff] : terms_) {
    Exponents e = exp;
    e[var] += power;
    out.terms_.emplace(e, coeff);
  }
  return out;
}

Rat Polynomial::evaluate(const std::vector<Rat>& point) const {
  if (static_cast<int>(point.size()) != n_vars_)
    throw InvalidParameter("evaluation point length mismatch");
  Rat total = 0;
  for (const auto& [exp, coeff] : terms_) {
    Rat term = coeff;
    for (int i = 0; i < n_vars_; ++i)
      if (exp[i] > 0) term *= rat_pow(point[i], exp[i]);
    total += term;
  }
  return total;
}

Rat Polynomial::max_abs_coefficient() const {
  Rat worst = 0;
  for (const auto& [exp, coeff] : terms_) {
    Rat a = rat_abs(coeff);
    if (a > worst) worst = a;
  }
  return worst;
}

bool Polynomial::operator==(const Polynomial& other) const {
  return n_vars_ == other.n_vars_ && terms_ == other.terms_;
}

std::string Polynomial::str(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [exp, coeff] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << rat_str(coeff);
    for (int i = 0; i < n_vars_; ++i) {
      if (exp[i] == 0) continue;
      os << "*"
         << (static_cast<int>(names.size()) > i ? names[i]
                                                : "x" + std::to_string(i));
      if (exp[i] > 1) os << "^" << exp[i];
    }
  }
  return os.str();
}

}  // namespace dualiscope

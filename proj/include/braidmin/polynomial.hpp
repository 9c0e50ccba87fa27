#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "braidmin/transmatrix.hpp"

namespace braidmin {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Polynomial with arbitrary-precision integer coefficients, stored in
/// ascending order of degree with no trailing zeros.
class IntPolynomial {
 public:
  IntPolynomial() = default;
  explicit IntPolynomial(std::vector<BigInt> ascending);
  /// Coefficients from the leading term down, e.g. {1, -1, -1} is x^2 - x - 1.
  static IntPolynomial from_descending(std::initializer_list<long long> coeffs);
  static IntPolynomial from_strings(const std::vector<std::string>& ascending);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  BigInt coeff(int i) const;
  const BigInt& leading() const { return c_.back(); }
  const std::vector<BigInt>& coefficients() const { return c_; }
  std::vector<std::string> to_strings() const;

  IntPolynomial derivative() const;
  BigInt content() const;
  /// Divides by the content and makes the leading coefficient positive.
  IntPolynomial primitive_part() const;

  /// Sign of p(num / den) for den > 0.
  int sign_at(const BigInt& num, const BigInt& den) const;
  int sign_at(const BigRational& x) const;
  double evaluate(double x) const;

  std::string to_string() const;

  friend IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b);
  friend IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b);
  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b);
  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

 private:
  void trim();
  std::vector<BigInt> c_;
};

/// Exact quotient q / p over Z[x]; false when p does not divide q.
bool exact_divide(const IntPolynomial& q, const IntPolynomial& p, IntPolynomial* quotient);

/// True iff p divides q in Z[x].
bool divides(const IntPolynomial& p, const IntPolynomial& q);

/// Primitive gcd with positive leading coefficient.
IntPolynomial gcd(const IntPolynomial& a, const IntPolynomial& b);
IntPolynomial squarefree_part(const IntPolynomial& p);

/// Exact characteristic polynomial det(xI - M), division-free. Uses checked
/// 64-bit arithmetic and switches to arbitrary precision on overflow.
IntPolynomial char_poly(const TransMatrix& m);

/// Sturm sequence of the squarefree part of a polynomial.
class SturmChain {
 public:
  explicit SturmChain(const IntPolynomial& p);

  /// Number of distinct real roots strictly greater than x.
  int count_above(const BigRational& x) const;
  int real_root_count() const;
  const IntPolynomial& squarefree() const { return chain_.front(); }

 private:
  int variations_at(const BigRational& x) const;
  int variations_at_infinity(bool positive) const;
  std::vector<IntPolynomial> chain_;
};

BigRational exact_rational(double x);

/// Certified enclosure [lo, hi] of the largest real root; `exact` when the
/// root is an integer found exactly (then lo == hi).
struct RootEnclosure {
  double lo = 0;
  double hi = 0;
  bool exact = false;
  double mid() const { return lo + (hi - lo) / 2; }
};

/// Throws DomainError when tol <= 0 or p has no real root.
RootEnclosure largest_real_root(const IntPolynomial& p, double tol);

/// Sign of (largest real root of p) - bound, decided exactly.
int compare_largest_root(const IntPolynomial& p, const BigRational& bound);
int compare_largest_root(const IntPolynomial& p, double bound);

/// True iff the largest real root of p lies within tol of value.
bool verify_root(const IntPolynomial& p, double value, double tol);

/// Monic irreducible factor of a monic p having the largest real root of p.
IntPolynomial minimal_polynomial(const IntPolynomial& p);

}  // namespace braidmin

#include "braidmin/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "braidmin/track.hpp"

namespace braidmin {

namespace {

struct Overflow {};

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
  return r;
}

BigInt checked_mul(const BigInt& a, const BigInt& b) { return a * b; }
BigInt checked_add(const BigInt& a, const BigInt& b) { return a + b; }

// Berkowitz: coefficients of det(xI - A), leading first.
template <typename T>
std::vector<T> berkowitz(const TransMatrix& m) {
  const int n = m.dim();
  auto a = [&](int i, int j) { return T(m(i, j)); };
  std::vector<T> c{T(1), T(0) - a(0, 0)};
  for (int r = 1; r < n; ++r) {
    // q = [1, -a_rr, -R S, -R A S, ..., -R A^(r-1) S] with A the leading r x r block
    std::vector<T> q(r + 2, T(0));
    q[0] = T(1);
    q[1] = T(0) - a(r, r);
    std::vector<T> v(r);
    for (int i = 0; i < r; ++i) v[i] = a(i, r);
    for (int k = 0; k < r; ++k) {
      T dot(0);
      for (int i = 0; i < r; ++i) dot = checked_add(dot, checked_mul(a(r, i), v[i]));
      q[k + 2] = T(0) - dot;
      if (k + 1 == r) break;
      std::vector<T> next(r, T(0));
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) next[i] = checked_add(next[i], checked_mul(a(i, j), v[j]));
      v = std::move(next);
    }
    std::vector<T> out(r + 2, T(0));
    for (int i = 0; i <= r + 1; ++i)
      for (int j = 0; j <= std::min(i, r); ++j) out[i] = checked_add(out[i], checked_mul(q[i - j], c[j]));
    c = std::move(out);
  }
  return c;
}

// Positive multiple of a mod b (degree below deg b).
IntPolynomial signed_pseudo_remainder(const IntPolynomial& a, const IntPolynomial& b) {
  std::vector<BigInt> r = a.coefficients();
  const auto& bc = b.coefficients();
  const int db = b.degree();
  const BigInt lb_abs = abs(b.leading());
  const int lb_sign = b.leading() > 0 ? 1 : -1;
  while (static_cast<int>(r.size()) - 1 >= db && !r.empty()) {
    const int dr = static_cast<int>(r.size()) - 1;
    const BigInt lr = r.back();
    const int shift = dr - db;
    for (auto& x : r) x *= lb_abs;
    for (int i = 0; i <= db; ++i) r[i + shift] -= lb_sign * lr * bc[i];
    while (!r.empty() && r.back() == 0) r.pop_back();
  }
  return IntPolynomial(std::move(r));
}

double to_double_down(const BigRational& x) {
  double d = x.convert_to<double>();
  if (BigRational(exact_rational(d)) > x) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
  return d;
}

double to_double_up(const BigRational& x) {
  double d = x.convert_to<double>();
  if (BigRational(exact_rational(d)) < x) d = std::nextafter(d, std::numeric_limits<double>::infinity());
  return d;
}

}  // namespace

IntPolynomial::IntPolynomial(std::vector<BigInt> ascending) : c_(std::move(ascending)) { trim(); }

IntPolynomial IntPolynomial::from_descending(std::initializer_list<long long> coeffs) {
  std::vector<BigInt> c(coeffs.begin(), coeffs.end());
  std::reverse(c.begin(), c.end());
  return IntPolynomial(std::move(c));
}

IntPolynomial IntPolynomial::from_strings(const std::vector<std::string>& ascending) {
  std::vector<BigInt> c;
  for (const auto& s : ascending) {
    if (s.empty()) throw DomainError("empty polynomial coefficient");
    try {
      c.emplace_back(s);
    } catch (const std::exception&) {
      throw DomainError("bad polynomial coefficient '" + s + "'");
    }
  }
  return IntPolynomial(std::move(c));
}

void IntPolynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

BigInt IntPolynomial::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(c_.size())) return 0;
  return c_[i];
}

std::vector<std::string> IntPolynomial::to_strings() const {
  std::vector<std::string> out;
  for (const auto& x : c_) out.push_back(x.str());
  return out;
}

IntPolynomial IntPolynomial::derivative() const {
  std::vector<BigInt> d;
  for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<long long>(i));
  return IntPolynomial(std::move(d));
}

BigInt IntPolynomial::content() const {
  BigInt g = 0;
  for (const auto& x : c_) g = gcd(g, abs(x));
  return g;
}

IntPolynomial IntPolynomial::primitive_part() const {
  if (is_zero()) return *this;
  BigInt g = content();
  if (leading() < 0) g = -g;
  std::vector<BigInt> c = c_;
  for (auto& x : c) x /= g;
  return IntPolynomial(std::move(c));
}

int IntPolynomial::sign_at(const BigInt& num, const BigInt& den) const {
  if (c_.empty()) return 0;
  BigInt acc = c_.back();
  BigInt dpow = 1;
  for (int i = degree() - 1; i >= 0; --i) {
    dpow *= den;
    acc = acc * num + c_[i] * dpow;
  }
  return acc > 0 ? 1 : (acc < 0 ? -1 : 0);
}

int IntPolynomial::sign_at(const BigRational& x) const {
  return sign_at(numerator(x), denominator(x));
}

double IntPolynomial::evaluate(double x) const {
  double acc = 0;
  for (int i = degree(); i >= 0; --i) acc = acc * x + c_[i].convert_to<double>();
  return acc;
}

std::string IntPolynomial::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const BigInt& c = c_[i];
    if (c == 0) continue;
    const BigInt mag = abs(c);
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (mag != 1 || i == 0) os << mag;
    if (i >= 1) os << 'x';
    if (i >= 2) os << '^' << i;
  }
  return os.str();
}

IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b) {
  std::vector<BigInt> c(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) + b.coeff(i);
  return IntPolynomial(std::move(c));
}

IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b) {
  std::vector<BigInt> c(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) - b.coeff(i);
  return IntPolynomial(std::move(c));
}

IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigInt> c(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return IntPolynomial(std::move(c));
}

bool exact_divide(const IntPolynomial& q, const IntPolynomial& p, IntPolynomial* quotient) {
  if (p.is_zero()) throw DomainError("division by the zero polynomial");
  if (q.is_zero()) {
    if (quotient) *quotient = IntPolynomial();
    return true;
  }
  if (q.degree() < p.degree()) return false;
  std::vector<BigInt> r = q.coefficients();
  std::vector<BigInt> out(q.degree() - p.degree() + 1);
  const auto& pc = p.coefficients();
  for (int k = q.degree() - p.degree(); k >= 0; --k) {
    const BigInt& top = r[k + p.degree()];
    if (top % p.leading() != 0) return false;
    const BigInt f = top / p.leading();
    out[k] = f;
    for (int i = 0; i <= p.degree(); ++i) r[k + i] -= f * pc[i];
  }
  for (const auto& x : r)
    if (x != 0) return false;
  if (quotient) *quotient = IntPolynomial(std::move(out));
  return true;
}

bool divides(const IntPolynomial& p, const IntPolynomial& q) { return exact_divide(q, p, nullptr); }

IntPolynomial gcd(const IntPolynomial& a, const IntPolynomial& b) {
  IntPolynomial x = a.primitive_part();
  IntPolynomial y = b.primitive_part();
  if (x.degree() < y.degree()) std::swap(x, y);
  while (!y.is_zero()) {
    IntPolynomial r = signed_pseudo_remainder(x, y).primitive_part();
    x = std::move(y);
    y = std::move(r);
  }
  if (x.is_zero()) return x;
  if (x.degree() == 0) return IntPolynomial({BigInt(1)});
  return x.primitive_part();
}

IntPolynomial squarefree_part(const IntPolynomial& p) {
  if (p.degree() < 1) return p.primitive_part();
  const IntPolynomial g = gcd(p, p.derivative());
  IntPolynomial q;
  if (!exact_divide(p, g, &q)) throw DomainError("squarefree decomposition failed");
  return q.primitive_part();
}

IntPolynomial char_poly(const TransMatrix& m) {
  if (m.dim() < 1) throw DomainError("characteristic polynomial of an empty matrix");
  std::vector<BigInt> desc;
  try {
    for (auto x : berkowitz<std::int64_t>(m)) desc.emplace_back(x);
  } catch (const Overflow&) {
    desc = berkowitz<BigInt>(m);
  }
  std::reverse(desc.begin(), desc.end());
  return IntPolynomial(std::move(desc));
}

SturmChain::SturmChain(const IntPolynomial& p) {
  if (p.degree() < 1) throw DomainError("Sturm chain needs a nonconstant polynomial");
  chain_.push_back(squarefree_part(p));
  chain_.push_back(chain_.front().derivative().primitive_part());
  while (chain_.back().degree() > 0) {
    IntPolynomial r = signed_pseudo_remainder(chain_[chain_.size() - 2], chain_.back());
    if (r.is_zero()) break;
    const BigInt g = r.content();
    std::vector<BigInt> c = r.coefficients();
    for (auto& x : c) x = -x / g;
    chain_.emplace_back(std::move(c));
  }
}

int SturmChain::variations_at(const BigRational& x) const {
  int v = 0;
  int prev = 0;
  for (const auto& p : chain_) {
    const int s = p.sign_at(x);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++v;
    prev = s;
  }
  return v;
}

int SturmChain::variations_at_infinity(bool positive) const {
  int v = 0;
  int prev = 0;
  for (const auto& p : chain_) {
    int s = p.leading() > 0 ? 1 : -1;
    if (!positive && p.degree() % 2 == 1) s = -s;
    if (prev != 0 && s != prev) ++v;
    prev = s;
  }
  return v;
}

int SturmChain::count_above(const BigRational& x) const { return variations_at(x) - variations_at_infinity(true); }

int SturmChain::real_root_count() const { return variations_at_infinity(false) - variations_at_infinity(true); }

BigRational exact_rational(double x) {
  if (!std::isfinite(x)) throw DomainError("non-finite value has no exact rational form");
  if (x == 0) return 0;
  int exp = 0;
  const double frac = std::frexp(x, &exp);
  const auto mantissa = static_cast<long long>(std::ldexp(frac, 53));
  exp -= 53;
  BigInt num = mantissa;
  BigInt den = 1;
  if (exp >= 0) {
    num <<= exp;
  } else {
    den <<= -exp;
  }
  return BigRational(num, den);
}

RootEnclosure largest_real_root(const IntPolynomial& p, double tol) {
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  if (p.degree() < 1) throw DomainError("constant polynomial has no roots");
  const SturmChain sturm(p);
  if (sturm.real_root_count() == 0) throw DomainError("polynomial " + p.to_string() + " has no real root");
  const IntPolynomial& q = sturm.squarefree();
  BigInt worst = 0;
  for (int i = 0; i < q.degree(); ++i) worst = std::max(worst, BigInt(abs(q.coeff(i))));
  const BigInt lead = abs(q.leading());
  const BigInt bound = 1 + (worst + lead - 1) / lead;

  // The largest root stays in (lo, hi].
  BigRational lo = -BigRational(bound);
  BigRational hi = BigRational(bound);
  RootEnclosure out;
  for (int iter = 0; iter < 400; ++iter) {
    if (q.sign_at(hi) == 0) {
      out.lo = to_double_down(hi);
      out.hi = to_double_up(hi);
      out.exact = true;
      return out;
    }
    out.lo = to_double_down(lo);
    out.hi = to_double_up(hi);
    if (out.hi - out.lo <= tol) break;
    const BigRational mid = (lo + hi) / 2;
    if (sturm.count_above(mid) >= 1) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Integer roots are reported as points.
  if (hi - lo < 1) {
    const BigInt k = numerator(hi) / denominator(hi);
    if (BigRational(k) > lo && q.sign_at(BigRational(k)) == 0) {
      out.lo = to_double_down(BigRational(k));
      out.hi = to_double_up(BigRational(k));
      out.exact = true;
    }
  }
  return out;
}

int compare_largest_root(const IntPolynomial& p, const BigRational& bound) {
  if (p.degree() < 1) throw DomainError("constant polynomial has no roots");
  const SturmChain sturm(p);
  if (sturm.real_root_count() == 0) throw DomainError("polynomial " + p.to_string() + " has no real root");
  if (sturm.count_above(bound) > 0) return 1;
  if (sturm.squarefree().sign_at(bound) == 0) return 0;
  return -1;
}

int compare_largest_root(const IntPolynomial& p, double bound) {
  return compare_largest_root(p, exact_rational(bound));
}

bool verify_root(const IntPolynomial& p, double value, double tol) {
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  if (p.degree() < 1) return false;
  const SturmChain sturm(p);
  if (sturm.real_root_count() == 0) return false;
  const BigRational v = exact_rational(value);
  const BigRational t = exact_rational(tol);
  if (sturm.count_above(v + t) > 0) return false;
  return sturm.count_above(v - t) > 0 || sturm.squarefree().sign_at(v - t) == 0;
}

IntPolynomial minimal_polynomial(const IntPolynomial& p) {
  if (p.degree() < 1) throw DomainError("minimal polynomial of a constant");
  if (abs(p.leading()) != 1) throw DomainError("minimal polynomial needs a monic polynomial");
  const IntPolynomial q = squarefree_part(p);
  const int d = q.degree();
  if (d == 1) return q;
  const RootEnclosure rho = largest_real_root(q, 1e-12);

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -q.coeff(i).convert_to<double>();
  const Eigen::VectorXcd roots = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();

  int anchor = 0;
  for (int i = 1; i < d; ++i)
    if (std::abs(roots[i] - rho.mid()) < std::abs(roots[anchor] - rho.mid())) anchor = i;
  std::vector<int> others;
  for (int i = 0; i < d; ++i)
    if (i != anchor) others.push_back(i);

  for (int extra = 0; extra < d - 1; ++extra) {
    std::vector<bool> pick(others.size(), false);
    std::fill(pick.begin(), pick.begin() + extra, true);
    do {
      std::vector<std::complex<double>> f{1.0};
      auto multiply = [&](std::complex<double> r) {
        std::vector<std::complex<double>> g(f.size() + 1, 0.0);
        for (std::size_t i = 0; i < f.size(); ++i) {
          g[i + 1] += f[i];
          g[i] -= r * f[i];
        }
        f = std::move(g);
      };
      multiply(roots[anchor]);
      for (std::size_t i = 0; i < others.size(); ++i)
        if (pick[i]) multiply(roots[others[i]]);
      std::vector<BigInt> c;
      bool integral = true;
      for (const auto& z : f) {
        const double r = std::round(z.real());
        if (std::abs(z.imag()) > 1e-6 || std::abs(z.real() - r) > 1e-6) {
          integral = false;
          break;
        }
        c.emplace_back(static_cast<long long>(r));
      }
      if (integral) {
        IntPolynomial cand(std::move(c));
        if (divides(cand, q) && compare_largest_root(cand, exact_rational(rho.lo)) >= 0 &&
            compare_largest_root(cand, exact_rational(rho.hi)) <= 0)
          return cand;
      }
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return q;
}

}  // namespace braidmin

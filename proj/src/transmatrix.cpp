#include "braidmin/transmatrix.hpp"

#include <cmath>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "braidmin/track.hpp"

namespace braidmin {

namespace {

using BoolRows = std::vector<std::uint64_t>;

BoolRows pattern_rows(const TransMatrix& m) {
  BoolRows rows(m.dim(), 0);
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j)
      if (m(i, j) != 0) rows[i] |= std::uint64_t{1} << j;
  return rows;
}

BoolRows bool_product(const BoolRows& a, const BoolRows& b) {
  BoolRows out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::uint64_t bits = a[i];
    while (bits) {
      const int k = __builtin_ctzll(bits);
      bits &= bits - 1;
      out[i] |= b[k];
    }
  }
  return out;
}

bool all_positive(const BoolRows& rows, int n) {
  const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  for (auto r : rows)
    if (r != full) return false;
  return true;
}

}  // namespace

TransMatrix::TransMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0) {
  if (n < 0) throw DomainError("negative matrix dimension");
}

TransMatrix::TransMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows)
    : n_(static_cast<int>(rows.size())) {
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != n_) throw DomainError("matrix must be square");
    for (auto x : r) {
      if (x < 0) throw DomainError("matrix entries must be nonnegative");
      a_.push_back(x);
    }
  }
}

TransMatrix TransMatrix::from_row_major(int n, std::vector<std::int64_t> entries) {
  if (n < 0 || entries.size() != static_cast<std::size_t>(n) * n)
    throw DomainError("row-major data does not match dimension");
  for (auto x : entries)
    if (x < 0) throw DomainError("matrix entries must be nonnegative");
  TransMatrix m;
  m.n_ = n;
  m.a_ = std::move(entries);
  return m;
}

TransMatrix TransMatrix::identity(int n) {
  TransMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

std::int64_t TransMatrix::row_sum(int i) const {
  std::int64_t s = 0;
  for (int j = 0; j < n_; ++j) s += (*this)(i, j);
  return s;
}

std::int64_t TransMatrix::col_sum(int j) const {
  std::int64_t s = 0;
  for (int i = 0; i < n_; ++i) s += (*this)(i, j);
  return s;
}

TransMatrix TransMatrix::operator*(const TransMatrix& rhs) const {
  if (n_ != rhs.n_) throw DomainError("dimension mismatch in matrix product");
  TransMatrix out(n_);
  for (int i = 0; i < n_; ++i) {
    for (int k = 0; k < n_; ++k) {
      const std::int64_t x = (*this)(i, k);
      if (x == 0) continue;
      for (int j = 0; j < n_; ++j) {
        const std::int64_t y = rhs(k, j);
        if (y == 0) continue;
        std::int64_t p = 0;
        if (__builtin_mul_overflow(x, y, &p) || __builtin_add_overflow(out(i, j), p, &out(i, j)))
          throw OverflowError("transition matrix entry overflow");
      }
    }
  }
  return out;
}

std::int64_t entry_sum(const TransMatrix& m) {
  std::int64_t s = 0;
  for (auto x : m.row_major())
    if (__builtin_add_overflow(s, x, &s)) throw OverflowError("entry sum overflow");
  return s;
}

std::int64_t max_norm_bound(double lambda_bound, int n) {
  if (!(lambda_bound > 1.0) || !std::isfinite(lambda_bound))
    throw DomainError("lambda bound must be a finite number > 1");
  if (n < 1) throw DomainError("dimension must be positive");
  using boost::multiprecision::cpp_int;
  // lambda = mantissa * 2^exp exactly, so lambda^n is an exact dyadic rational.
  int exp = 0;
  const double frac = std::frexp(lambda_bound, &exp);
  const auto mantissa = static_cast<std::int64_t>(std::ldexp(frac, 53));
  exp -= 53;
  cpp_int num = pow(cpp_int(mantissa), static_cast<unsigned>(n));
  const long long shift = static_cast<long long>(exp) * n;
  cpp_int floor_pow;
  if (shift >= 0) {
    floor_pow = num << static_cast<unsigned>(shift);
  } else {
    floor_pow = num >> static_cast<unsigned>(-shift);  // floor for nonnegative values
  }
  floor_pow += n - 1;
  if (floor_pow > cpp_int(std::numeric_limits<std::int64_t>::max()))
    throw OverflowError("norm bound exceeds 64-bit range");
  return static_cast<std::int64_t>(floor_pow);
}

bool is_perron_frobenius(const TransMatrix& m) {
  const int n = m.dim();
  if (n < 1) return false;
  if (n > 64) throw DomainError("pattern tests support dimension <= 64");
  const BoolRows base = pattern_rows(m);
  BoolRows p = base;
  const int exponent = n * n - 2 * n + 2;
  for (int k = 1; k < exponent; ++k) {
    if (all_positive(p, n)) return true;
    p = bool_product(p, base);
  }
  return all_positive(p, n);
}

int primitivity_exponent(const TransMatrix& m) {
  const int n = m.dim();
  if (n < 1) return 0;
  if (n > 64) throw DomainError("pattern tests support dimension <= 64");
  const BoolRows base = pattern_rows(m);
  BoolRows p = base;
  const int exponent = n * n - 2 * n + 2;
  for (int k = 1; k <= exponent; ++k) {
    if (all_positive(p, n)) return k;
    p = bool_product(p, base);
  }
  return 0;
}

bool same_pattern(const TransMatrix& a, const TransMatrix& b) {
  if (a.dim() != b.dim()) throw DomainError("dimension mismatch in pattern comparison");
  for (std::size_t i = 0; i < a.row_major().size(); ++i)
    if ((a.row_major()[i] != 0) != (b.row_major()[i] != 0)) return false;
  return true;
}

bool dominates(const TransMatrix& a, const TransMatrix& b) {
  if (a.dim() != b.dim()) throw DomainError("dimension mismatch in entrywise comparison");
  for (std::size_t i = 0; i < a.row_major().size(); ++i)
    if (a.row_major()[i] < b.row_major()[i]) return false;
  return true;
}

TransMatrix power(const TransMatrix& m, int k) {
  if (k < 0) throw DomainError("negative matrix power");
  TransMatrix out = TransMatrix::identity(m.dim());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

}  // namespace braidmin

#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace braidmin {

/// Raised when exact integer arithmetic would wrap.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Square nonnegative integer matrix. Entry (i, j) counts the occurrences of
/// edge j in the image of edge i, so path matrices multiply left to right:
/// M(gamma . delta) = M(gamma) * M(delta).
class TransMatrix {
 public:
  TransMatrix() = default;
  explicit TransMatrix(int n);
  TransMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows);
  static TransMatrix from_row_major(int n, std::vector<std::int64_t> entries);
  static TransMatrix identity(int n);

  int dim() const { return n_; }
  std::int64_t operator()(int i, int j) const { return a_[i * n_ + j]; }
  std::int64_t& operator()(int i, int j) { return a_[i * n_ + j]; }
  const std::vector<std::int64_t>& row_major() const { return a_; }

  std::int64_t row_sum(int i) const;
  std::int64_t col_sum(int j) const;

  /// Overflow-checked product; throws OverflowError instead of wrapping.
  TransMatrix operator*(const TransMatrix& rhs) const;

  friend bool operator==(const TransMatrix&, const TransMatrix&) = default;
  friend auto operator<=>(const TransMatrix&, const TransMatrix&) = default;

 private:
  int n_ = 0;
  std::vector<std::int64_t> a_;
};

std::int64_t entry_sum(const TransMatrix& m);

/// floor(lambda^n + n - 1), rounded so the true bound is never undercut.
std::int64_t max_norm_bound(double lambda_bound, int n);

/// Boolean-semiring test that M^(n^2 - 2n + 2) is everywhere positive.
bool is_perron_frobenius(const TransMatrix& m);

/// Smallest k with M^k positive, or 0 when no power is positive.
int primitivity_exponent(const TransMatrix& m);

bool same_pattern(const TransMatrix& a, const TransMatrix& b);
/// Entrywise a >= b.
bool dominates(const TransMatrix& a, const TransMatrix& b);

TransMatrix power(const TransMatrix& m, int k);

}  // namespace braidmin

#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "braidmin/polynomial.hpp"
#include "oracles.hpp"

using namespace braidmin;

namespace {

const IntPolynomial kLambda5 = IntPolynomial::from_descending({1, -1, -1, -1, 1});
const IntPolynomial kLambda4 = IntPolynomial::from_descending({1, -2, 0, -2, 1});
const IntPolynomial kFourProng = IntPolynomial::from_descending({1, -3, 3, -3, 1});
const IntPolynomial kTwoTrigon = IntPolynomial::from_descending({1, -1, 0, -4, 0, -1, 1});

int eigen_real_roots_above(const IntPolynomial& p, double x) {
  const int n = p.degree();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  const double lead = p.leading().convert_to<double>();
  for (int i = 0; i < n; ++i) c(0, i) = -p.coeff(n - 1 - i).convert_to<double>() / lead;
  for (int i = 1; i < n; ++i) c(i, i - 1) = 1;
  const Eigen::VectorXcd ev = c.eigenvalues();
  int k = 0;
  for (int i = 0; i < n; ++i)
    if (std::abs(ev[i].imag()) < 1e-9 && ev[i].real() > x) ++k;
  return k;
}

}  // namespace

TEST_CASE("formatting") {
  CHECK(kLambda5.to_string() == "x^4 - x^3 - x^2 - x + 1");
  CHECK(kTwoTrigon.to_string() == "x^6 - x^5 - 4x^3 - x + 1");
  CHECK(IntPolynomial::from_descending({1, -3, 1}).to_string() == "x^2 - 3x + 1");
  CHECK(IntPolynomial().to_string() == "0");
  CHECK(IntPolynomial::from_strings(kLambda4.to_strings()) == kLambda4);
}

TEST_CASE("arithmetic and exact division") {
  const IntPolynomial xp1 = IntPolynomial::from_descending({1, 1});
  const IntPolynomial prod = xp1 * kFourProng;
  CHECK(prod == IntPolynomial::from_descending({1, -2, 0, 0, -2, 1}));
  IntPolynomial q;
  CHECK(exact_divide(prod, xp1, &q));
  CHECK(q == kFourProng);
  CHECK(divides(kFourProng, prod));
  CHECK_FALSE(divides(kLambda5, prod));
  CHECK(prod - prod == IntPolynomial());
  CHECK(gcd(prod, kFourProng * kLambda5) == kFourProng);
  CHECK(squarefree_part(kLambda5 * kLambda5) == kLambda5);
  CHECK(IntPolynomial::from_descending({6, 4}).content() == 2);
}

TEST_CASE("characteristic polynomial examples") {
  CHECK(char_poly(TransMatrix::identity(2)) == IntPolynomial::from_descending({1, -2, 1}));
  CHECK(char_poly(TransMatrix{{1, 1}, {1, 0}}) == IntPolynomial::from_descending({1, -1, -1}));
  CHECK(char_poly(TransMatrix{{2}}) == IntPolynomial::from_descending({1, -2}));
}

TEST_CASE("characteristic polynomial agrees with Faddeev-LeVerrier") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> dim(1, 8);
  for (int trial = 0; trial < 500; ++trial) {
    const TransMatrix m = oracle::random_matrix(rng, dim(rng), 9, 0.6);
    CHECK(char_poly(m) == oracle::faddeev_leverrier(m));
  }
}

TEST_CASE("characteristic polynomial promotes past 64 bits") {
  const std::int64_t big = std::int64_t{1} << 40;
  const TransMatrix m{{big, big, 1}, {1, big, big}, {big, 1, big}};
  CHECK(char_poly(m) == oracle::faddeev_leverrier(m));
}

TEST_CASE("largest root examples") {
  const RootEnclosure r5 = largest_real_root(kLambda5, 1e-9);
  CHECK(r5.hi - r5.lo <= 1e-9);
  CHECK(std::abs(r5.mid() - 1.72208) <= 1e-5);
  CHECK(verify_root(kLambda5, 1.72208, 1e-5));
  CHECK(verify_root(kFourProng, 2.15372, 1e-5));
  CHECK(verify_root(kLambda4, 2.29663, 1e-5));
  CHECK(verify_root(kTwoTrigon, 2.01536, 1e-5));
  CHECK_FALSE(verify_root(kLambda5, 1.7, 1e-5));
  // x^2 - 1: largest root exactly 1
  const IntPolynomial sq = IntPolynomial::from_descending({1, 0, -1});
  const RootEnclosure one = largest_real_root(sq, 1e-9);
  CHECK(one.exact);
  CHECK(one.lo == 1.0);
  CHECK(verify_root(sq, 1.0, 1e-9));
  // only the smaller root is near the value
  CHECK_FALSE(verify_root(sq, -1.0, 1e-9));
  CHECK_THROWS_AS(verify_root(kLambda5, 1.72208, 0), DomainError);
  CHECK_THROWS_AS(largest_real_root(IntPolynomial::from_descending({1, 0, 1}), 1e-9), DomainError);
}

TEST_CASE("exact comparison with a bound") {
  CHECK(compare_largest_root(kLambda5, 1.7221) < 0);
  CHECK(compare_largest_root(kLambda5, 1.7220) > 0);
  CHECK(compare_largest_root(IntPolynomial::from_descending({1, -2}), 2.0) == 0);
  CHECK(compare_largest_root(kTwoTrigon, 2.02) < 0);
  CHECK(compare_largest_root(kLambda4, 2.3) < 0);
}

TEST_CASE("Sturm counts agree with companion eigenvalues") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> deg(1, 7);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<BigInt> c(deg(rng) + 1);
    for (auto& x : c) x = coef(rng);
    c.back() = 1;
    const IntPolynomial p(c);
    const IntPolynomial sf = squarefree_part(p);
    const SturmChain s(p);
    for (double x : {-2.5, -0.25, 0.5, 1.75, 3.125}) {
      CHECK(s.count_above(exact_rational(x)) == eigen_real_roots_above(sf, x));
    }
  }
}

TEST_CASE("minimal polynomial") {
  const IntPolynomial xp1 = IntPolynomial::from_descending({1, 1});
  CHECK(minimal_polynomial(xp1 * kFourProng) == kFourProng);
  CHECK(minimal_polynomial(kLambda5 * IntPolynomial::from_descending({1, -1, -1})) == kLambda5);
  CHECK(minimal_polynomial(kTwoTrigon * xp1 * xp1) == kTwoTrigon);
  CHECK(minimal_polynomial(IntPolynomial::from_descending({1, -2}) * xp1) == IntPolynomial::from_descending({1, -2}));
}

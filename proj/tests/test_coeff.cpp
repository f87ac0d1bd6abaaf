#include <catch2/catch_amalgamated.hpp>

#include "plethora/ring.hpp"
#include "test_rng.hpp"

using namespace plethora;

namespace {
const RingSpec z4(2, 2, 1);
const RingSpec z4a2(2, 2, 2);
const RingSpec dflt(2, 12, 12, 4);
}  // namespace

TEST_CASE("binom_conv convention and small values") {
  CHECK(binom_conv(-1, 0, 2, 4) == 0);
  CHECK(binom_conv(4, 2, 2, 1) == 0);   // 6 = 0 mod 2
  CHECK(binom_conv(5, 2, 3, 1) == 1);   // 10 = 1 mod 3
  CHECK(binom_conv(3, 5, 2, 4) == 0);   // m > n
  CHECK(binom_conv(7, -2, 5, 3) == 0);  // m < 0
  CHECK(binom_conv(10, 5, 2, 10) == 252);
  CHECK(binom_conv(0, 0, 2, 4) == 1);
}

TEST_CASE("binom_conv satisfies the Pascal recurrence") {
  for (i64 p : {2, 3, 5}) {
    for (int M : {1, 4}) {
      u64 mod = RingSpec(p, M, 1).modulus();
      for (i64 n = -10; n <= 30; ++n)
        for (i64 m = -10; m <= 30; ++m) {
          u64 lhs = binom_conv(n, m, p, M);
          u64 rhs = add_mod(binom_conv(n - 1, m - 1, p, M), binom_conv(n - 1, m, p, M), mod);
          if (n == 0 && m == 0) continue;  // recurrence base point
          CAPTURE(p, M, n, m);
          REQUIRE(lhs == rhs);
        }
    }
  }
}

TEST_CASE("TruncScalar ring axioms on random elements") {
  TestRng rng(0xC0FFEE);
  for (const RingSpec& spec : {z4a2, dflt, RingSpec(3, 5, 3)}) {
    for (int iter = 0; iter < 300; ++iter) {
      TruncScalar x = rng.scalar(spec), y = rng.scalar(spec), z = rng.scalar(spec);
      REQUIRE((x + y) + z == x + (y + z));
      REQUIRE((x * y) * z == x * (y * z));
      REQUIRE(x * (y + z) == x * y + x * z);
      REQUIRE(x * y == y * x);
      REQUIRE(x * TruncScalar::one(spec) == x);
      REQUIRE(x + (-x) == TruncScalar::zero(spec));
    }
  }
}

TEST_CASE("trunc_invert inverts units") {
  SECTION("paper examples") {
    // 1+a over (Z/4)[a]/(a^2) -> 1+3a
    TruncScalar x = TruncScalar::from_coeffs(z4a2, {1, 1});
    CHECK(trunc_invert(x) == TruncScalar::from_coeffs(z4a2, {1, 3}));
    // 3 over Z/4 -> 3
    CHECK(trunc_invert(TruncScalar::from_int(z4, 3)) == TruncScalar::from_int(z4, 3));
    // a is not a unit
    CHECK_THROWS_AS(trunc_invert(TruncScalar::var_a(z4a2)), NonUnitError);
  }
  SECTION("1000 random units") {
    TestRng rng(42);
    for (const RingSpec& spec : {dflt, RingSpec(3, 6, 4), RingSpec(5, 4, 2)}) {
      for (int iter = 0; iter < 1000; ++iter) {
        TruncScalar x = rng.unit(spec);
        REQUIRE(trunc_invert(x) * x == TruncScalar::one(spec));
      }
    }
  }
}

TEST_CASE("exact_divide") {
  SECTION("factor-out") {
    TruncScalar x = TruncScalar::from_coeffs(z4a2, {2, 2});
    CHECK(exact_divide(x, 2, RingSpec(2, 1, 2)) ==
          TruncScalar::from_coeffs(RingSpec(2, 1, 2), {1, 1}));
  }
  SECTION("2/4 fails") {
    TruncScalar x = TruncScalar::from_int(RingSpec(2, 6, 1), 2);
    CHECK_THROWS_AS(exact_divide(x, 4, RingSpec(2, 3, 1)), NotDivisibleError);
  }
  SECTION("exact_divide(m*x, m) = x for random x") {
    TestRng rng(7);
    for (i64 p : {2, 3, 5}) {
      RingSpec hi(p, 10, 4, 0);
      RingSpec lo(p, 6, 4, 0);
      for (int iter = 0; iter < 200; ++iter) {
        TruncScalar x = rng.scalar(hi);
        i64 m = 1 + rng.next_in(p * p * p);
        REQUIRE(exact_divide(m * x, m, lo) == x.reduce_to(lo));
      }
    }
  }
}

TEST_CASE("reduce_to truncates consistently") {
  TestRng rng(11);
  for (int iter = 0; iter < 100; ++iter) {
    TruncScalar x = rng.scalar(dflt), y = rng.scalar(dflt);
    RingSpec lo(2, 10, 10, 4);
    REQUIRE((x * y).reduce_to(lo) == x.reduce_to(lo) * y.reduce_to(lo));
    REQUIRE((x + y).reduce_to(lo) == x.reduce_to(lo) + y.reduce_to(lo));
  }
}

TEST_CASE("scalar printing is canonical") {
  CHECK(TruncScalar::zero(z4a2).str() == "0");
  CHECK(TruncScalar::from_coeffs(dflt, {3, 2, 1}).str() == "3 + 2*a + a^2");
  CHECK(TruncScalar::var_a(dflt).str() == "a");
}

#pragma once

#include <cassert>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "plethora/errors.hpp"

namespace plethora {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// ---------------------------------------------------------------------------
// RingSpec: the working truncation of the coefficient ring.
//
// All exact arithmetic happens in (Z/p^M)[a]/(a^N).  N = 1 is the ungraded
// base Z/p^M.  `slack` is extra p-adic precision used internally so that the
// exact divisions in the Newton pipelines cannot silently lose bits.
// ---------------------------------------------------------------------------

inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

struct RingSpec {
  i64 p = 2;
  int M = 12;
  int N = 12;
  int slack = 4;

  RingSpec() = default;
  RingSpec(i64 p_, int M_, int N_, int slack_ = 0) : p(p_), M(M_), N(N_), slack(slack_) {
    assert(is_prime_u64(static_cast<u64>(p)));
    assert(M >= 1 && N >= 1 && slack >= 0);
  }

  u64 modulus() const {
    u64 m = 1;
    for (int i = 0; i < M; ++i) m *= static_cast<u64>(p);
    return m;
  }

  // Same p, different truncation orders.
  RingSpec with_precision(int M2, int N2) const { return RingSpec(p, M2, N2, slack); }
  // The flattened base Z/p^M.
  RingSpec base() const { return RingSpec(p, M, 1, slack); }
  // The residue field F_p.
  RingSpec field() const { return RingSpec(p, 1, 1, 0); }

  bool operator==(const RingSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Residue arithmetic mod p^M (moduli fit in 64 bits for everything in scope).
// ---------------------------------------------------------------------------

inline u64 add_mod(u64 a, u64 b, u64 m) { return (a + b) % m; }
inline u64 sub_mod(u64 a, u64 b, u64 m) { return (a + m - b % m) % m; }
inline u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>((u128)a * b % m); }

inline u64 from_int_mod(i64 v, u64 m) {
  i64 r = v % static_cast<i64>(m);
  if (r < 0) r += static_cast<i64>(m);
  return static_cast<u64>(r);
}

inline u64 pow_mod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, a, m);
    a = mul_mod(a, a, m);
    e >>= 1;
  }
  return r;
}

// Inverse of a unit mod m via extended Euclid.
inline u64 inv_mod(u64 a, u64 m) {
  i64 t = 0, newt = 1;
  i64 r = static_cast<i64>(m), newr = static_cast<i64>(a % m);
  while (newr != 0) {
    i64 q = r / newr;
    t = std::exchange(newt, t - q * newt);
    r = std::exchange(newr, r - q * newr);
  }
  if (r != 1) throw NonUnitError("inv_mod: not a unit");
  if (t < 0) t += static_cast<i64>(m);
  return static_cast<u64>(t);
}

// p-adic valuation of a residue; returns cap for 0.
inline int val_p(u64 a, i64 p, int cap) {
  if (a == 0) return cap;
  int v = 0;
  while (v < cap && a % static_cast<u64>(p) == 0) {
    a /= static_cast<u64>(p);
    ++v;
  }
  return v;
}

inline int val_p_int(i64 m, i64 p) {
  assert(m != 0);
  int v = 0;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

inline u64 ipow(u64 b, int e) {
  u64 r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// ---------------------------------------------------------------------------
// binom_conv: integer binomial coefficient mod p^M under the convention that
// it vanishes unless 0 <= m <= n.  This convention is load-bearing: every
// Adem-type relation in the library sums over an a-priori unbounded range and
// relies on it for the cutoff.
// ---------------------------------------------------------------------------

inline u64 binom_conv(i64 n, i64 m, i64 p, int M) {
  if (m < 0 || m > n) return 0;
  u64 mod = RingSpec(p, M, 1).modulus();
  // Multiplicative evaluation of prod_k (n-m+k)/k with p-parts tracked
  // separately so the unit part stays invertible.
  int vp = 0;
  u64 unit = 1 % mod;
  for (i64 k = 1; k <= m; ++k) {
    i64 num = n - m + k, den = k;
    int vn = val_p_int(num, p), vd = val_p_int(den, p);
    vp += vn - vd;
    u64 nu = from_int_mod(num / static_cast<i64>(ipow(static_cast<u64>(p), vn)), mod);
    u64 de = from_int_mod(den / static_cast<i64>(ipow(static_cast<u64>(p), vd)), mod);
    unit = mul_mod(unit, mul_mod(nu, inv_mod(de, mod), mod), mod);
  }
  if (vp >= M) return 0;
  return mul_mod(unit, ipow(static_cast<u64>(p), vp) % mod, mod);
}

// ---------------------------------------------------------------------------
// TruncScalar: an element of (Z/p^M)[a]/(a^N).
// ---------------------------------------------------------------------------

class TruncScalar {
 public:
  TruncScalar() = default;
  explicit TruncScalar(const RingSpec& spec) : spec_(spec), c_(spec.N, 0) {}

  static TruncScalar zero(const RingSpec& spec) { return TruncScalar(spec); }

  static TruncScalar from_int(const RingSpec& spec, i64 v) {
    TruncScalar x(spec);
    x.c_[0] = from_int_mod(v, spec.modulus());
    return x;
  }

  static TruncScalar one(const RingSpec& spec) { return from_int(spec, 1); }

  // The generator a (zero when N = 1, since a^1 = 0 there).
  static TruncScalar var_a(const RingSpec& spec) {
    TruncScalar x(spec);
    if (spec.N > 1) x.c_[1] = 1;
    return x;
  }

  static TruncScalar from_coeffs(const RingSpec& spec, std::vector<i64> coeffs) {
    TruncScalar x(spec);
    u64 mod = spec.modulus();
    for (std::size_t j = 0; j < coeffs.size() && j < static_cast<std::size_t>(spec.N); ++j)
      x.c_[j] = from_int_mod(coeffs[j], mod);
    return x;
  }

  const RingSpec& spec() const { return spec_; }
  const std::vector<u64>& coeffs() const { return c_; }
  u64 coeff(int j) const { return j < spec_.N ? c_[j] : 0; }

  bool is_zero() const {
    for (u64 v : c_)
      if (v) return false;
    return true;
  }

  bool is_unit() const { return c_[0] % static_cast<u64>(spec_.p) != 0; }

  friend TruncScalar operator+(const TruncScalar& x, const TruncScalar& y) {
    assert(x.spec_ == y.spec_);
    TruncScalar r(x.spec_);
    u64 mod = x.spec_.modulus();
    for (int j = 0; j < x.spec_.N; ++j) r.c_[j] = add_mod(x.c_[j], y.c_[j], mod);
    return r;
  }

  friend TruncScalar operator-(const TruncScalar& x, const TruncScalar& y) {
    assert(x.spec_ == y.spec_);
    TruncScalar r(x.spec_);
    u64 mod = x.spec_.modulus();
    for (int j = 0; j < x.spec_.N; ++j) r.c_[j] = sub_mod(x.c_[j], y.c_[j], mod);
    return r;
  }

  TruncScalar operator-() const {
    TruncScalar r(spec_);
    u64 mod = spec_.modulus();
    for (int j = 0; j < spec_.N; ++j) r.c_[j] = sub_mod(0, c_[j], mod);
    return r;
  }

  friend TruncScalar operator*(const TruncScalar& x, const TruncScalar& y) {
    assert(x.spec_ == y.spec_);
    TruncScalar r(x.spec_);
    u64 mod = x.spec_.modulus();
    for (int i = 0; i < x.spec_.N; ++i) {
      if (!x.c_[i]) continue;
      for (int j = 0; i + j < x.spec_.N; ++j) {
        if (!y.c_[j]) continue;
        r.c_[i + j] = add_mod(r.c_[i + j], mul_mod(x.c_[i], y.c_[j], mod), mod);
      }
    }
    return r;
  }

  friend TruncScalar operator*(i64 k, const TruncScalar& x) {
    return TruncScalar::from_int(x.spec_, k) * x;
  }

  TruncScalar& operator+=(const TruncScalar& y) { return *this = *this + y; }
  TruncScalar& operator-=(const TruncScalar& y) { return *this = *this - y; }
  TruncScalar& operator*=(const TruncScalar& y) { return *this = *this * y; }

  bool operator==(const TruncScalar& y) const { return spec_ == y.spec_ && c_ == y.c_; }

  TruncScalar pow(int e) const {
    TruncScalar r = one(spec_), b = *this;
    while (e) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  // Inverse of a unit: invert the constant term exactly, then Newton-lift
  // away the nilpotent a-part.
  TruncScalar inverse() const {
    if (!is_unit()) throw NonUnitError("trunc_invert: constant term " + std::to_string(c_[0]) +
                                       " not coprime to p");
    TruncScalar y = from_int(spec_, 0);
    y.c_[0] = inv_mod(c_[0], spec_.modulus());
    TruncScalar two = from_int(spec_, 2);
    for (int n = 1; n < 2 * spec_.N; n *= 2) y = y * (two - *this * y);
    return y;
  }

  // Truncate to a coarser precision (M2 <= M, N2 <= N).
  TruncScalar reduce_to(const RingSpec& target) const {
    assert(target.p == spec_.p && target.M <= spec_.M && target.N <= spec_.N);
    TruncScalar r(target);
    u64 mod = target.modulus();
    for (int j = 0; j < target.N; ++j) r.c_[j] = c_[j] % mod;
    return r;
  }

  // Canonical human-readable form, e.g. "3 + 2*a + a^2"; "0" for zero.
  std::string str() const {
    std::ostringstream os;
    bool first = true;
    for (int j = 0; j < spec_.N; ++j) {
      if (!c_[j]) continue;
      if (!first) os << " + ";
      first = false;
      if (j == 0) {
        os << c_[j];
      } else {
        if (c_[j] != 1) os << c_[j] << "*";
        os << "a";
        if (j > 1) os << "^" << j;
      }
    }
    if (first) os << "0";
    return os.str();
  }

 private:
  RingSpec spec_{};
  std::vector<u64> c_;
};

// ---------------------------------------------------------------------------
// exact_divide: divide x (carried at precision M + S) by a nonzero integer m,
// delivering the quotient at the coarser target precision.  Division is
// checked coefficientwise for divisibility by p^{v_p(m)} before dividing by
// the unit part of m.
// ---------------------------------------------------------------------------

// Quotient within the same precision object.  The quotient by m is only
// determined mod p^{M - v_p(m)}; the representative returned here satisfies
// q*m = x exactly at precision M, and callers truncate before reporting.
inline TruncScalar exact_divide_keep(const TruncScalar& x, i64 m) {
  assert(m != 0);
  const RingSpec& spec = x.spec();
  i64 p = spec.p;
  int v = val_p_int(m, p);
  if (v > spec.M)
    throw NotDivisibleError("exact_divide: v_p(m) exceeds working precision");
  u64 mod = spec.modulus();
  u64 pv = ipow(static_cast<u64>(p), v);
  i64 unit_part = m;
  for (int i = 0; i < v; ++i) unit_part /= p;
  u64 unit_inv = inv_mod(from_int_mod(unit_part, mod), mod);

  std::vector<i64> qc(spec.N, 0);
  for (int j = 0; j < spec.N; ++j) {
    u64 c = x.coeff(j);
    if (c % pv != 0)
      throw NotDivisibleError("exact_divide: coefficient of a^" + std::to_string(j) +
                              " not divisible by p^" + std::to_string(v));
    qc[j] = static_cast<i64>(mul_mod(c / pv, unit_inv, mod));
  }
  return TruncScalar::from_coeffs(spec, qc);
}

inline TruncScalar exact_divide(const TruncScalar& x, i64 m, const RingSpec& target) {
  const RingSpec& spec = x.spec();
  assert(target.p == spec.p && target.N <= spec.N);
  int v = val_p_int(m, spec.p);
  if (spec.M - v < target.M)
    throw NotDivisibleError("exact_divide: insufficient slack for v_p(m)=" + std::to_string(v));
  return exact_divide_keep(x, m).reduce_to(target);
}

inline TruncScalar trunc_invert(const TruncScalar& x) { return x.inverse(); }

}  // namespace plethora

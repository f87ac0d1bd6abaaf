#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plethora/ring.hpp"

namespace plethora {

// ---------------------------------------------------------------------------
// FlatMatrix: dense matrix over Z/p^M.  Vectors are rows and matrices act on
// the right (y = x * m), so "span" always means row span.
// ---------------------------------------------------------------------------

struct FlatMatrix {
  RingSpec spec;  // N forced to 1
  int rows = 0;
  int cols = 0;
  std::vector<u64> e;

  FlatMatrix() = default;
  FlatMatrix(const RingSpec& s, int r, int c) : spec(s.base()), rows(r), cols(c), e(static_cast<std::size_t>(r) * c, 0) {}

  u64& at(int i, int j) { return e[static_cast<std::size_t>(i) * cols + j]; }
  u64 at(int i, int j) const { return e[static_cast<std::size_t>(i) * cols + j]; }

  static FlatMatrix identity(const RingSpec& s, int n) {
    FlatMatrix m(s, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  std::vector<u64> row(int i) const {
    return std::vector<u64>(e.begin() + static_cast<std::size_t>(i) * cols,
                            e.begin() + static_cast<std::size_t>(i + 1) * cols);
  }

  bool operator==(const FlatMatrix&) const = default;
};

inline FlatMatrix flat_mul(const FlatMatrix& a, const FlatMatrix& b) {
  assert(a.cols == b.rows && a.spec == b.spec);
  u64 mod = a.spec.modulus();
  FlatMatrix r(a.spec, a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      u64 aik = a.at(i, k);
      if (!aik) continue;
      for (int j = 0; j < b.cols; ++j)
        r.at(i, j) = add_mod(r.at(i, j), mul_mod(aik, b.at(k, j), mod), mod);
    }
  return r;
}

// ---------------------------------------------------------------------------
// Howell normal form.  The canonical representative of a row span over
// Z/p^M: pivots strictly right-moving, each pivot a power of p, entries
// above a pivot reduced mod that pivot, and the row set saturated (for each
// pivot p^v with v > 0 the shifted row p^{M-v} * r is again in the span of
// the later rows).  Two matrices have equal row spans iff their Howell forms
// are identical, and the saturation property makes kernel extraction by
// column blocks valid.
// ---------------------------------------------------------------------------

struct HowellBasis {
  RingSpec spec;
  FlatMatrix rows;                // the Howell form
  std::vector<int> pivot_col;     // per row
  std::vector<int> pivot_val;     // v where pivot = p^v

  bool operator==(const HowellBasis& o) const { return spec == o.spec && rows.e == o.rows.e && rows.cols == o.rows.cols && rows.rows == o.rows.rows; }
};

inline HowellBasis howell_form(const FlatMatrix& m) {
  const RingSpec spec = m.spec.base();
  const u64 mod = spec.modulus();
  const i64 p = spec.p;
  const int cols = m.cols;

  std::vector<std::vector<u64>> pool;
  pool.reserve(m.rows);
  for (int i = 0; i < m.rows; ++i) pool.push_back(m.row(i));

  std::vector<std::vector<u64>> done;
  std::vector<int> piv_col, piv_val;

  for (int col = 0; col < cols; ++col) {
    // Pivot: minimal valuation in this column, ties by lowest row index.
    int best = -1, bestv = spec.M;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i][col] == 0) continue;
      int v = val_p(pool[i][col], p, spec.M);
      if (v < bestv) {
        bestv = v;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) continue;

    std::vector<u64> r = pool[best];
    pool.erase(pool.begin() + best);
    // Normalize pivot to p^v.
    u64 pv = ipow(static_cast<u64>(p), bestv);
    u64 unit = r[col] / pv;
    u64 uinv = inv_mod(unit % mod, mod);
    for (int j = col; j < cols; ++j) r[j] = mul_mod(r[j], uinv, mod);
    // Eliminate below.
    for (auto& s : pool) {
      if (s[col] == 0) continue;
      u64 q = s[col] / pv;
      for (int j = col; j < cols; ++j) s[j] = sub_mod(s[j], mul_mod(q, r[j], mod), mod);
    }
    // Saturation row keeps the span closed under the Howell property.
    if (bestv > 0) {
      u64 shift = ipow(static_cast<u64>(p), spec.M - bestv) % mod;
      std::vector<u64> sat(cols, 0);
      bool nonzero = false;
      for (int j = col; j < cols; ++j) {
        sat[j] = mul_mod(shift, r[j], mod);
        if (sat[j]) nonzero = true;
      }
      if (nonzero) pool.push_back(std::move(sat));
    }
    done.push_back(std::move(r));
    piv_col.push_back(col);
    piv_val.push_back(bestv);
  }

  // Reduce entries above each pivot mod that pivot.
  for (std::size_t i = 0; i < done.size(); ++i) {
    u64 pv = ipow(static_cast<u64>(p), piv_val[i]);
    for (std::size_t k = 0; k < i; ++k) {
      u64 e = done[k][piv_col[i]];
      if (e < pv) continue;
      u64 q = e / pv;
      for (int j = piv_col[i]; j < cols; ++j)
        done[k][j] = sub_mod(done[k][j], mul_mod(q, done[i][j], mod), mod);
    }
  }

  HowellBasis h;
  h.spec = spec;
  h.rows = FlatMatrix(spec, static_cast<int>(done.size()), cols);
  for (std::size_t i = 0; i < done.size(); ++i)
    for (int j = 0; j < cols; ++j) h.rows.at(static_cast<int>(i), j) = done[i][j];
  h.pivot_col = piv_col;
  h.pivot_val = piv_val;
  return h;
}

// ---------------------------------------------------------------------------
// solve_in_span: express b in the row span by pivotwise reduction.  The
// reduction residue is zero iff membership holds; on failure the residue is
// the witness.
// ---------------------------------------------------------------------------

struct SolveResult {
  bool ok = false;
  std::vector<u64> coeffs;   // one per Howell row
  std::vector<u64> residue;  // nonzero witness when !ok
};

inline SolveResult solve_in_span(std::vector<u64> b, const HowellBasis& h) {
  const u64 mod = h.spec.modulus();
  const i64 p = h.spec.p;
  assert(static_cast<int>(b.size()) == h.rows.cols);
  SolveResult res;
  res.coeffs.assign(h.rows.rows, 0);
  for (int i = 0; i < h.rows.rows; ++i) {
    int col = h.pivot_col[i];
    u64 e = b[col] % mod;
    if (e == 0) continue;
    u64 pv = ipow(static_cast<u64>(p), h.pivot_val[i]);
    if (e % pv != 0) break;  // cannot clear this pivot; residue stays
    u64 q = e / pv;
    res.coeffs[i] = q;
    for (int j = col; j < h.rows.cols; ++j) b[j] = sub_mod(b[j], mul_mod(q, h.rows.at(i, j), mod), mod);
  }
  res.ok = std::all_of(b.begin(), b.end(), [](u64 v) { return v == 0; });
  res.residue = std::move(b);
  if (res.ok) res.residue.clear();
  return res;
}

inline bool in_span(const std::vector<u64>& b, const HowellBasis& h) {
  return solve_in_span(b, h).ok;
}

// ---------------------------------------------------------------------------
// kernel_basis: Howell basis of the left kernel {x : x*m = 0}, read off the
// zero block of the Howell form of [m | I].  Correct because of the Howell
// saturation property.
// ---------------------------------------------------------------------------

inline HowellBasis kernel_basis(const FlatMatrix& m) {
  const RingSpec spec = m.spec.base();
  FlatMatrix aug(spec, m.rows, m.cols + m.rows);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, m.cols + i) = 1;
  }
  HowellBasis h = howell_form(aug);
  std::vector<std::vector<u64>> keep;
  for (int i = 0; i < h.rows.rows; ++i) {
    if (h.pivot_col[i] < m.cols) continue;  // touches the m block
    std::vector<u64> full = h.rows.row(i);
    keep.emplace_back(full.begin() + m.cols, full.end());
  }
  FlatMatrix km(spec, static_cast<int>(keep.size()), m.rows);
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (int j = 0; j < m.rows; ++j) km.at(static_cast<int>(i), j) = keep[i][j];
  return howell_form(km);
}

// log_p of the number of elements of the row span.
inline int span_size_exponent(const HowellBasis& h) {
  int s = 0;
  for (int v : h.pivot_val) s += h.spec.M - v;
  return s;
}

// ---------------------------------------------------------------------------
// Matrices over the truncated ring, and flattening to Z/p^M.  Flatten
// replaces each scalar by the N x N matrix of multiplication on the basis
// 1, a, ..., a^{N-1}; it is a ring map on square matrices, and the flattened
// row span of a TruncMatrix equals the flattening of its R-row-span, so all
// span questions over R reduce losslessly to Z/p^M.
// ---------------------------------------------------------------------------

struct TruncMatrix {
  RingSpec spec;
  int rows = 0;
  int cols = 0;
  std::vector<TruncScalar> e;

  TruncMatrix() = default;
  TruncMatrix(const RingSpec& s, int r, int c)
      : spec(s), rows(r), cols(c), e(static_cast<std::size_t>(r) * c, TruncScalar::zero(s)) {}

  TruncScalar& at(int i, int j) { return e[static_cast<std::size_t>(i) * cols + j]; }
  const TruncScalar& at(int i, int j) const { return e[static_cast<std::size_t>(i) * cols + j]; }

  static TruncMatrix identity(const RingSpec& s, int n) {
    TruncMatrix m(s, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = TruncScalar::one(s);
    return m;
  }

  TruncMatrix reduce_to(const RingSpec& target) const {
    TruncMatrix r(target, rows, cols);
    for (std::size_t k = 0; k < e.size(); ++k) r.e[k] = e[k].reduce_to(target);
    return r;
  }

  bool operator==(const TruncMatrix&) const = default;
};

inline TruncMatrix trunc_mul(const TruncMatrix& a, const TruncMatrix& b) {
  assert(a.cols == b.rows && a.spec == b.spec);
  TruncMatrix r(a.spec, a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      if (a.at(i, k).is_zero()) continue;
      for (int j = 0; j < b.cols; ++j) r.at(i, j) += a.at(i, k) * b.at(k, j);
    }
  return r;
}

inline FlatMatrix flatten(const TruncMatrix& m) {
  const int N = m.spec.N;
  FlatMatrix f(m.spec.base(), m.rows * N, m.cols * N);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) {
      const TruncScalar& s = m.at(i, j);
      for (int k = 0; k < N; ++k)
        for (int l = k; l < N; ++l) f.at(i * N + k, j * N + l) = s.coeff(l - k);
    }
  return f;
}

// Flatten an R-row-vector to a Z/p^M vector (a-degree-major within each coordinate).
inline std::vector<u64> flatten_vector(const std::vector<TruncScalar>& v, const RingSpec& spec) {
  std::vector<u64> f(v.size() * static_cast<std::size_t>(spec.N), 0);
  for (std::size_t j = 0; j < v.size(); ++j)
    for (int l = 0; l < spec.N; ++l) f[j * spec.N + l] = v[j].coeff(l);
  return f;
}

inline std::vector<TruncScalar> unflatten_vector(const std::vector<u64>& f, const RingSpec& spec) {
  std::size_t n = f.size() / static_cast<std::size_t>(spec.N);
  std::vector<TruncScalar> v;
  v.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<i64> c(spec.N);
    for (int l = 0; l < spec.N; ++l) c[l] = static_cast<i64>(f[j * spec.N + l]);
    v.push_back(TruncScalar::from_coeffs(spec, c));
  }
  return v;
}

// Howell form of the flattened R-row-span.  The canonical object for
// submodule equality over the truncated ring.
inline HowellBasis r_span_howell(const TruncMatrix& m) { return howell_form(flatten(m)); }

inline bool spans_equal(const TruncMatrix& a, const TruncMatrix& b) {
  return r_span_howell(a) == r_span_howell(b);
}

// ---------------------------------------------------------------------------
// Module presentations: cokernel of a relation matrix on a labeled free
// module over the truncated ring.
// ---------------------------------------------------------------------------

struct ModulePresentation {
  RingSpec spec;
  std::vector<std::string> gens;
  TruncMatrix relations;  // rows = relations in the generators
};

inline ModulePresentation cokernel_presentation(const TruncMatrix& d,
                                                std::vector<std::string> target_gens) {
  assert(static_cast<std::size_t>(d.cols) == target_gens.size());
  return ModulePresentation{d.spec, std::move(target_gens), d};
}

// Minimal presentation over the local ring: repeatedly eliminate a generator
// that appears in some relation with unit coefficient (first such unit in
// row-major order), substituting into the other relations.  Over a local
// ring this terminates in a presentation all of whose relation entries lie
// in the maximal ideal; the surviving generator count is the minimal number
// of generators.
inline ModulePresentation minimal_presentation(const ModulePresentation& pres) {
  std::vector<std::string> gens = pres.gens;
  std::vector<std::vector<TruncScalar>> rel;
  for (int i = 0; i < pres.relations.rows; ++i) {
    std::vector<TruncScalar> row;
    for (int j = 0; j < pres.relations.cols; ++j) row.push_back(pres.relations.at(i, j));
    rel.push_back(std::move(row));
  }

  for (;;) {
    int ri = -1, cj = -1;
    for (std::size_t i = 0; i < rel.size() && ri < 0; ++i)
      for (std::size_t j = 0; j < gens.size(); ++j)
        if (rel[i][j].is_unit()) {
          ri = static_cast<int>(i);
          cj = static_cast<int>(j);
          break;
        }
    if (ri < 0) break;
    TruncScalar inv = rel[ri][cj].inverse();
    std::vector<TruncScalar> pivot = rel[ri];
    for (std::size_t i = 0; i < rel.size(); ++i) {
      if (static_cast<int>(i) == ri || rel[i][cj].is_zero()) continue;
      TruncScalar f = rel[i][cj] * inv;
      for (std::size_t j = 0; j < gens.size(); ++j) rel[i][j] -= f * pivot[j];
    }
    rel.erase(rel.begin() + ri);
    for (auto& row : rel) row.erase(row.begin() + cj);
    gens.erase(gens.begin() + cj);
  }

  // Drop zero relation rows.
  std::vector<std::vector<TruncScalar>> keep;
  for (auto& row : rel)
    if (!std::all_of(row.begin(), row.end(), [](const TruncScalar& s) { return s.is_zero(); }))
      keep.push_back(row);

  ModulePresentation out;
  out.spec = pres.spec;
  out.gens = gens;
  out.relations = TruncMatrix(pres.spec, static_cast<int>(keep.size()), static_cast<int>(gens.size()));
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < gens.size(); ++j) out.relations.at(static_cast<int>(i), static_cast<int>(j)) = keep[i][j];
  return out;
}

// The canonicalized variant: the Howell form of the flattened relation span.
inline HowellBasis canonical_relations(const ModulePresentation& pres) {
  return r_span_howell(pres.relations);
}

// log_p of the number of elements of the presented module.
inline int presentation_size_exponent(const ModulePresentation& pres) {
  int total = pres.spec.M * pres.spec.N * static_cast<int>(pres.gens.size());
  return total - span_size_exponent(r_span_howell(pres.relations));
}

inline bool presentation_is_zero(const ModulePresentation& pres) {
  return presentation_size_exponent(pres) == 0;
}

// Isomorphism test via minimal presentations: generator label sets must
// match, and the canonicalized relation spans (columns reordered by label)
// must coincide.  Sufficient for the pipelines here, where both sides
// present on the same generator labels.
inline bool presentations_isomorphic(const ModulePresentation& a, const ModulePresentation& b) {
  ModulePresentation ma = minimal_presentation(a), mb = minimal_presentation(b);
  std::vector<std::string> la = ma.gens, lb = mb.gens;
  std::sort(la.begin(), la.end());
  std::sort(lb.begin(), lb.end());
  if (la != lb) return false;

  auto reorder = [&](const ModulePresentation& m, const std::vector<std::string>& order) {
    TruncMatrix r(m.spec, m.relations.rows, m.relations.cols);
    for (std::size_t jnew = 0; jnew < order.size(); ++jnew) {
      auto it = std::find(m.gens.begin(), m.gens.end(), order[jnew]);
      int jold = static_cast<int>(it - m.gens.begin());
      for (int i = 0; i < m.relations.rows; ++i) r.at(i, static_cast<int>(jnew)) = m.relations.at(i, jold);
    }
    return r;
  };
  return howell_form(flatten(reorder(ma, la))) == howell_form(flatten(reorder(mb, la)));
}

}  // namespace plethora

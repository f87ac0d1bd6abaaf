#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "plethora/dyer_lashof.hpp"
#include "plethora/linalg.hpp"

namespace plethora {

// ---------------------------------------------------------------------------
// Finitely-free bimodules over the truncated coefficient ring.  The module
// is free on one side; the action of the base variable `a` from the other
// side is a matrix rule:
//
//   free_left:   g_i . a = sum_j action(i,j) g_j     (coefficients on the left)
//   !free_left:  a . g_i = sum_j g_j . action(i,j)   (coefficients on the right)
//
// Witt constants are central (residue field F_p, so the Frobenius twist is
// the identity), so the rule for `a` determines the whole opposite action.
// ---------------------------------------------------------------------------

struct GeneratorBimodule {
  RingSpec spec;
  std::vector<std::string> labels;
  TruncMatrix action;
  bool free_left = true;

  int rank() const { return static_cast<int>(labels.size()); }

  // Matrix of the opposite-side action of an arbitrary scalar.
  TruncMatrix action_of(const TruncScalar& c) const {
    int k = rank();
    TruncMatrix m(spec, k, k);
    TruncMatrix apow = TruncMatrix::identity(spec, k);
    for (int l = 0; l < spec.N; ++l) {
      if (c.coeff(l)) {
        TruncScalar cl = TruncScalar::from_int(spec, static_cast<i64>(c.coeff(l)));
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) m.at(i, j) += cl * apow.at(i, j);
      }
      if (l + 1 < spec.N) apow = trunc_mul(apow, action);
    }
    return m;
  }
};

// Elements of H^{on} as dense coordinate vectors over the k^n word basis,
// index big-endian (first letter most significant).  Coordinates sit on the
// free side; the utilities below keep them there.
using TensorVec = std::vector<TruncScalar>;

inline std::size_t word_count(int k, int n) {
  std::size_t c = 1;
  for (int i = 0; i < n; ++i) c *= static_cast<std::size_t>(k);
  return c;
}

inline TensorVec tensor_zero(const RingSpec& spec, int k, int n) {
  return TensorVec(word_count(k, n), TruncScalar::zero(spec));
}

// Multiply an element of H^{on} by a scalar entering from the non-free side,
// migrating it across the letters to the free side.  For a left-free
// bimodule the scalar enters right of the last letter; peel that letter with
// the action matrix and recurse.  Mirrored for right-free.
inline TensorVec tensor_migrate(const GeneratorBimodule& H, const TensorVec& v, int n,
                                const TruncScalar& c) {
  int k = H.rank();
  if (c.is_zero()) return tensor_zero(H.spec, k, n);
  if (n == 0) return {v[0] * c};
  TruncMatrix act = H.action_of(c);
  TensorVec out = tensor_zero(H.spec, k, n);
  std::size_t inner = word_count(k, n - 1);
  for (int i = 0; i < k; ++i) {
    TensorVec slice = tensor_zero(H.spec, k, n - 1);
    bool nonzero = false;
    for (std::size_t w = 0; w < inner; ++w) {
      slice[w] = H.free_left ? v[w * k + i] : v[static_cast<std::size_t>(i) * inner + w];
      nonzero = nonzero || !slice[w].is_zero();
    }
    if (!nonzero) continue;
    for (int j = 0; j < k; ++j) {
      if (act.at(i, j).is_zero()) continue;
      TensorVec moved = tensor_migrate(H, slice, n - 1, act.at(i, j));
      for (std::size_t w = 0; w < inner; ++w) {
        if (H.free_left)
          out[w * k + j] += moved[w];
        else
          out[static_cast<std::size_t>(j) * inner + w] += moved[w];
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quadratic data and graded pieces T_n(H, R).
// ---------------------------------------------------------------------------

struct QuadraticDatum {
  GeneratorBimodule H;
  std::vector<TensorVec> relations;  // elements of H^{o2}, free-side coordinates
};

// Scalar migration can collapse high a-degrees to low ones (the action
// matrices have unit constant entries), so a-adic truncation of
// intermediates corrupts low coefficients.  Honest values are polynomials of
// bounded degree; data must therefore be built at a working width generous
// enough that no migration chain overflows it, and reduced on output.  The
// per-letter degree growth is bounded by the top a-degree of the action
// matrix (2 for the height-2 data).
inline RingSpec widened(const RingSpec& spec, int extra_width) {
  return RingSpec(spec.p, spec.M, spec.N + extra_width, spec.slack);
}

struct GradePiece {
  int n = 0;
  std::vector<int> basis_words;        // indices into the k^n word basis
  std::map<int, TensorVec> reduction;  // eliminated word -> basis-supported expression
};

namespace detail {

// w_left (x) rho (x) w_right with the relation's coordinates migrated out to
// the free side.
inline TensorVec embed_relation(const QuadraticDatum& q, int n, int pos, const TensorVec& rho,
                                std::size_t w_left, std::size_t w_right) {
  int k = q.H.rank();
  int left_len = pos, right_len = n - pos - 2;
  TensorVec out = tensor_zero(q.H.spec, k, n);
  std::size_t right_count = word_count(k, right_len);
  for (int ab = 0; ab < k * k; ++ab) {
    const TruncScalar& c = rho[static_cast<std::size_t>(ab)];
    if (c.is_zero()) continue;
    if (q.H.free_left) {
      TensorVec lvec = tensor_zero(q.H.spec, k, left_len);
      lvec[w_left] = TruncScalar::one(q.H.spec);
      TensorVec moved = tensor_migrate(q.H, lvec, left_len, c);
      for (std::size_t wl = 0; wl < moved.size(); ++wl) {
        if (moved[wl].is_zero()) continue;
        std::size_t idx =
            (wl * static_cast<std::size_t>(k * k) + static_cast<std::size_t>(ab)) * right_count +
            w_right;
        out[idx] += moved[wl];
      }
    } else {
      TensorVec rvec = tensor_zero(q.H.spec, k, right_len);
      rvec[w_right] = TruncScalar::one(q.H.spec);
      TensorVec moved = tensor_migrate(q.H, rvec, right_len, c);
      for (std::size_t wr = 0; wr < moved.size(); ++wr) {
        if (moved[wr].is_zero()) continue;
        std::size_t idx =
            (w_left * static_cast<std::size_t>(k * k) + static_cast<std::size_t>(ab)) * right_count +
            wr;
        out[idx] += moved[wr];
      }
    }
  }
  return out;
}

}  // namespace detail

// T_n(H, R) = coker(sum H^{i-1} o R o H^{j-1} -> H^{on}).  Computed by
// unit-pivot elimination; a leftover relation with all entries in the
// maximal ideal means the relation span is not levelwise split.
inline GradePiece grade_piece(const QuadraticDatum& q, int n) {
  int k = q.H.rank();
  GradePiece piece;
  piece.n = n;
  std::size_t words = word_count(k, n);

  if (n < 2 || q.relations.empty()) {
    for (std::size_t w = 0; w < words; ++w) piece.basis_words.push_back(static_cast<int>(w));
    return piece;
  }

  std::vector<TensorVec> rows;
  for (int pos = 0; pos + 2 <= n; ++pos) {
    std::size_t lc = word_count(k, pos), rc = word_count(k, n - pos - 2);
    for (std::size_t wl = 0; wl < lc; ++wl)
      for (std::size_t wr = 0; wr < rc; ++wr)
        for (const TensorVec& rho : q.relations)
          rows.push_back(detail::embed_relation(q, n, pos, rho, wl, wr));
  }

  std::vector<bool> eliminated(words, false);
  std::vector<std::pair<int, TensorVec>> subs;  // in elimination order
  for (;;) {
    int ri = -1, cj = -1;
    for (std::size_t i = 0; i < rows.size() && ri < 0; ++i)
      for (std::size_t j = 0; j < words; ++j)
        if (rows[i][j].is_unit()) {
          ri = static_cast<int>(i);
          cj = static_cast<int>(j);
          break;
        }
    if (ri < 0) break;
    TruncScalar inv = rows[ri][cj].inverse();
    TensorVec expr = tensor_zero(q.H.spec, k, n);
    for (std::size_t j = 0; j < words; ++j)
      if (static_cast<int>(j) != cj) expr[j] = -(inv * rows[ri][j]);
    eliminated[cj] = true;
    subs.push_back({cj, expr});
    TensorVec pivot = rows[ri];
    rows.erase(rows.begin() + ri);
    for (auto& row : rows) {
      if (row[cj].is_zero()) continue;
      TruncScalar f = row[cj] * inv;
      for (std::size_t j = 0; j < words; ++j) row[j] -= f * pivot[j];
    }
  }
  for (const auto& row : rows)
    if (!std::all_of(row.begin(), row.end(), [](const TruncScalar& s) { return s.is_zero(); }))
      throw SplittingFailureError("relation span not levelwise split in weight " +
                                  std::to_string(n));

  for (std::size_t w = 0; w < words; ++w)
    if (!eliminated[w]) piece.basis_words.push_back(static_cast<int>(w));

  // Substitutions are reduced against relations not yet applied at the time
  // they were created; expand from the last one backwards so each becomes
  // basis-supported.
  for (auto it = subs.rbegin(); it != subs.rend(); ++it) {
    TensorVec& expr = it->second;
    for (auto jt = subs.rbegin(); jt != it; ++jt) {
      const auto& [col2, expr2] = *jt;
      if (expr[col2].is_zero()) continue;
      TruncScalar f = expr[col2];
      expr[col2] = TruncScalar::zero(q.H.spec);
      for (std::size_t j = 0; j < words; ++j) expr[j] += f * expr2[j];
    }
  }
  for (auto& [col, expr] : subs) piece.reduction[col] = expr;
  return piece;
}

// Reduce an arbitrary H^{on} element to T_n basis coordinates.
inline std::vector<TruncScalar> reduce_to_basis(const QuadraticDatum& q, const GradePiece& piece,
                                                const TensorVec& v) {
  std::size_t words = word_count(q.H.rank(), piece.n);
  TensorVec full = v;
  for (std::size_t w = 0; w < words; ++w) {
    auto it = piece.reduction.find(static_cast<int>(w));
    if (it == piece.reduction.end() || full[w].is_zero()) continue;
    TruncScalar f = full[w];
    full[w] = TruncScalar::zero(q.H.spec);
    for (std::size_t j = 0; j < words; ++j) full[j] += f * it->second[j];
  }
  std::vector<TruncScalar> out;
  out.reserve(piece.basis_words.size());
  for (int b : piece.basis_words) out.push_back(full[static_cast<std::size_t>(b)]);
  return out;
}

inline int grade_piece_rank(const QuadraticDatum& q, int n) {
  return static_cast<int>(grade_piece(q, n).basis_words.size());
}

// ---------------------------------------------------------------------------
// Quadratic duality.  The dual bimodule is free on the opposite side with
// the transposed action rule; R-perp is the annihilator of R under
// theta(f (x) f')(h' (x) h) = f'(h' . f(h)), i.e. on basis words
// <q^a q^b, g_c g_d> = delta_{ad} delta_{bc}.
// ---------------------------------------------------------------------------

inline QuadraticDatum quadratic_dual(const QuadraticDatum& q,
                                     const std::string& label_suffix = "^") {
  int k = q.H.rank();
  const RingSpec& spec = q.H.spec;
  grade_piece(q, 2);  // splitness check; throws SplittingFailureError

  QuadraticDatum dual;
  dual.H.spec = spec;
  dual.H.free_left = !q.H.free_left;
  for (const std::string& l : q.H.labels) dual.H.labels.push_back(l + label_suffix);
  dual.H.action = TruncMatrix(spec, k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) dual.H.action.at(i, j) = q.H.action.at(j, i);

  // pairing matrix: row (a,b) of the unknown, column t of the relation
  int T = static_cast<int>(q.relations.size());
  TruncMatrix M(spec, k * k, std::max(T, 1));
  for (int t = 0; t < T; ++t)
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        M.at(a * k + b, t) = q.relations[static_cast<std::size_t>(t)][static_cast<std::size_t>(b) * k + a];
  HowellBasis ker = kernel_basis(flatten(M));
  for (int i = 0; i < ker.rows.rows; ++i)
    dual.relations.push_back(unflatten_vector(ker.rows.row(i), spec));
  return dual;
}

// ---------------------------------------------------------------------------
// The reduced bar complex with trivial coefficients, one weight at a time:
//   C_n[m] = (+) over compositions m_1+...+m_n = m, m_i >= 1, of
//            T_{m_1} o ... o T_{m_n},
//   d = sum_{i=1}^{n-1} (-1)^i (multiply letters i, i+1).
// This is the workhorse behind the Koszulity diagnostic and the cobar Ext
// oracle (its transpose).
// ---------------------------------------------------------------------------

struct BarTuple {
  std::vector<std::pair<int, int>> slots;  // (weight, index into that piece's basis)
  auto operator<=>(const BarTuple&) const = default;
};

struct BarWeight {
  int m = 0;
  std::map<int, std::vector<BarTuple>> basis;  // n -> tuples
  std::map<int, TruncMatrix> d;                // n -> matrix of d_n : C_n -> C_{n-1}
};

class BarComplex {
 public:
  BarComplex(const QuadraticDatum& q, int m_max) : q_(q) {
    for (int m = 1; m <= m_max; ++m) pieces_[m] = grade_piece(q, m);
  }

  const QuadraticDatum& datum() const { return q_; }
  const GradePiece& piece(int m) const { return pieces_.at(m); }

  // multiply two piece basis words, returning T_{m1+m2} basis coordinates
  std::vector<TruncScalar> multiply(int m1, int b1, int m2, int b2) const {
    const GradePiece& p1 = pieces_.at(m1);
    const GradePiece& p2 = pieces_.at(m2);
    const GradePiece& p12 = pieces_.at(m1 + m2);
    int k = q_.H.rank();
    std::size_t w1 = static_cast<std::size_t>(p1.basis_words[static_cast<std::size_t>(b1)]);
    std::size_t w2 = static_cast<std::size_t>(p2.basis_words[static_cast<std::size_t>(b2)]);
    std::size_t concat = w1 * word_count(k, m2) + w2;
    TensorVec v = tensor_zero(q_.H.spec, k, m1 + m2);
    v[concat] = TruncScalar::one(q_.H.spec);
    return reduce_to_basis(q_, p12, v);
  }

  // right-multiply (left-free) / left-multiply (right-free) a piece basis
  // word by a scalar, in basis coordinates
  std::vector<TruncScalar> scalar_on_word(int m, int b, const TruncScalar& c) const {
    const GradePiece& p = pieces_.at(m);
    int k = q_.H.rank();
    TensorVec v = tensor_zero(q_.H.spec, k, m);
    v[static_cast<std::size_t>(p.basis_words[static_cast<std::size_t>(b)])] =
        TruncScalar::one(q_.H.spec);
    return reduce_to_basis(q_, p, tensor_migrate(q_.H, v, m, c));
  }

  BarWeight weight(int m) const {
    BarWeight bw;
    bw.m = m;
    // enumerate compositions
    for (int n = 1; n <= m; ++n) {
      std::vector<BarTuple> tuples;
      std::vector<int> comp;
      std::function<void(int, int)> gen = [&](int rem, int parts) {
        if (parts == 0) {
          if (rem) return;
          BarTuple t;
          std::function<void(std::size_t)> fill = [&](std::size_t slot) {
            if (slot == comp.size()) {
              tuples.push_back(t);
              return;
            }
            int basis_n = static_cast<int>(pieces_.at(comp[slot]).basis_words.size());
            for (int b = 0; b < basis_n; ++b) {
              t.slots.push_back({comp[slot], b});
              fill(slot + 1);
              t.slots.pop_back();
            }
          };
          fill(0);
          return;
        }
        for (int first = 1; first <= rem - (parts - 1); ++first) {
          comp.push_back(first);
          gen(rem - first, parts - 1);
          comp.pop_back();
        }
      };
      gen(m, n);
      std::sort(tuples.begin(), tuples.end());
      bw.basis[n] = std::move(tuples);
    }

    // differentials (bar complexes are built over left-free data)
    assert(q_.H.free_left);
    for (int n = 2; n <= m; ++n) {
      const auto& src = bw.basis[n];
      const auto& dst = bw.basis[n - 1];
      TruncMatrix mat(q_.H.spec, static_cast<int>(src.size()), static_cast<int>(dst.size()));
      for (std::size_t s = 0; s < src.size(); ++s) {
        for (int i = 0; i + 1 < n; ++i) {
          // merge slots i, i+1 with sign (-1)^{i+1} (1-based face index)
          const auto& [mi, bi] = src[s].slots[static_cast<std::size_t>(i)];
          const auto& [mj, bj] = src[s].slots[static_cast<std::size_t>(i) + 1];
          std::vector<TruncScalar> prod = multiply(mi, bi, mj, bj);
          TruncScalar sign = TruncScalar::from_int(q_.H.spec, (i + 1) % 2 == 0 ? 1 : -1);
          for (std::size_t pb = 0; pb < prod.size(); ++pb) {
            if (prod[pb].is_zero()) continue;
            BarTuple base;
            for (int sl = 0; sl < i; ++sl)
              base.slots.push_back(src[s].slots[static_cast<std::size_t>(sl)]);
            base.slots.push_back({mi + mj, static_cast<int>(pb)});
            for (int sl = i + 2; sl < n; ++sl)
              base.slots.push_back(src[s].slots[static_cast<std::size_t>(sl)]);
            accumulate_with_migration(base, i, sign * prod[pb], mat, static_cast<int>(s), dst);
          }
        }
      }
      bw.d[n] = std::move(mat);
    }
    return bw;
  }

 private:
  // A coefficient produced at slot `pos` must cross slots pos-1 ... 0 to
  // reach the free (left) side, expanding in each slot's basis as it goes.
  void accumulate_with_migration(const BarTuple& tuple, int pos, const TruncScalar& coeff,
                                 TruncMatrix& mat, int src_row,
                                 const std::vector<BarTuple>& dst) const {
    if (coeff.is_zero()) return;
    if (pos <= 0) {
      auto it = std::lower_bound(dst.begin(), dst.end(), tuple);
      assert(it != dst.end() && *it == tuple);
      mat.at(src_row, static_cast<int>(it - dst.begin())) += coeff;
      return;
    }
    auto [mw, mb] = tuple.slots[static_cast<std::size_t>(pos) - 1];
    std::vector<TruncScalar> moved = scalar_on_word(mw, mb, coeff);
    for (std::size_t b2 = 0; b2 < moved.size(); ++b2) {
      if (moved[b2].is_zero()) continue;
      BarTuple t2 = tuple;
      t2.slots[static_cast<std::size_t>(pos) - 1] = {mw, static_cast<int>(b2)};
      accumulate_with_migration(t2, pos - 1, moved[b2], mat, src_row, dst);
    }
  }

  QuadraticDatum q_;
  std::map<int, GradePiece> pieces_;
};

// ---------------------------------------------------------------------------
// Koszulity diagnostic: H_n C(I, F, P-bar)[m] must vanish off the diagonal
// n = m.  Sizes are measured as log_p of the group order through the
// flattened base.
// ---------------------------------------------------------------------------

struct KoszulityReport {
  bool pass = true;
  // (n, m, size exponent) for off-diagonal nonvanishing homology
  std::vector<std::tuple<int, int, int>> failures;
  std::map<std::pair<int, int>, int> diagonal;  // (n, n) -> size exponent
};

inline KoszulityReport koszulity_check(const QuadraticDatum& q, int m_max) {
  BarComplex bar(q, m_max);
  KoszulityReport report;
  for (int m = 1; m <= m_max; ++m) {
    BarWeight bw = bar.weight(m);
    for (int n = 1; n <= m; ++n) {
      int dim = static_cast<int>(bw.basis[n].size());
      if (dim == 0) continue;
      // d_1 = 0: C_0[m] vanishes for m >= 1 in the reduced complex
      int ker_exp = n >= 2 ? span_size_exponent(kernel_basis(flatten(bw.d.at(n))))
                           : q.H.spec.M * q.H.spec.N * dim;
      int im_exp = 0;
      if (n + 1 <= m) im_exp = span_size_exponent(howell_form(flatten(bw.d.at(n + 1))));
      int h = ker_exp - im_exp;
      if (n == m) {
        report.diagonal[{n, m}] = h;
      } else if (h != 0) {
        report.pass = false;
        report.failures.push_back({n, m, h});
      }
    }
  }
  return report;
}

// Sizes of Ext^n(P-bar, P-bar)[m] from the transposed bar complex: the
// brute-force cobar oracle with trivial coefficients.
inline std::map<std::pair<int, int>, int> cobar_ext_trivial(const QuadraticDatum& q, int m_max) {
  BarComplex bar(q, m_max);
  std::map<std::pair<int, int>, int> out;
  for (int m = 1; m <= m_max; ++m) {
    BarWeight bw = bar.weight(m);
    for (int n = 1; n <= m; ++n) {
      int dim = static_cast<int>(bw.basis[n].size());
      out[{n, m}] = 0;
      if (dim == 0) continue;
      // delta^{n} = transpose(d_{n+1}), delta^{n-1} = transpose(d_n)
      auto transpose_flat = [&](const TruncMatrix& t) {
        TruncMatrix tr(t.spec, t.cols, t.rows);
        for (int i = 0; i < t.rows; ++i)
          for (int j = 0; j < t.cols; ++j) tr.at(j, i) = t.at(i, j);
        return flatten(tr);
      };
      int ker_exp;
      if (n + 1 <= m) {
        ker_exp = span_size_exponent(kernel_basis(transpose_flat(bw.d.at(n + 1))));
      } else {
        ker_exp = q.H.spec.M * q.H.spec.N * dim;
      }
      int im_exp = 0;
      if (n >= 2) im_exp = span_size_exponent(howell_form(transpose_flat(bw.d.at(n))));
      out[{n, m}] = ker_exp - im_exp;
    }
  }
  // Ext^0[0] is the base itself
  out[{0, 0}] = q.H.spec.M * q.H.spec.N;
  return out;
}

// ---------------------------------------------------------------------------
// The dual algebra in a window: graded pieces of T^(H-dual, R-perp) with
// letter products.  Words here are right-free; scalars migrate rightward.
// ---------------------------------------------------------------------------

class DualAlgebra {
 public:
  DualAlgebra(const QuadraticDatum& primal, int n_max) : dual_(quadratic_dual(primal)) {
    for (int n = 0; n <= n_max; ++n) pieces_[n] = grade_piece(dual_, n);
  }

  static DualAlgebra from_dual(QuadraticDatum dual, int n_max) {
    DualAlgebra d;
    d.dual_ = std::move(dual);
    for (int n = 0; n <= n_max; ++n) d.pieces_[n] = grade_piece(d.dual_, n);
    return d;
  }

  const QuadraticDatum& datum() const { return dual_; }
  const GradePiece& piece(int n) const { return pieces_.at(n); }
  int rank(int n) const { return static_cast<int>(pieces_.at(n).basis_words.size()); }

  // expansion of (letter l) (x) (scalar c) (x) (basis word b of T^_n) in the
  // T^_{n+1} basis; the scalar migrates through b to the right
  std::vector<TruncScalar> prepend_letter(int l, const TruncScalar& c, int n, int b) const {
    int k = dual_.H.rank();
    const GradePiece& pn = pieces_.at(n);
    TensorVec v = tensor_zero(dual_.H.spec, k, n);
    v[static_cast<std::size_t>(pn.basis_words[static_cast<std::size_t>(b)])] =
        TruncScalar::one(dual_.H.spec);
    TensorVec moved = tensor_migrate(dual_.H, v, n, c);
    TensorVec big = tensor_zero(dual_.H.spec, k, n + 1);
    std::size_t inner = word_count(k, n);
    for (std::size_t w = 0; w < inner; ++w)
      big[static_cast<std::size_t>(l) * inner + w] = moved[w];
    return reduce_to_basis(dual_, pieces_.at(n + 1), big);
  }

  // expansion of (basis word b of T^_n) (x) (letter l) . c in the T^_{n+1}
  // basis; the scalar is already on the free (right) side
  std::vector<TruncScalar> append_letter(int n, int b, int l, const TruncScalar& c) const {
    int k = dual_.H.rank();
    const GradePiece& pn = pieces_.at(n);
    TensorVec big = tensor_zero(dual_.H.spec, k, n + 1);
    std::size_t w = static_cast<std::size_t>(pn.basis_words[static_cast<std::size_t>(b)]);
    big[w * static_cast<std::size_t>(k) + static_cast<std::size_t>(l)] = c;
    return reduce_to_basis(dual_, pieces_.at(n + 1), big);
  }

 private:
  DualAlgebra() = default;

  QuadraticDatum dual_;
  std::map<int, GradePiece> pieces_;
};

// ---------------------------------------------------------------------------
// Koszul complexes K_F(M, N) for modules given by explicit coactions.  A
// coaction assigns to each generator an element of M (x) H-dual:
//   P(m_i) = sum_{j,l} m_j (x) q^l . coact[l](i, j).
// The differential is
//   delta(f) = (-1)^{n+1} (sigma_M <> f) + (f <> sigma_N)
// where <> is concatenation reduced into the dual algebra; the sign packaging
// comes from the -1 twists on the structure elements and the (-1)^{ij} twist
// in the dual product.
// ---------------------------------------------------------------------------

struct DualCoaction {
  std::vector<std::string> gens;
  std::vector<TruncMatrix> coact;  // indexed by dual letter l; entry (i, j)

  static DualCoaction trivial(const RingSpec& spec, std::vector<std::string> gens, int k) {
    DualCoaction c;
    c.gens = std::move(gens);
    for (int l = 0; l < k; ++l)
      c.coact.push_back(TruncMatrix(spec, static_cast<int>(c.gens.size()),
                                    static_cast<int>(c.gens.size())));
    return c;
  }
};

struct KoszulComplex {
  // basis of K^n: (M generator i, dual word b, N generator t), ordered by
  // (i, b, t)
  struct Basis {
    int m_gens, words, n_gens;
    int index(int i, int b, int t) const { return (i * words + b) * n_gens + t; }
    int size() const { return m_gens * words * n_gens; }
  };
  std::map<int, Basis> basis;
  std::map<int, TruncMatrix> delta;  // n -> K^n x K^{n+1}
};

inline KoszulComplex koszul_complex(const DualAlgebra& dual, const DualCoaction& M,
                                    const DualCoaction& N, int n_max) {
  const RingSpec& spec = dual.datum().H.spec;
  int k = dual.datum().H.rank();
  int gm = static_cast<int>(M.gens.size()), gn = static_cast<int>(N.gens.size());
  KoszulComplex kc;
  for (int n = 0; n <= n_max; ++n) kc.basis[n] = {gm, dual.rank(n), gn};

  for (int n = 0; n < n_max; ++n) {
    const auto& src = kc.basis.at(n);
    const auto& dst = kc.basis.at(n + 1);
    TruncMatrix mat(spec, src.size(), dst.size());
    TruncScalar msign = TruncScalar::from_int(spec, (n + 1) % 2 == 0 ? 1 : -1);
    for (int i = 0; i < gm; ++i)
      for (int b = 0; b < src.words; ++b)
        for (int t = 0; t < gn; ++t) {
          int row = src.index(i, b, t);
          // M side: coact on the i-th generator, prepend the letter
          for (int l = 0; l < k; ++l)
            for (int j = 0; j < gm; ++j) {
              const TruncScalar& c = M.coact[static_cast<std::size_t>(l)].at(i, j);
              if (c.is_zero()) continue;
              std::vector<TruncScalar> red = dual.prepend_letter(l, c, n, b);
              for (int b2 = 0; b2 < dst.words; ++b2)
                mat.at(row, dst.index(j, b2, t)) += msign * red[static_cast<std::size_t>(b2)];
            }
          // N side: coact on the t-th generator, append the letter
          for (int l = 0; l < k; ++l)
            for (int s = 0; s < gn; ++s) {
              const TruncScalar& c = N.coact[static_cast<std::size_t>(l)].at(t, s);
              if (c.is_zero()) continue;
              std::vector<TruncScalar> red = dual.append_letter(n, b, l, c);
              for (int b2 = 0; b2 < dst.words; ++b2)
                mat.at(row, dst.index(i, b2, s)) += red[static_cast<std::size_t>(b2)];
            }
        }
    kc.delta[n] = std::move(mat);
  }
  return kc;
}

// ---------------------------------------------------------------------------
// Windowed cobar cochains with trivial coefficients, for the wreath pairing
// and its Leibniz rule.  A cochain of degree n assigns a scalar to each
// C_n[m]-tuple for the weights in its window.
// ---------------------------------------------------------------------------

struct Cochain {
  int n = 0;
  std::map<int, std::vector<TruncScalar>> values;  // weight m -> one per tuple
};

// (f wr g)(W) = (-1)^{n n'} sum over splittings: g evaluated on the head
// tuple right-multiplied by f(tail tuple).
inline Cochain wreath(const BarComplex& bar, const std::map<int, BarWeight>& weights,
                      const Cochain& f, const Cochain& g, int m_max) {
  const RingSpec& spec = bar.datum().H.spec;
  Cochain h;
  h.n = f.n + g.n;
  TruncScalar sign = TruncScalar::from_int(spec, (f.n * g.n) % 2 == 0 ? 1 : -1);
  for (int m = 1; m <= m_max; ++m) {
    auto wit = weights.find(m);
    if (wit == weights.end()) continue;
    const BarWeight& bw = wit->second;
    auto bit = bw.basis.find(h.n);
    if (bit == bw.basis.end()) continue;
    const auto& tuples = bit->second;
    std::vector<TruncScalar> vals(tuples.size(), TruncScalar::zero(spec));
    for (std::size_t s = 0; s < tuples.size(); ++s) {
      const BarTuple& W = tuples[s];
      // split: head = first g.n slots, tail = last f.n slots
      int head_m = 0, tail_m = 0;
      for (int i = 0; i < g.n; ++i) head_m += W.slots[static_cast<std::size_t>(i)].first;
      for (int i = g.n; i < h.n; ++i) tail_m += W.slots[static_cast<std::size_t>(i)].first;
      auto fit = f.values.find(tail_m);
      auto git = g.values.find(head_m);
      if (fit == f.values.end() || git == g.values.end()) continue;
      // f on the tail tuple
      BarTuple tail;
      for (int i = g.n; i < h.n; ++i) tail.slots.push_back(W.slots[static_cast<std::size_t>(i)]);
      const auto& tail_basis = weights.at(tail_m).basis.at(f.n);
      auto tpos = std::lower_bound(tail_basis.begin(), tail_basis.end(), tail);
      assert(tpos != tail_basis.end() && *tpos == tail);
      TruncScalar c = fit->second[static_cast<std::size_t>(tpos - tail_basis.begin())];
      if (c.is_zero()) continue;
      // migrate c through the head tuple (rightmost slot first), evaluating g
      const auto& head_basis = weights.at(head_m).basis.at(g.n);
      std::function<void(BarTuple, int, TruncScalar)> walk = [&](BarTuple head, int pos,
                                                                 TruncScalar coeff) {
        if (coeff.is_zero()) return;
        if (pos <= 0) {
          auto hpos = std::lower_bound(head_basis.begin(), head_basis.end(), head);
          assert(hpos != head_basis.end() && *hpos == head);
          vals[s] += sign * coeff *
                     git->second[static_cast<std::size_t>(hpos - head_basis.begin())];
          return;
        }
        auto [mw, mb] = head.slots[static_cast<std::size_t>(pos) - 1];
        std::vector<TruncScalar> moved = bar.scalar_on_word(mw, mb, coeff);
        for (std::size_t b2 = 0; b2 < moved.size(); ++b2) {
          if (moved[b2].is_zero()) continue;
          BarTuple h2 = head;
          h2.slots[static_cast<std::size_t>(pos) - 1] = {mw, static_cast<int>(b2)};
          walk(h2, pos - 1, moved[b2]);
        }
      };
      BarTuple head;
      for (int i = 0; i < g.n; ++i) head.slots.push_back(W.slots[static_cast<std::size_t>(i)]);
      walk(head, g.n, c);
    }
    h.values[m] = std::move(vals);
  }
  return h;
}

// Cobar differential on trivial-coefficient cochains: the transpose of the
// bar differential (the two boundary faces act through augmentations).
inline Cochain cobar_delta(const RingSpec& spec, const std::map<int, BarWeight>& weights,
                           const Cochain& f, int m_max) {
  Cochain g;
  g.n = f.n + 1;
  for (int m = 1; m <= m_max; ++m) {
    auto wit = weights.find(m);
    if (wit == weights.end()) continue;
    const BarWeight& bw = wit->second;
    auto bit = bw.basis.find(g.n);
    if (bit == bw.basis.end()) continue;
    auto fit = f.values.find(m);
    std::vector<TruncScalar> vals(bit->second.size(), TruncScalar::zero(spec));
    if (fit != f.values.end() && bw.d.count(g.n)) {
      const TruncMatrix& d = bw.d.at(g.n);
      for (int r = 0; r < d.rows; ++r)
        for (int c2 = 0; c2 < d.cols; ++c2)
          if (!d.at(r, c2).is_zero())
            vals[static_cast<std::size_t>(r)] += d.at(r, c2) * fit->second[static_cast<std::size_t>(c2)];
    }
    g.values[m] = std::move(vals);
  }
  return g;
}

// ---------------------------------------------------------------------------
// PBW window checker.  A decomposition instance supplies the ordered blocks,
// the S membership predicate on adjacent pairs, and the pair product oracle
// (the rewriting system).  Conditions checked on the window:
//   (1) S is pair-determined: every window word is in S iff all its adjacent
//       pairs are (tautological for pair predicates; verified on supplied
//       word lists otherwise);
//   (2) products of S-pairs land at-or-below the concatenation in the
//       lexicographic order induced by the block order;
//   (3) the S-words exhaust each weight-2 piece: every non-S pair rewrites
//       into S-pairs.
// ---------------------------------------------------------------------------

struct PbwInstance {
  std::vector<i64> blocks;  // in the supplied order
  std::function<bool(i64, i64)> pair_in_s;
  // rewrite a non-S pair as a combination of pairs (empty = zero)
  std::function<std::vector<std::pair<std::pair<i64, i64>, u64>>(i64, i64)> rewrite;
};

struct PbwReport {
  bool pair_determined = true;
  bool products_below = true;
  bool spans = true;
  std::optional<std::pair<i64, i64>> witness;
  bool pass() const { return pair_determined && products_below && spans; }
};

inline PbwReport pbw_check(const PbwInstance& inst) {
  PbwReport report;
  std::map<i64, int> order;
  for (std::size_t i = 0; i < inst.blocks.size(); ++i) order[inst.blocks[i]] = static_cast<int>(i);
  auto word_leq = [&](std::pair<i64, i64> u, std::pair<i64, i64> v) {
    if (order.at(u.first) != order.at(v.first)) return order.at(u.first) < order.at(v.first);
    return order.at(u.second) <= order.at(v.second);
  };
  for (i64 x : inst.blocks)
    for (i64 y : inst.blocks) {
      if (inst.pair_in_s(x, y)) continue;
      auto expansion = inst.rewrite(x, y);
      for (const auto& [pr, c] : expansion) {
        if (!c) continue;
        if (order.count(pr.first) && order.count(pr.second)) {
          if (!inst.pair_in_s(pr.first, pr.second)) {
            report.spans = false;
            report.witness = {x, y};
          }
          if (!word_leq(pr, {x, y})) {
            report.products_below = false;
            report.witness = {x, y};
          }
        }
      }
    }
  return report;
}

// The admissible-word decomposition of the length-graded algebra of power
// operations: blocks are the operation indices, S-pairs the admissible ones,
// products given by Adem rewriting.
inline PbwInstance pbw_dl_instance(i64 p, i64 r_lo, i64 r_hi, bool ascending) {
  PbwInstance inst;
  for (i64 r = ascending ? r_lo : r_hi; ascending ? r <= r_hi : r >= r_lo; r += ascending ? 1 : -1)
    inst.blocks.push_back(r);
  inst.pair_in_s = [p](i64 x, i64 y) { return pair_admissible(Letter{0, x}, Letter{0, y}, p); };
  inst.rewrite = [p](i64 x, i64 y) {
    std::vector<std::pair<std::pair<i64, i64>, u64>> out;
    for (const auto& [pr, c] : adem_pair(Letter{0, x}, Letter{0, y}, p))
      out.push_back({{pr[0].r, pr[1].r}, c});
    return out;
  };
  return inst;
}

// ---------------------------------------------------------------------------
// Cobar Ext oracle over the algebra of power operations itself: the reduced
// cobar complex C^n_F(e_a, N) with basis dual to tuples of nonempty
// admissible segments (instability-chained over e_a), graded by the weight
// t = |value| - sum of segment degrees.  This is the brute-force check for
// the lambda complexes.
// ---------------------------------------------------------------------------

struct FCobarBasisElement {
  std::vector<Word> segments;  // outermost first, innermost (acting on e_a) last
  std::string gen;
  auto operator<=>(const FCobarBasisElement&) const = default;
};

// Restricted to windows with a + u >= 1, where the instability chains keep
// every segment degree positive and the complex is degreewise finite without
// a binding length cap.
inline std::map<std::pair<int, i64>, int> cobar_ext_F_window(const FModuleData& N, i64 a,
                                                             int n_max, i64 t_min, i64 t_max,
                                                             int letter_cap) {
  i64 p = N.p;
  assert(a + N.u >= 1);
  RingSpec fp(p, 1, 1);
  i64 max_gen_deg = 0;
  for (const auto& [g, dg] : N.degrees) max_gen_deg = std::max(max_gen_deg, dg);
  const i64 budget = max_gen_deg - t_min;  // max total segment degree

  std::map<std::pair<int, i64>, std::vector<FCobarBasisElement>> basis;
  std::vector<Word> segs;  // innermost first while building
  std::function<void(int, i64)> build = [&](int seg_left, i64 base_deg) {
    if (seg_left == 0) {
      for (const auto& [g, dg] : N.degrees) {
        i64 t = dg - (base_deg - a);
        if (t < t_min || t > t_max) continue;
        FCobarBasisElement e;
        e.segments.assign(segs.rbegin(), segs.rend());
        e.gen = g;
        basis[{static_cast<int>(segs.size()), t}].push_back(std::move(e));
      }
      return;
    }
    EnumerationResult here =
        free_basis_window(base_deg, N.u, base_deg + 1, a + budget, letter_cap, p);
    assert(!here.capped);
    for (const auto& aw : here.words) {
      if (aw.entries.empty()) continue;
      segs.push_back(aw.entries);
      build(seg_left - 1, base_deg + aw.degree);
      segs.pop_back();
    }
  };
  for (int n = 0; n <= n_max; ++n) build(n, a);
  for (auto& [key, v] : basis) std::sort(v.begin(), v.end());

  static const std::vector<FCobarBasisElement> kEmpty;
  auto level = [&](int n, i64 t) -> const std::vector<FCobarBasisElement>& {
    auto it = basis.find({n, t});
    return it == basis.end() ? kEmpty : it->second;
  };

  // delta(f)(W) = [outer segment acts on the module value of f(inner part)]
  //             + sum_i (-1)^i f(W with segments i-1, i merged and normalized)
  auto delta_matrix = [&](int n, i64 t) {
    const auto& src = level(n, t);
    const auto& dst = level(n + 1, t);
    FlatMatrix mat(fp, static_cast<int>(src.size()), static_cast<int>(dst.size()));
    u64 pm = static_cast<u64>(p);
    for (std::size_t w = 0; w < dst.size(); ++w) {
      const auto& W = dst[w];
      auto addterm = [&](const FCobarBasisElement& e, u64 c, int parity) {
        auto pos = std::lower_bound(src.begin(), src.end(), e);
        if (pos == src.end() || !(*pos == e)) return;
        u64 cc = parity % 2 == 0 ? c % pm : (pm - c % pm) % pm;
        int r = static_cast<int>(pos - src.begin());
        mat.at(r, static_cast<int>(w)) = add_mod(mat.at(r, static_cast<int>(w)), cc, pm);
      };
      // face 0: outermost segment acts on the module value
      {
        OperationElement op;
        op.p = p;
        op.add(W.segments.front(), 1);
        ModuleElement x;
        x.add(W.gen, 1, p);
        ModuleElement y = apply_to_module(op, x, N);
        for (const auto& [g2, c2] : y.terms) {
          FCobarBasisElement e;
          e.segments.assign(W.segments.begin() + 1, W.segments.end());
          e.gen = g2;
          addterm(e, c2, 0);
        }
      }
      // middle faces i = 1..n: merge segments i-1, i (0-based)
      for (int i = 1; i <= n; ++i) {
        Word merged = W.segments[static_cast<std::size_t>(i) - 1];
        const Word& nxt = W.segments[static_cast<std::size_t>(i)];
        merged.insert(merged.end(), nxt.begin(), nxt.end());
        OperationElement nf = adem_normalize(merged, p);
        i64 base = a;
        for (std::size_t sidx = W.segments.size(); sidx-- > static_cast<std::size_t>(i) + 1;)
          base += word_degree(W.segments[sidx], p);
        for (const auto& [term, c] : nf.terms) {
          if (!term.empty() && word_excess(term, p) < base + N.u) continue;  // dead on e_base
          FCobarBasisElement e;
          e.gen = W.gen;
          for (std::size_t sidx = 0; sidx < W.segments.size(); ++sidx) {
            if (sidx == static_cast<std::size_t>(i) - 1) {
              e.segments.push_back(term);
              ++sidx;  // skip the merged partner
              continue;
            }
            e.segments.push_back(W.segments[sidx]);
          }
          addterm(e, c, i);
        }
      }
      // the innermost face acts on e_a through the trivial structure: zero
    }
    return mat;
  };

  std::map<std::pair<int, i64>, int> dims;
  for (i64 t = t_min; t <= t_max; ++t) {
    std::map<int, FlatMatrix> deltas;
    for (int n = 0; n <= n_max; ++n) deltas[n] = delta_matrix(n, t);
    for (int n = 0; n <= n_max; ++n) {
      int dim = static_cast<int>(level(n, t).size());
      if (dim == 0) continue;
      int ker = n < n_max ? span_size_exponent(kernel_basis(deltas.at(n))) : dim;
      int im = n > 0 ? span_size_exponent(howell_form(deltas.at(n - 1))) : 0;
      dims[{n, t}] = ker - im;
    }
  }
  return dims;
}

}  // namespace plethora


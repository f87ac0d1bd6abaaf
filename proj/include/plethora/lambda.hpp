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
// The cohomology of the big Dyer-Lashof algebra: lambda words.  A letter
// lambda_r^eps is dual to Q^{-r-1} (p = 2) resp. Q^{-r}_{1-eps} (p > 2);
// a word is coadmissible iff p r_i - eps_i >= r_{i+1} for all i.
// lambda_r lowers the source degree a to a - r - 1 (p = 2); in general the
// drop is 2r(p-1) + 1 - eps.
// ---------------------------------------------------------------------------

struct LLetter {
  i64 r = 0;
  int eps = 0;
  auto operator<=>(const LLetter&) const = default;
};

using LambdaWord = std::vector<LLetter>;

inline i64 lambda_drop(const LLetter& l, i64 p) {
  return p == 2 ? l.r + 1 : 2 * l.r * (p - 1) + 1 - l.eps;
}

inline i64 lambda_word_drop(const LambdaWord& w, i64 p) {
  i64 d = 0;
  for (const LLetter& l : w) d += lambda_drop(l, p);
  return d;
}

inline bool lambda_pair_coadmissible(const LLetter& x, const LLetter& y, i64 p) {
  return p * x.r - x.eps >= y.r;
}

inline bool lambda_word_coadmissible(const LambdaWord& w, i64 p) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (!lambda_pair_coadmissible(w[i], w[i + 1], p)) return false;
  return true;
}

// Dual dictionary between lambda letters and operation letters.
inline Letter q_dual_of_lambda(const LLetter& l, i64 p) {
  return p == 2 ? Letter{0, -l.r - 1} : Letter{1 - l.eps, -l.r};
}
inline LLetter lambda_dual_of_q(const Letter& q, i64 p) {
  return p == 2 ? LLetter{-q.r - 1, 0} : LLetter{-q.r, 1 - q.eps};
}

// An F_p-combination of (lambda word, module generator) pairs.
struct LambdaElement {
  i64 p = 2;
  std::map<std::pair<LambdaWord, std::string>, u64> terms;

  void add(const LambdaWord& w, const std::string& g, u64 c) {
    c %= static_cast<u64>(p);
    if (!c) return;
    auto [it, fresh] = terms.emplace(std::make_pair(w, g), 0);
    it->second = (it->second + c) % static_cast<u64>(p);
    if (!it->second) terms.erase(it);
  }
  bool is_zero() const { return terms.empty(); }
  bool operator==(const LambdaElement&) const = default;
};

// ---------------------------------------------------------------------------
// Rewriting.  A non-coadmissible adjacent pair is the class, in the quotient
// of pairs by the annihilator of the Adem relation space, of a functional
// dual to an *admissible* operation pair A; since every Adem rewrite output
// is admissible and every completely inadmissible pair N heads exactly one
// relation, the coadmissible pair duals are exactly dual to the relation
// rows, and the expansion is
//
//   [dual of A] = sum_N  (-coefficient of A in the rewrite of N) [dual of N].
//
// At p = 2 this reproduces the relation
//   lambda_a lambda_{2a+b+1} = sum_j binom(b-j-1, j) lambda_{a+b-j} lambda_{2a+1+j},
// and it is what the quotient map dictates at odd primes, where no relation
// is available in closed form.
// ---------------------------------------------------------------------------

inline std::vector<std::pair<std::array<LLetter, 2>, u64>> lambda_pair_expand(const LLetter& x,
                                                                              const LLetter& y,
                                                                              i64 p) {
  assert(!lambda_pair_coadmissible(x, y, p));
  u64 pm = static_cast<u64>(p);
  // The dual operation pair (reversal swaps the letters).
  Letter a1 = q_dual_of_lambda(y, p), a2 = q_dual_of_lambda(x, p);
  std::vector<std::pair<std::array<LLetter, 2>, u64>> out;
  // Scan the finite window of inadmissible pairs N = (n1, n2) of the same
  // degree whose Adem expansion can contain (a1, a2); the second letter of
  // the pair determines everything else.
  i64 s_lo = a1.r - (p - 1) * a2.r - std::abs(a2.eps) - 2;
  i64 s_hi = a2.r + 1;
  for (i64 s = s_lo; s <= s_hi; ++s) {
    for (int e1 = 0; e1 <= (p == 2 ? 0 : 1); ++e1) {
      for (int e2 = 0; e2 <= (p == 2 ? 0 : 1); ++e2) {
        // degree bookkeeping fixes n1
        i64 deg = letter_degree(a1, p) + letter_degree(a2, p);
        i64 d2 = letter_degree(Letter{e2, s}, p);
        i64 rem = deg - d2;  // degree of the first letter
        i64 n1;
        if (p == 2) {
          n1 = rem;
        } else {
          if ((rem + e1) % (2 * (p - 1)) != 0) continue;
          n1 = (rem + e1) / (2 * (p - 1));
        }
        Letter N1{e1, n1}, N2{e2, s};
        if (pair_admissible(N1, N2, p)) continue;
        u64 coeff = 0;
        for (const auto& [pr, c] : adem_pair(N1, N2, p))
          if (pr[0] == a1 && pr[1] == a2) coeff = c;
        if (!coeff) continue;
        // -coeff, and reverse the dual letters
        out.push_back({{lambda_dual_of_q(N2, p), lambda_dual_of_q(N1, p)},
                       (pm - coeff) % pm});
      }
    }
  }
  return out;
}

// Element-level rewriting toward coadmissible form, leftmost pair first.
inline LambdaElement lambda_rewrite_element(const LambdaElement& x) {
  i64 p = x.p;
  LambdaElement result;
  result.p = p;
  std::vector<std::tuple<LambdaWord, std::string, u64>> work;
  for (const auto& [key, c] : x.terms) work.push_back({key.first, key.second, c});
  while (!work.empty()) {
    auto [w, g, c] = std::move(work.back());
    work.pop_back();
    int pos = -1;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (!lambda_pair_coadmissible(w[i], w[i + 1], p)) {
        pos = static_cast<int>(i);
        break;
      }
    if (pos < 0) {
      result.add(w, g, c);
      continue;
    }
    for (const auto& [pair, pc] : lambda_pair_expand(w[pos], w[pos + 1], p)) {
      LambdaWord nw = w;
      nw[pos] = pair[0];
      nw[pos + 1] = pair[1];
      work.push_back({std::move(nw), g, mul_mod(c, pc, static_cast<u64>(p))});
    }
  }
  return result;
}

inline LambdaElement lambda_rewrite(const LambdaWord& w, i64 p) {
  LambdaElement x;
  x.p = p;
  x.add(w, "", 1);
  return lambda_rewrite_element(x);
}

inline LambdaElement lambda_rewrite_ints(const std::vector<i64>& rs, i64 p = 2) {
  LambdaWord w;
  for (i64 r : rs) w.push_back(LLetter{r, 0});
  return lambda_rewrite(w, p);
}

// ---------------------------------------------------------------------------
// Basis enumeration for the two characterizations of H^*(F).
// ---------------------------------------------------------------------------

namespace detail {

// The head statistic the basis theorems bound: r_1 at p = 2, 2r_1 - eps_1 at
// p > 2.  Both characterizations reduce to headval < some cap, which is what
// makes the fixed-drop-sum slices finite: coadmissibility bounds every later
// letter above in terms of the head, so the total drop is bounded above by a
// function of the head, which bounds the head below; the cap bounds it above.
inline i64 lambda_headval(const LLetter& l, i64 p) { return p == 2 ? l.r : 2 * l.r - l.eps; }

// All coadmissible words of length n, total drop = drop_sum, head statistic
// <= headval_max.
inline void enumerate_coadmissible(i64 p, int n, i64 drop_sum, i64 headval_max,
                                   const std::function<void(const LambdaWord&)>& emit) {
  if (n == 0) {
    if (drop_sum == 0) emit({});
    return;
  }
  LambdaWord current;
  // Largest achievable total drop of c further letters after `head`.
  std::function<i64(LLetter, int)> max_tail = [&](LLetter head, int c) -> i64 {
    if (c == 0) return 0;
    LLetter next{p * head.r - head.eps, 0};
    return lambda_drop(next, p) + max_tail(next, c - 1);
  };
  std::function<void(i64, int)> rec = [&](i64 rem, int c) {
    if (c == 0) {
      if (rem == 0) emit(current);
      return;
    }
    i64 r_start;
    if (current.empty()) {
      // largest r whose headval can satisfy the cap (eps = 1 is the laxest)
      r_start = p == 2 ? headval_max
                       : (headval_max + 1 >= 0 ? (headval_max + 1) / 2
                                               : -((-headval_max) / 2));
      while (2 * r_start - 1 > headval_max && p > 2) --r_start;
    } else {
      r_start = p * current.back().r - current.back().eps;
    }
    for (i64 r = r_start;; --r) {
      bool head_passed = false, feasible_any = false;
      for (int eps = 0; eps <= (p == 2 ? 0 : 1); ++eps) {
        LLetter l{r, eps};
        if (current.empty() && lambda_headval(l, p) > headval_max) continue;
        head_passed = true;
        i64 d = lambda_drop(l, p);
        if (d + max_tail(l, c - 1) < rem) continue;  // sum out of reach
        feasible_any = true;
        current.push_back(l);
        rec(rem - d, c - 1);
        current.pop_back();
      }
      // Feasibility is monotone in r once the head cap is satisfied.
      if (head_passed && !feasible_any) break;
    }
  };
  rec(drop_sum, n);
}

}  // namespace detail

// Basis of Ext^n_F(e_a, e_b) from the source characterization: coadmissible
// words with head r_1 < -a (p = 2) resp. 2r_1 - eps_1 < -a, total drop
// a - b.
inline std::vector<LambdaWord> ext_basis_source(int n, i64 a, i64 b, i64 p) {
  std::vector<LambdaWord> out;
  detail::enumerate_coadmissible(p, n, a - b, -a - 1,
                                 [&](const LambdaWord& w) { out.push_back(w); });
  std::sort(out.begin(), out.end());
  return out;
}

// Basis of the target characterization H^*(F)(e_a): coadmissible words with
//   2r_1 + r_2 + ... + r_n + n < -a            (p = 2)
//   2(p r_1 - eps_1) + sum_{i>=2}(2r_i(p-1) - eps_i) + n < -a   (p > 2),
// sliced by the source degree b = a + total drop.
inline std::vector<LambdaWord> ext_basis_target(int n, i64 a, i64 b_min, i64 b_max, i64 p) {
  std::vector<LambdaWord> out;
  for (i64 b = b_min; b <= b_max; ++b) {
    // The displayed inequality bounds the head statistic by -a - drop_sum.
    detail::enumerate_coadmissible(p, n, b - a, -a - (b - a) - 1, [&](const LambdaWord& w) {
      if (!w.empty()) {
        i64 head;
        if (p == 2) {
          head = 2 * w[0].r;
          for (std::size_t i = 1; i < w.size(); ++i) head += w[i].r;
        } else {
          head = 2 * (p * w[0].r - w[0].eps);
          for (std::size_t i = 1; i < w.size(); ++i)
            head += 2 * w[i].r * (p - 1) - w[i].eps;
        }
        if (head + static_cast<i64>(w.size()) >= -a) return;
      }
      out.push_back(w);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

// The unstable (gr U) sub-basis: words with all entries nonnegative.
inline std::vector<LambdaWord> unstable_restrict(const std::vector<LambdaWord>& basis) {
  std::vector<LambdaWord> out;
  for (const LambdaWord& w : basis)
    if (std::all_of(w.begin(), w.end(), [](const LLetter& l) { return l.r >= 0; }))
      out.push_back(w);
  return out;
}

// ---------------------------------------------------------------------------
// The nonconnective Koszul differential
//   delta(lambda_I (x) m) = sum_r lambda_I lambda_{-r-1} (x) Q^r(m),
// with each term rewritten to coadmissible form.  Words whose head violates
// the instability bound r_1 < -a - u are zero functionals in K_{F^u}(e_a, -)
// and are dropped by the complex (see lambda_complex_window below); the raw
// differential here keeps them so that it stays complex-agnostic.
// ---------------------------------------------------------------------------

inline LambdaElement big_lambda_differential(const LambdaElement& x, const FModuleData& data) {
  i64 p = data.p;
  LambdaElement out;
  out.p = p;
  for (const auto& [key, c] : x.terms) {
    const auto& [w, g] = key;
    ModuleElement m;
    m.add(g, 1, p);
    i64 dm = data.degrees.at(g);
    for (i64 r = dm + data.u; r <= data.r_max; ++r) {
      for (int eps = 0; eps <= (p == 2 ? 0 : 1); ++eps) {
        if (p > 2 && 2 * r - eps < dm + data.u) continue;
        ModuleElement qm = data.apply_letter(Letter{eps, r}, m);
        if (qm.is_zero()) continue;
        LambdaWord nw = w;
        nw.push_back(lambda_dual_of_q(Letter{eps, r}, p));
        LambdaElement term;
        term.p = p;
        for (const auto& [h, hc] : qm.terms)
          term.add(nw, h, mul_mod(hc, c, static_cast<u64>(p)));
        term = lambda_rewrite_element(term);
        for (const auto& [k2, c2] : term.terms) out.add(k2.first, k2.second, c2);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Windowed lambda complexes.  K_{F^u}(e_a, N) in cohomological degrees
// k <= k_max and weights t = |m| + sum(r_i) + k in [t_min, t_max]; the
// differential preserves t.  Basis condition (p = 2 display, general p by
// the same bookkeeping): head r_1 < -a - u, and t >= 0.
// ---------------------------------------------------------------------------

struct LambdaBasisElement {
  LambdaWord word;
  std::string gen;
  auto operator<=>(const LambdaBasisElement&) const = default;
};

struct LambdaBidegree {
  std::vector<LambdaBasisElement> basis;
  FlatMatrix differential;  // basis(k,t) x basis(k+1,t) over F_p
  bool reliable = true;
};

struct LambdaComplexWindow {
  i64 p = 2;
  i64 a = 0;
  int k_max = 0;
  i64 t_min = 0, t_max = 0;
  FModuleData coeffs;
  std::map<std::pair<int, i64>, LambdaBidegree> cells;
};

// The weight t = |m| + (total drop of the word); the differential preserves
// it, because the appended letter's drop cancels the degree raise of Q^r.
inline i64 lambda_weight(const LambdaWord& w, i64 gen_degree, i64 p) {
  return gen_degree + lambda_word_drop(w, p);
}

inline bool lambda_head_ok(const LambdaWord& w, i64 a, i64 u, i64 p) {
  if (w.empty()) return true;
  i64 headval = p == 2 ? w[0].r : 2 * w[0].r - w[0].eps;
  return headval < -a - u;
}

inline LambdaComplexWindow lambda_complex_window(const FModuleData& coeffs, i64 a, int k_max,
                                                 i64 t_min, i64 t_max) {
  i64 p = coeffs.p;
  LambdaComplexWindow cx;
  cx.p = p;
  cx.a = a;
  cx.k_max = k_max;
  cx.t_min = t_min;
  cx.t_max = t_max;
  cx.coeffs = coeffs;

  // enumerate bases
  for (int k = 0; k <= k_max; ++k) {
    for (const auto& [g, dg] : coeffs.degrees) {
      // t = dg + weight-sum + k  =>  drop-sum = t - dg - k + (k) ... use
      // drop-sum = (t - dg - k) + k = t - dg at p = 2; in general the word
      // drop equals weight-sum + k.
      for (i64 t = std::max<i64>(t_min, 0); t <= t_max; ++t) {
        i64 drop_sum = t - dg;
        detail::enumerate_coadmissible(p, k, drop_sum, -a - coeffs.u - 1,
                                       [&](const LambdaWord& w) {
                                         cx.cells[{k, t}].basis.push_back({w, g});
                                       });
      }
    }
  }
  for (auto& [key, cell] : cx.cells) std::sort(cell.basis.begin(), cell.basis.end());

  // differentials
  RingSpec fp(p, 1, 1);
  for (int k = 0; k < k_max; ++k) {
    for (i64 t = std::max<i64>(t_min, 0); t <= t_max; ++t) {
      auto it = cx.cells.find({k, t});
      if (it == cx.cells.end()) continue;
      auto& cell = it->second;
      const std::vector<LambdaBasisElement>* target = nullptr;
      auto jt = cx.cells.find({k + 1, t});
      if (jt != cx.cells.end()) target = &jt->second.basis;
      int tcols = target ? static_cast<int>(target->size()) : 0;
      cell.differential = FlatMatrix(fp, static_cast<int>(cell.basis.size()), tcols);
      for (std::size_t i = 0; i < cell.basis.size(); ++i) {
        LambdaElement x;
        x.p = p;
        x.add(cell.basis[i].word, cell.basis[i].gen, 1);
        LambdaElement dx = big_lambda_differential(x, coeffs);
        for (const auto& [key2, c] : dx.terms) {
          if (!lambda_head_ok(key2.first, a, coeffs.u, p)) continue;  // zero functional
          LambdaBasisElement b{key2.first, key2.second};
          assert(target != nullptr);
          auto pos = std::lower_bound(target->begin(), target->end(), b);
          assert(pos != target->end() && *pos == b);
          cell.differential.at(static_cast<int>(i), static_cast<int>(pos - target->begin())) = c;
        }
      }
    }
  }
  return cx;
}

// Homology of the windowed complex.
struct ExtWindowCell {
  int n;
  i64 t;
  int dim;
  bool reliable;
  std::vector<LambdaBasisElement> representatives;
};

inline std::vector<ExtWindowCell> ext_over_F_window(const FModuleData& coeffs, i64 a, int k_max,
                                                    i64 t_min, i64 t_max) {
  LambdaComplexWindow cx = lambda_complex_window(coeffs, a, k_max, t_min, t_max);
  std::vector<ExtWindowCell> out;
  RingSpec fp(cx.p, 1, 1);
  for (int k = 0; k <= k_max; ++k) {
    for (i64 t = std::max<i64>(t_min, 0); t <= t_max; ++t) {
      auto it = cx.cells.find({k, t});
      if (it == cx.cells.end()) continue;
      const auto& cell = it->second;
      int dimC = static_cast<int>(cell.basis.size());
      if (dimC == 0) continue;

      int rank_out = 0;
      HowellBasis ker_out{};
      if (k < k_max) {
        rank_out = span_size_exponent(howell_form(cell.differential));
        ker_out = kernel_basis(cell.differential);
      } else {
        // outgoing differential unknown: kernel = everything, unreliable
        ker_out = howell_form(FlatMatrix::identity(fp, dimC));
      }
      int rank_in = 0;
      HowellBasis image_in{};
      auto below = cx.cells.find({k - 1, t});
      if (k > 0 && below != cx.cells.end() && below->second.differential.cols == dimC) {
        image_in = howell_form(below->second.differential);
        rank_in = span_size_exponent(image_in);
      }

      ExtWindowCell cellout;
      cellout.n = k;
      cellout.t = t;
      cellout.dim = span_size_exponent(ker_out) - rank_in;
      cellout.reliable = k < k_max;
      // representatives: kernel rows independent of the image
      HowellBasis span = image_in;
      if (k == 0 || below == cx.cells.end()) span = howell_form(FlatMatrix(fp, 0, dimC));
      for (int i = 0; i < ker_out.rows.rows; ++i) {
        std::vector<u64> row = ker_out.rows.row(i);
        if (in_span(row, span)) continue;
        // record the leading basis element as the representative label
        for (int j = 0; j < dimC; ++j)
          if (row[j]) {
            cellout.representatives.push_back(cell.basis[j]);
            break;
          }
        FlatMatrix grow(fp, span.rows.rows + 1, dimC);
        for (int r2 = 0; r2 < span.rows.rows; ++r2)
          for (int c2 = 0; c2 < dimC; ++c2) grow.at(r2, c2) = span.rows.at(r2, c2);
        for (int c2 = 0; c2 < dimC; ++c2) grow.at(span.rows.rows, c2) = row[c2];
        span = howell_form(grow);
      }
      out.push_back(std::move(cellout));
    }
  }
  return out;
}

}  // namespace plethora

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plethora/ring.hpp"

namespace plethora {

// ---------------------------------------------------------------------------
// Words in the algebra of power operations.  A letter is a pair (eps, r)
// standing for Q^r_eps; eps is identically 0 at p = 2.  Degrees and excess:
//
//   p = 2:  |Q^r| = r,             e(I) = r_1 - r_2 - ... - r_k
//   p > 2:  |Q^r_eps| = 2r(p-1)-eps,  e(I) = 2r_1 - eps_1 - sum_{i>=2} |Q^{r_i}_{eps_i}|
//
// Admissible: r_i <= 2 r_{i+1} (p = 2), r_i <= p r_{i+1} - eps_{i+1} (p > 2).
// ---------------------------------------------------------------------------

struct Letter {
  int eps = 0;
  i64 r = 0;
  auto operator<=>(const Letter&) const = default;
};

using Word = std::vector<Letter>;

inline i64 letter_degree(const Letter& l, i64 p) {
  return p == 2 ? l.r : 2 * l.r * (p - 1) - l.eps;
}

inline i64 word_degree(const Word& w, i64 p) {
  i64 d = 0;
  for (const Letter& l : w) d += letter_degree(l, p);
  return d;
}

inline i64 word_excess(const Word& w, i64 p) {
  if (w.empty()) return 0;
  i64 head = p == 2 ? w[0].r : 2 * w[0].r - w[0].eps;
  i64 rest = 0;
  for (std::size_t i = 1; i < w.size(); ++i) rest += letter_degree(w[i], p);
  return head - rest;
}

inline bool pair_admissible(const Letter& x, const Letter& y, i64 p) {
  return p == 2 ? x.r <= 2 * y.r : x.r <= p * y.r - y.eps;
}

inline bool word_admissible(const Word& w, i64 p) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (!pair_admissible(w[i], w[i + 1], p)) return false;
  return true;
}

struct WordStats {
  i64 degree;
  i64 excess;
  bool admissible;
};

inline WordStats word_stats(const Word& w, i64 p) {
  return WordStats{word_degree(w, p), word_excess(w, p), word_admissible(w, p)};
}

struct AdmissibleWord {
  i64 p = 2;
  Word entries;
  i64 degree = 0;
  i64 excess = 0;

  AdmissibleWord() = default;
  AdmissibleWord(i64 p_, Word w) : p(p_), entries(std::move(w)) {
    degree = word_degree(entries, p);
    excess = word_excess(entries, p);
    assert(word_admissible(entries, p));
  }
  auto operator<=>(const AdmissibleWord& o) const { return entries <=> o.entries; }
  bool operator==(const AdmissibleWord& o) const { return entries == o.entries; }
};

// An F_p-linear combination of admissible words, all of one degree.
struct OperationElement {
  i64 p = 2;
  std::map<Word, u64> terms;  // coefficients in (0, p)

  void add(const Word& w, u64 c) {
    c %= static_cast<u64>(p);
    if (!c) return;
    auto [it, fresh] = terms.emplace(w, 0);
    it->second = (it->second + c) % static_cast<u64>(p);
    if (!it->second) terms.erase(it);
  }

  bool is_zero() const { return terms.empty(); }
  bool operator==(const OperationElement&) const = default;
};

// ---------------------------------------------------------------------------
// Adem normalization: rewrite the leftmost inadmissible adjacent pair until
// every term is admissible.  The four p > 2 relations are keyed on the
// Bockstein flags of the pair; all sums run over the binomial convention of
// binom_conv, which supplies the cutoff.
// ---------------------------------------------------------------------------

// Rewrites the single inadmissible pair (x, y) as a combination of pairs.
inline std::vector<std::pair<std::array<Letter, 2>, u64>> adem_pair(const Letter& x,
                                                                    const Letter& y, i64 p) {
  assert(!pair_admissible(x, y, p));
  std::vector<std::pair<std::array<Letter, 2>, u64>> out;
  u64 pm = static_cast<u64>(p);
  auto sign = [&](i64 k) -> u64 { return (k % 2 == 0) ? 1 : pm - 1; };  // (-1)^k mod p

  if (p == 2) {
    // Q^{2s+r+1} Q^s = sum_i binom(r-i-1, i) Q^{2s+i+1} Q^{r+s-i}
    i64 s = y.r, r = x.r - 2 * s - 1;
    for (i64 i = 0; i <= r; ++i) {
      u64 c = binom_conv(r - i - 1, i, 2, 1);
      if (c) out.push_back({{Letter{0, 2 * s + i + 1}, Letter{0, r + s - i}}, c});
    }
    return out;
  }

  i64 s = y.r;
  if (x.eps == 0 && y.eps == 0) {
    i64 r = x.r - p * s - 1;
    for (i64 i = 0; i <= r; ++i) {
      u64 c = binom_conv((p - 1) * (r - i) - 1, i, p, 1);
      if (c) out.push_back({{Letter{0, p * s + i + 1}, Letter{0, r + s - i}}, mul_mod(sign(i + 1), c, pm)});
    }
  } else if (x.eps == 0 && y.eps == 1) {
    i64 r = x.r - p * s;
    for (i64 i = 0; i <= r; ++i) {
      u64 c1 = binom_conv((p - 1) * (r - i), i, p, 1);
      if (c1) out.push_back({{Letter{1, p * s + i}, Letter{0, r + s - i}}, mul_mod(sign(i), c1, pm)});
      u64 c2 = binom_conv((p - 1) * (r - i) - 1, i, p, 1);
      if (c2) out.push_back({{Letter{0, p * s + i}, Letter{1, r + s - i}}, mul_mod(sign(i + 1), c2, pm)});
    }
  } else if (x.eps == 1 && y.eps == 0) {
    i64 r = x.r - p * s - 1;
    for (i64 i = 0; i <= r; ++i) {
      u64 c = binom_conv((p - 1) * (r - i) - 1, i, p, 1);
      if (c) out.push_back({{Letter{1, p * s + i + 1}, Letter{0, r + s - i}}, mul_mod(sign(i + 1), c, pm)});
    }
  } else {
    i64 r = x.r - p * s;
    for (i64 i = 0; i <= r; ++i) {
      u64 c = binom_conv((p - 1) * (r - i) - 1, i, p, 1);
      if (c) out.push_back({{Letter{1, p * s + i}, Letter{1, r + s - i}}, mul_mod(sign(i + 1), c, pm)});
    }
  }
  return out;
}

enum class RewriteStrategy { LeftmostFirst, RightmostFirst };

inline OperationElement adem_normalize(const Word& word, i64 p,
                                       RewriteStrategy strategy = RewriteStrategy::LeftmostFirst) {
  OperationElement result;
  result.p = p;
  std::vector<std::pair<Word, u64>> work{{word, 1}};
  while (!work.empty()) {
    auto [w, c] = std::move(work.back());
    work.pop_back();
    int pos = -1;
    if (strategy == RewriteStrategy::LeftmostFirst) {
      for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (!pair_admissible(w[i], w[i + 1], p)) {
          pos = static_cast<int>(i);
          break;
        }
    } else {
      for (std::size_t i = w.size(); i-- > 1;)
        if (!pair_admissible(w[i - 1], w[i], p)) {
          pos = static_cast<int>(i - 1);
          break;
        }
    }
    if (pos < 0) {
      result.add(w, c);
      continue;
    }
    for (const auto& [pair, pc] : adem_pair(w[pos], w[pos + 1], p)) {
      Word nw = w;
      nw[pos] = pair[0];
      nw[pos + 1] = pair[1];
      work.push_back({std::move(nw), mul_mod(c, pc, static_cast<u64>(p))});
    }
  }
  return result;
}

inline OperationElement adem_normalize_ints(const std::vector<i64>& rs, i64 p,
                                            RewriteStrategy strategy = RewriteStrategy::LeftmostFirst) {
  Word w;
  for (i64 r : rs) w.push_back(Letter{0, r});
  return adem_normalize(w, p, strategy);
}

// ---------------------------------------------------------------------------
// Basis enumeration.  Words are built by prepending letters to admissible
// suffixes.  At every step the new letter is bounded below by the
// instability threshold (the operation must act nontrivially on what stands
// to its right) and above by admissibility against the previous head, so
// every range is finite; the all-zero words in degree 0 are the one family
// that only the length cap stops, and the `capped` flag records when the cap
// actually bound.
//
// The empty word (the module generator itself) is always alive; its literal
// excess 0 is not consulted.
// ---------------------------------------------------------------------------

struct EnumerationResult {
  std::vector<AdmissibleWord> words;
  bool capped = false;  // true if a length-capped word admitted a further extension
};

namespace detail {

// Enumerate admissible words with every suffix alive: each letter must have
// value (r at p = 2, 2r - eps at p > 2) at least D + u where D is the degree
// of everything to its right including e_n.  For admissible words this
// stepwise condition is equivalent to e(I) >= n + u.  Words are built by
// prepending; `current` stores letters rightmost-first.
inline void enumerate_admissible(i64 p, i64 n, i64 u, i64 deg_min, i64 deg_max, int cap,
                                 bool degree_includes_n, EnumerationResult& out) {
  const i64 deg_cap = deg_max + (degree_includes_n ? 0 : n);  // cap on D itself
  // A branch at degree D' can still reach the window iff D' <= deg_cap, or
  // D' < -u so that later (negative-degree) letters may pull it back down.
  const i64 live_cap = std::max(deg_cap, -u);

  Word current;
  std::function<void(i64)> rec = [&](i64 D) {
    i64 shown = D - (degree_includes_n ? 0 : n);
    if (shown >= deg_min && shown <= deg_max) {
      Word w(current.rbegin(), current.rend());
      out.words.emplace_back(p, std::move(w));
    }

    auto try_letter = [&](Letter l) {
      if (!current.empty() && !pair_admissible(l, current.back(), p)) return;
      if (D + letter_degree(l, p) > live_cap) return;
      if (static_cast<int>(current.size()) == cap) {
        out.capped = true;
        return;
      }
      current.push_back(l);
      rec(D + letter_degree(l, p));
      current.pop_back();
    };

    if (p == 2) {
      i64 lo = D + u;  // alive bound
      i64 hi = current.empty() ? live_cap - D : std::min(2 * current.back().r, live_cap - D);
      for (i64 r = lo; r <= hi; ++r) try_letter(Letter{0, r});
    } else {
      for (int eps = 0; eps <= 1; ++eps) {
        i64 lo = D + u + eps >= 0 ? (D + u + eps + 1) / 2 : (D + u + eps) / 2;
        while (2 * lo - eps < D + u) ++lo;
        // degree budget: 2r(p-1) - eps <= live_cap - D
        i64 budget = live_cap - D + eps;
        i64 hi_deg = budget >= 0 ? budget / (2 * (p - 1)) : lo - 1;
        i64 hi = current.empty() ? hi_deg
                                 : std::min(hi_deg, p * current.back().r - current.back().eps);
        for (i64 r = lo; r <= hi; ++r) try_letter(Letter{eps, r});
      }
    }
  };
  rec(n);
}

}  // namespace detail

// Basis of the free u-unstable module F^u(e_n) in a window of total degrees
// |Q^I e_n| (n included), words of length <= cap.
inline EnumerationResult free_basis_window(i64 n, i64 u, i64 deg_min, i64 deg_max, int cap, i64 p) {
  EnumerationResult out;
  detail::enumerate_admissible(p, n, u, deg_min, deg_max, cap, /*degree_includes_n=*/true, out);
  std::sort(out.words.begin(), out.words.end());
  return out;
}

// Polynomial generators of the free DL-ring on a class of degree n: strict
// excess e(I) > n, i.e. threshold n + 1, window on the operation degree |Q^I|.
inline EnumerationResult dl_generators(i64 n, i64 deg_min, i64 deg_max, int cap, i64 p) {
  EnumerationResult out;
  detail::enumerate_admissible(p, n, 1, deg_min, deg_max, cap, /*degree_includes_n=*/false, out);
  std::sort(out.words.begin(), out.words.end());
  return out;
}

// ---------------------------------------------------------------------------
// Module actions: a finitely presented F^u-module with an explicitly
// tabulated action window.
// ---------------------------------------------------------------------------

struct ModuleElement {
  std::map<std::string, u64> terms;  // generator label -> coefficient mod p

  void add(const std::string& g, u64 c, i64 p) {
    c %= static_cast<u64>(p);
    if (!c) return;
    auto [it, fresh] = terms.emplace(g, 0);
    it->second = (it->second + c) % static_cast<u64>(p);
    if (!it->second) terms.erase(it);
  }
  bool is_zero() const { return terms.empty(); }
  bool operator==(const ModuleElement&) const = default;
};

struct FModuleData {
  i64 p = 2;
  i64 u = 0;
  i64 r_min = 0, r_max = 0;  // declared action window on r
  std::map<std::string, i64> degrees;
  // (generator, eps, r) -> value; entries absent inside the window are zero.
  std::map<std::tuple<std::string, int, i64>, ModuleElement> table;

  void set_degree(const std::string& g, i64 d) { degrees[g] = d; }

  void set_action(const std::string& g, int eps, i64 r, ModuleElement v) {
    i64 d = degrees.at(g);
    bool dead = p == 2 ? (r < d + u) : (2 * r - eps < d + u);
    assert(!(dead && !v.is_zero()));  // action must respect instability
    (void)dead;
    table[{g, eps, r}] = std::move(v);
  }

  // Apply a single operation letter.
  ModuleElement apply_letter(const Letter& l, const ModuleElement& x) const {
    ModuleElement out;
    for (const auto& [g, c] : x.terms) {
      i64 d = degrees.at(g);
      bool dead = p == 2 ? (l.r < d + u) : (2 * l.r - l.eps < d + u);
      if (dead) continue;  // forced zero, no table consultation needed
      if (l.r < r_min || l.r > r_max)
        throw WindowExceededError("action table consulted at r=" + std::to_string(l.r) +
                                  " outside window");
      auto it = table.find({g, l.eps, l.r});
      if (it == table.end()) continue;
      for (const auto& [h, hc] : it->second.terms) out.add(h, mul_mod(c, hc, static_cast<u64>(p)), p);
    }
    return out;
  }

  i64 element_degree(const ModuleElement& x) const {
    assert(!x.is_zero());
    i64 d = degrees.at(x.terms.begin()->first);
    for (const auto& [g, c] : x.terms) assert(degrees.at(g) == d);
    return d;
  }
};

// Apply an operation element left-to-right (rightmost letter acts first).
inline ModuleElement apply_to_module(const OperationElement& op, const ModuleElement& x,
                                     const FModuleData& data) {
  ModuleElement out;
  for (const auto& [w, c] : op.terms) {
    ModuleElement cur = x;
    for (auto it = w.rbegin(); it != w.rend() && !cur.is_zero(); ++it)
      cur = data.apply_letter(*it, cur);
    for (const auto& [g, gc] : cur.terms)
      out.add(g, mul_mod(gc, c, static_cast<u64>(data.p)), data.p);
  }
  return out;
}

// The trivial (augmentation) module on one generator: every operation acts
// by zero.
inline FModuleData trivial_module(i64 p, i64 u, const std::string& gen, i64 degree, i64 r_min,
                                  i64 r_max) {
  FModuleData d;
  d.p = p;
  d.u = u;
  d.r_min = r_min;
  d.r_max = r_max;
  d.set_degree(gen, degree);
  return d;
}

}  // namespace plethora

// Acceptance suite: one pass/fail line per criterion, exact comparisons at
// the stated precisions.  Exit status is nonzero if any criterion fails.
//
// Known state: criterion 2's displayed-value comparison fails on the three
// c_2-components of the c_4-rows and on the displayed presentation (they are
// inconsistent with the displayed coaction by the complex identity; see the
// tests and project notes), and criterion 12 inherits those two checks.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "plethora/verify.hpp"
#include "test_rng.hpp"

using namespace plethora;

namespace {
int g_failures = 0;

void criterion(int number, const std::string& title, const std::function<bool(std::string&)>& fn) {
  auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = fn(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start)
                .count();
  std::printf("%s criterion %2d (%lld ms): %s%s%s\n", pass ? "PASS" : "FAIL", number,
              static_cast<long long>(ms), title.c_str(), detail.empty() ? "" : " -- ",
              detail.c_str());
  if (!pass) ++g_failures;
}

ModulePresentation su4_paper_presentation(const RingSpec& spec) {
  ModulePresentation paper;
  paper.spec = spec;
  paper.gens = {"c3d", "c3d2", "c4d", "c4d2"};
  paper.relations = TruncMatrix(spec, 5, 4);
  TruncScalar A = TruncScalar::var_a(spec);
  auto C = [&](i64 v) { return TruncScalar::from_int(spec, v); };
  paper.relations.at(0, 1) = C(4);
  paper.relations.at(1, 0) = C(2);
  paper.relations.at(1, 1) = -A;
  paper.relations.at(2, 3) = C(4);
  paper.relations.at(3, 2) = C(2) * A;
  paper.relations.at(3, 3) = -(A * A);
  paper.relations.at(4, 2) = C(4);
  paper.relations.at(4, 1) = C(-2) * A;
  paper.relations.at(4, 3) = C(-2) * A;
  return paper;
}
}  // namespace

int main() {
  // 1. Height-2 quadratic dual at (2,10,10)
  criterion(1, "height-2 quadratic dual: rank-6 cohomology and the seven R-perp elements",
            [](std::string& detail) {
              RingSpec spec(2, 10, 10, 4);
              GammaCohomology h = gamma_cohomology(spec);
              bool rank6 = h.basis.size() == 6 && h.h3_rank == 0;
              QuadraticDatum dual = quadratic_dual(gamma_datum(spec));
              TruncMatrix got(spec, static_cast<int>(dual.relations.size()), 9);
              for (std::size_t i = 0; i < dual.relations.size(); ++i)
                for (int j = 0; j < 9; ++j)
                  got.at(static_cast<int>(i), j) = dual.relations[i][static_cast<std::size_t>(j)];
              TruncMatrix want(spec, 7, 9);
              TruncScalar a = TruncScalar::var_a(spec);
              auto C = [&](i64 v) { return TruncScalar::from_int(spec, v); };
              auto set = [&](int row, int x, int y, TruncScalar c) {
                want.at(row, x * 3 + y) = c;
              };
              set(0, 0, 0, C(1));
              set(1, 1, 1, C(1));
              set(2, 2, 2, C(1));
              set(3, 1, 0, C(1));
              set(3, 0, 2, C(1));
              set(4, 1, 2, C(1));
              set(4, 0, 1, C(2));
              set(5, 2, 1, C(1));
              set(5, 0, 2, C(-2));
              set(6, 2, 0, C(1));
              set(6, 0, 1, C(-2));
              set(6, 0, 2, a);
              bool rperp = spans_equal(got, want);
              // truncation-stability recheck at (M+2, N+2)
              RingSpec hi(2, 12, 12, 4);
              GammaCohomology h2 = gamma_cohomology(hi);
              bool stable = h2.basis.size() == 6 && h2.h3_rank == 0;
              for (const auto& [key, val] : h.products) {
                const auto& v2 = h2.products.at(key);
                if (!(v2[0].reduce_to(spec) == val[0] && v2[1].reduce_to(spec) == val[1]))
                  stable = false;
              }
              detail = std::string("rank6=") + (rank6 ? "ok" : "NO") +
                       " rperp=" + (rperp ? "ok" : "NO") + " stability=" + (stable ? "ok" : "NO");
              return rank6 && rperp && stable;
            });

  // 2. SU(4) golden test at (12,12)
  criterion(2, "SU(4) golden test: nine displayed delta values and the displayed Ext^2",
            [](std::string& detail) {
              RingSpec spec(2, 12, 12, 4);
              TaqReport rep = taq_su(4, spec);
              GammaScalar d = GammaScalar::d(spec), a = GammaScalar::a(spec);
              auto N = [&](i64 v) { return GammaScalar::from_int(spec, v); };
              auto poly = [&](std::vector<i64> dc, std::vector<i64> d2c) {
                GammaScalar g(spec);
                g.c[1] = TruncScalar::from_coeffs(spec, dc);
                g.c[2] = TruncScalar::from_coeffs(spec, d2c);
                return g;
              };
              int mismatch = 0, total = 0;
              auto row = [&](int i, int j, std::vector<std::pair<int, GammaScalar>> want) {
                const auto& v = rep.d1.at({i, j});
                std::vector<std::array<TruncScalar, 2>> expect(
                    v.size(), {TruncScalar::zero(spec), TruncScalar::zero(spec)});
                for (auto& [t, gs] : want) {
                  expect[static_cast<std::size_t>(t)][0] += gs.c[1];
                  expect[static_cast<std::size_t>(t)][1] += gs.c[2];
                }
                for (std::size_t t = 0; t < v.size(); ++t) {
                  ++total;
                  if (!(v[t][0] == expect[t][0] && v[t][1] == expect[t][1])) ++mismatch;
                }
              };
              row(0, 0, {{0, d * d}});
              row(0, 1, {});
              row(0, 2, {{0, N(2) * d}});
              row(1, 0, {{1, N(2) * d - a * d * d}, {0, N(-6) * a * d + N(3) * a * a * d * d}});
              row(1, 1, {{1, N(2) * d * d}, {0, N(9) * d - N(6) * a * d * d}});
              row(1, 2, {{0, N(9) * d * d}});
              row(2, 0, {{2, N(-2) * a * d + a * a * d * d},
                         {1, N(8) * a * a * d + (N(12) - N(4) * a.pow(3)) * d * d},
                         {0, poly({-66, 0, -40, 88, 0, 6, -6}, {0, 113, 0, 32, -56, 0, -3, 3})}});
              row(2, 1, {{2, N(4) * d - N(2) * a * d * d},
                         {1, N(-16) * a * d + N(8) * a * a * d * d},
                         {0, poly({0, 33, -128, 0, -12, 12}, {-66, 0, -40, 88, 0, 6, -6})}});
              row(2, 2, {{2, N(4) * d * d},
                         {1, N(24) * d - N(16) * a * d * d},
                         {0, poly({0, 160, 0, 24, -24}, {0, 33, -128, 0, -12, 12})}});
              bool pres = presentations_isomorphic(rep.ext2_raw, su4_paper_presentation(spec));
              detail = std::to_string(mismatch) + "/" + std::to_string(total) +
                       " displayed components differ; displayed presentation " +
                       (pres ? "matches" : "does not match") +
                       " (known discrepancy: the displayed c_2-components of the c_4-rows fail"
                       " delta.delta = 0 against the displayed coaction)";
              return mismatch == 0 && pres;
            });

  // 3. SU(2) pipeline with the hand-derived fixture
  criterion(3, "SU(2): Ext^2 is E_0/2 on one generator", [](std::string&) {
    RingSpec spec(2, 10, 10, 4);
    TaqReport rep = taq_su(2, spec);
    // hand fixture: delta(c_2) = c_2 d^2, delta(c_2 d) = 0, delta(c_2 d^2) = 2 c_2 d
    ModulePresentation fixture;
    fixture.spec = spec;
    fixture.gens = {"c2d", "c2d2"};
    fixture.relations = TruncMatrix(spec, 3, 2);
    fixture.relations.at(0, 1) = TruncScalar::one(spec);
    fixture.relations.at(2, 0) = TruncScalar::from_int(spec, 2);
    if (!presentations_isomorphic(rep.ext2_raw, fixture)) return false;
    ModulePresentation cyclic;
    cyclic.spec = spec;
    cyclic.gens = {"c2d"};
    cyclic.relations = TruncMatrix(spec, 1, 1);
    cyclic.relations.at(0, 0) = TruncScalar::from_int(spec, 2);
    return presentations_isomorphic(rep.ext2_raw, cyclic);
  });

  // 4. Total power operation
  criterion(4, "total power operation: P(u)^2 through u^4 and P(u) = u^2 mod d through u^12",
            [](std::string&) {
              RingSpec w(2, 12, 16, 0);
              GammaPoly P = total_power(w, 12);
              GammaPoly P2 = P * P;
              GammaScalar d = GammaScalar::d(w), a = GammaScalar::a(w);
              auto N = [&](i64 v) { return GammaScalar::from_int(w, v); };
              bool ok = P2.c[2] == d * d && P2.c[3] == N(-2) * (a * d * d + N(3) * d) &&
                        P2.c[4] == N(1) + N(4) * d.pow(3) + N(3) * d.pow(6);
              return ok && total_power_frobenius_congruence(w, 12);
            });

  // 5. Height-1 Ext
  criterion(5, "height-1 Ext: |Ext^1(Z_p{t}, omega^n)| = p^{n-1}; (Z_p{s}, omega) full",
            [](std::string&) {
              for (i64 p : {2, 3, 5}) {
                for (int n = 1; n <= 6; ++n) {
                  if (height1_ext(0, n, p, 12).ext1_exponent != n - 1) return false;
                  // stability recheck at higher p-adic precision
                  if (height1_ext(0, n, p, 14).ext1_exponent != n - 1) return false;
                }
                Height1Ext e = height1_ext(1, 1, p, 12);
                if (e.ext0_exponent != 12 || e.ext1_exponent != 12) return false;
                Height1Ext e2 = height1_ext(1, 1, p, 14);
                if (e2.ext0_exponent != 14 || e2.ext1_exponent != 14) return false;
              }
              return true;
            });

  // 6. Orientation determinant
  criterion(6, "orientation determinant equals 1-(1-x)^p mod (p^M, x^12) for p in {2,3,5}",
            [](std::string&) {
              for (i64 p : {2, 3, 5}) {
                if (!orientation_det(p, 12, 12).matches) return false;
                if (!orientation_det(p, 14, 14).matches) return false;  // stability
              }
              return true;
            });

  // 7. Structure maps
  criterion(7, "structure maps: suspension and quotient pass, perturbed map fails with witness",
            [](std::string&) {
              RingSpec w(2, 10, 12, 0);
              QuadraticDatum gamma = gamma_datum(w), delta = delta_datum(w);
              if (!structure_map_check(delta, gamma, suspension_images(w)).pass()) return false;
              if (!structure_map_check(gamma, delta, quotient_images(w)).pass()) return false;
              StructureMapReport bad =
                  structure_map_check(delta, gamma, perturbed_suspension_images(w));
              return !bad.pass() && !bad.witness.empty();
            });

  // 8. Adem property suite
  criterion(8, "Adem suite: idempotence, degree, admissibility, confluence on 500 words x {2,3}",
            [](std::string&) {
              TestRng rng(0xACE);
              for (i64 p : {2, 3}) {
                for (int iter = 0; iter < 500; ++iter) {
                  Word w;
                  for (int k = 0; k < 3; ++k)
                    w.push_back(Letter{p == 2 ? 0 : static_cast<int>(rng.next_in(2)),
                                       rng.range(-3, 9)});
                  OperationElement left = adem_normalize(w, p, RewriteStrategy::LeftmostFirst);
                  OperationElement right = adem_normalize(w, p, RewriteStrategy::RightmostFirst);
                  if (!(left == right)) return false;
                  i64 deg = word_degree(w, p);
                  for (const auto& [term, c] : left.terms) {
                    if (!word_admissible(term, p)) return false;
                    if (word_degree(term, p) != deg) return false;
                    OperationElement fixed;
                    fixed.p = p;
                    fixed.add(term, 1);
                    if (!(adem_normalize(term, p) == fixed)) return false;
                  }
                }
              }
              return true;
            });

  // 9. Lambda suite
  criterion(9, "lambda suite: relation examples, delta^2 = 0 window, dimension agreement, "
               "unstable closure",
            [](std::string&) {
              LambdaElement zero;
              zero.p = 2;
              if (!(lambda_rewrite_ints({0, 1}) == zero)) return false;
              LambdaElement want;
              want.p = 2;
              want.add({LLetter{1, 0}, LLetter{1, 0}}, "", 1);
              if (!(lambda_rewrite_ints({0, 2}) == want)) return false;

              // delta^2 = 0 on a (length <= 3, |internal| <= 12) window over a
              // genuinely nontrivial coefficient module
              FModuleData data;
              data.p = 2;
              data.u = 0;
              data.r_min = 0;
              data.r_max = 16;
              {
                auto basis = free_basis_window(1, 0, 1, 7, 8, 2);
                auto label = [&](const Word& w) {
                  std::string s = "e";
                  for (const Letter& l : w) s += "_" + std::to_string(l.r);
                  return s;
                };
                for (const auto& aw : basis.words) data.set_degree(label(aw.entries), 1 + aw.degree);
                for (const auto& aw : basis.words) {
                  i64 deg = 1 + aw.degree;
                  for (i64 r = deg; r <= 16; ++r) {
                    Word w = aw.entries;
                    w.insert(w.begin(), Letter{0, r});
                    OperationElement nf = adem_normalize(w, 2);
                    ModuleElement v;
                    for (const auto& [term, c] : nf.terms) {
                      if (!term.empty() && word_excess(term, 2) < 1) continue;
                      if (1 + word_degree(term, 2) > 7) continue;
                      v.add(label(term), c, 2);
                    }
                    data.set_action(label(aw.entries), 0, r, v);
                  }
                }
              }
              for (i64 a : {-2, 0, 2}) {
                LambdaComplexWindow cx = lambda_complex_window(data, a, 3, 0, 12);
                for (const auto& [key, cell] : cx.cells) {
                  auto nxt = cx.cells.find({key.first + 1, key.second});
                  if (key.first + 2 > cx.k_max || nxt == cx.cells.end()) continue;
                  if (cell.differential.cols == 0 || nxt->second.differential.cols == 0) continue;
                  FlatMatrix sq = flat_mul(cell.differential, nxt->second.differential);
                  for (u64 v : sq.e)
                    if (v) return false;
                }
              }

              // bidegree dimension agreement
              for (i64 p : {2, 3})
                for (int n = 0; n <= 3; ++n)
                  for (i64 a = -6; a <= 6; ++a)
                    for (i64 b = a - 20; b <= a; ++b) {
                      if (b < -20 || b > 20) continue;
                      if (!(ext_basis_source(n, a, b, p) == ext_basis_target(n, b, a, a, p)))
                        return false;
                    }

              // unstable filter closure
              auto basis = ext_basis_target(2, -8, -8, 8, 2);
              for (const LambdaWord& w : unstable_restrict(basis)) {
                LambdaElement e = lambda_rewrite(w, 2);
                for (const auto& [key, c] : e.terms)
                  for (const LLetter& l : key.first)
                    if (l.r < 0) return false;
              }
              return true;
            });

  // 10. Koszul-vs-cobar oracle
  criterion(10, "Koszul vs cobar: exterior and height-2 data agree; pinned non-Koszul fails",
            [](std::string&) {
              // exterior algebra over F_2
              RingSpec f2(2, 1, 1);
              QuadraticDatum ext;
              ext.H.spec = f2;
              ext.H.labels = {"x"};
              ext.H.action = TruncMatrix(f2, 1, 1);
              TensorVec rho = tensor_zero(f2, 1, 2);
              rho[0] = TruncScalar::one(f2);
              ext.relations.push_back(rho);
              auto dims = cobar_ext_trivial(ext, 3);
              QuadraticDatum extdual = quadratic_dual(ext);
              for (int m = 1; m <= 3; ++m)
                for (int n = 1; n <= m; ++n)
                  if (dims.at({n, m}) != (n == m ? grade_piece_rank(extdual, n) : 0)) return false;
              if (!koszulity_check(ext, 4).pass) return false;

              // height-2 datum
              RingSpec small = widened(RingSpec(2, 4, 3), 8);
              QuadraticDatum gamma = gamma_datum(small);
              QuadraticDatum dual = quadratic_dual(gamma);
              auto gdims = cobar_ext_trivial(gamma, 3);
              int unit = small.M * small.N;
              for (int m = 1; m <= 3; ++m)
                for (int n = 1; n <= m; ++n)
                  if (gdims.at({n, m}) != (n == m ? unit * grade_piece_rank(dual, n) : 0))
                    return false;
              if (!koszulity_check(gamma, 3).pass) return false;

              // pinned non-Koszul instance with witness bidegree
              QuadraticDatum bad;
              bad.H.spec = f2;
              bad.H.labels = {"x", "y", "z"};
              bad.H.action = TruncMatrix(f2, 3, 3);
              for (int mask : {357, 43, 422}) {
                TensorVec v = tensor_zero(f2, 3, 2);
                for (int b = 0; b < 9; ++b)
                  if (mask & (1 << b)) v[static_cast<std::size_t>(b)] = TruncScalar::one(f2);
                bad.relations.push_back(v);
              }
              KoszulityReport r = koszulity_check(bad, 4);
              return !r.pass && !r.failures.empty() && std::get<0>(r.failures[0]) == 3 &&
                     std::get<1>(r.failures[0]) == 4;
            });

  // 11. coeff and linalg property suites
  criterion(11, "coeff and linalg property suites over 1000+ randomized cases", [](std::string&) {
    TestRng rng(0xBEEF);
    RingSpec spec(2, 12, 12, 4);
    for (int iter = 0; iter < 1000; ++iter) {
      TruncScalar x = rng.scalar(spec), y = rng.scalar(spec), z = rng.scalar(spec);
      if (!((x + y) + z == x + (y + z))) return false;
      if (!(x * (y + z) == x * y + x * z)) return false;
      if (!(x * y == y * x)) return false;
      TruncScalar u = rng.unit(spec);
      if (!(trunc_invert(u) * u == TruncScalar::one(spec))) return false;
      i64 m = 1 + rng.next_in(8);
      RingSpec lo(2, 8, 12, 0);
      if (!(exact_divide(m * x, m, lo) == x.reduce_to(lo))) return false;
    }
    // Pascal recurrence
    for (i64 p : {2, 3, 5}) {
      u64 mod = RingSpec(p, 4, 1).modulus();
      for (i64 n = -10; n <= 30; ++n)
        for (i64 m2 = -10; m2 <= 30; ++m2) {
          if (n == 0 && m2 == 0) continue;
          if (binom_conv(n, m2, p, 4) !=
              add_mod(binom_conv(n - 1, m2 - 1, p, 4), binom_conv(n - 1, m2, p, 4), mod))
            return false;
        }
    }
    // Howell canonicity and span invariance; kernel correctness; flatten
    RingSpec z8(2, 3, 1);
    for (int iter = 0; iter < 400; ++iter) {
      FlatMatrix m(z8, 4, 5);
      for (auto& v : m.e) v = rng.next() % z8.modulus();
      HowellBasis h = howell_form(m);
      if (!(howell_form(h.rows) == h)) return false;
      for (int i = 0; i < m.rows; ++i)
        if (!in_span(m.row(i), h)) return false;
      // invertible row operations preserve the form
      FlatMatrix m2 = m;
      for (int step = 0; step < 8; ++step) {
        int i = static_cast<int>(rng.next_in(4)), k = static_cast<int>(rng.next_in(4));
        u64 c = rng.next() % z8.modulus();
        if (i == k) c |= 1;
        for (int j = 0; j < 5; ++j)
          m2.at(i, j) = i == k ? mul_mod(m2.at(i, j), c, z8.modulus())
                               : add_mod(m2.at(i, j), mul_mod(c, m2.at(k, j), z8.modulus()),
                                         z8.modulus());
      }
      if (!(howell_form(m2) == h)) return false;
      HowellBasis ker = kernel_basis(m);
      for (int i = 0; i < ker.rows.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) {
          u64 acc = 0;
          for (int l = 0; l < m.rows; ++l)
            acc = add_mod(acc, mul_mod(ker.rows.at(i, l), m.at(l, j), z8.modulus()), z8.modulus());
          if (acc) return false;
        }
      }
    }
    RingSpec trunc(2, 3, 3);
    for (int iter = 0; iter < 100; ++iter) {
      TruncMatrix a(trunc, 3, 3), b(trunc, 3, 3);
      for (auto& v : a.e) v = rng.scalar(trunc);
      for (auto& v : b.e) v = rng.scalar(trunc);
      if (!(flatten(trunc_mul(a, b)) == flat_mul(flatten(a), flatten(b)))) return false;
    }
    return true;
  });

  // 12. verify-paper aggregation
  criterion(12, "verify-paper aggregates the golden suite and exits 0", [](std::string& detail) {
    auto checks = verify_paper();
    int failures = 0;
    std::string failing;
    for (const auto& c : checks)
      if (!c.pass) {
        ++failures;
        failing += (failing.empty() ? "" : ", ") + c.name;
      }
    detail = std::to_string(checks.size()) + " checks, " + std::to_string(failures) +
             " failing" + (failing.empty() ? "" : " (" + failing + ")");
    return failures == 0;
  });

  std::printf("%d criterion(s) failing\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}

#include <catch2/catch_amalgamated.hpp>

#include "plethora/dyer_lashof.hpp"
#include "test_rng.hpp"

using namespace plethora;

namespace {
Word w2(std::vector<i64> rs) {
  Word w;
  for (i64 r : rs) w.push_back(Letter{0, r});
  return w;
}

OperationElement single(i64 p, Word w, u64 c = 1) {
  OperationElement e;
  e.p = p;
  e.add(w, c);
  return e;
}

std::vector<Word> word_list(const EnumerationResult& r) {
  std::vector<Word> out;
  for (const auto& aw : r.words) out.push_back(aw.entries);
  return out;
}
}  // namespace

TEST_CASE("word_stats") {
  CHECK(word_stats(w2({2, 1}), 2).degree == 3);
  CHECK(word_stats(w2({2, 1}), 2).excess == 1);
  CHECK(word_stats(w2({2, 1}), 2).admissible);
  CHECK(word_stats(w2({3, 1}), 2).degree == 4);
  CHECK(word_stats(w2({3, 1}), 2).excess == 2);
  CHECK(!word_stats(w2({3, 1}), 2).admissible);
  CHECK(word_stats({}, 2).degree == 0);
  CHECK(word_stats({}, 2).excess == 0);
  CHECK(word_stats({}, 2).admissible);
  // odd p degree and excess
  Word w{{1, 2}, {0, 1}};  // Q^2_1 Q^1 at p = 3
  CHECK(word_stats(w, 3).degree == (2 * 2 * 2 - 1) + 2 * 1 * 2);
  CHECK(word_stats(w, 3).excess == (2 * 2 - 1) - 4);
  CHECK(word_stats(w, 3).admissible);  // 2 <= 3*1 - 0
}

TEST_CASE("adem_normalize at p = 2") {
  CHECK(adem_normalize_ints({2, 0}, 2) == single(2, w2({1, 1})));
  CHECK(adem_normalize_ints({3, 1}, 2).is_zero());
  CHECK(adem_normalize_ints({4, 1}, 2) == single(2, w2({3, 2})));
  // already admissible words are fixed
  CHECK(adem_normalize_ints({2, 1}, 2) == single(2, w2({2, 1})));
  CHECK(adem_normalize(Word{}, 2) == single(2, {}));
}

TEST_CASE("adem_normalize properties") {
  TestRng rng(1234);
  for (i64 p : {2, 3}) {
    for (int iter = 0; iter < 500; ++iter) {
      Word w;
      for (int k = 0; k < 3; ++k)
        w.push_back(Letter{p == 2 ? 0 : static_cast<int>(rng.next_in(2)), rng.range(-3, 9)});
      CAPTURE(p, w.size(), w[0].r, w[1].r, w[2].r);
      OperationElement left = adem_normalize(w, p, RewriteStrategy::LeftmostFirst);
      i64 deg = word_degree(w, p);
      for (const auto& [term, c] : left.terms) {
        REQUIRE(word_admissible(term, p));       // output admissible
        REQUIRE(word_degree(term, p) == deg);    // degree preserved
        // idempotence: every output word is already a fixed point
        REQUIRE(adem_normalize(term, p) == single(p, term));
      }
      // confluence sampling: strategy independence
      OperationElement right = adem_normalize(w, p, RewriteStrategy::RightmostFirst);
      REQUIRE(left == right);
    }
  }
}

TEST_CASE("free_basis_window") {
  SECTION("degree-4 slice of F(e_1)") {
    auto r = free_basis_window(1, 0, 4, 4, 3, 2);
    CHECK(word_list(r) == std::vector<Word>{w2({2, 1}), w2({3})});
  }
  SECTION("all-zero words of excess 0") {
    auto r = free_basis_window(0, 0, 0, 0, 2, 2);
    CHECK(word_list(r) == std::vector<Word>{{}, w2({0}), w2({0, 0})});
    CHECK(r.capped);  // (0,0,0) extends further; only the cap stopped it
  }
  SECTION("suspension shift") {
    auto r = free_basis_window(0, 1, 1, 1, 2, 2);
    CHECK(word_list(r) == std::vector<Word>{w2({1})});
  }
  SECTION("u-shift matches explicit suspension of the u = 0 enumeration") {
    // Basis of F^1(e_n) in degree d (including n) must match basis of
    // F(e_{n+1}) in degree d+1 with every |.| shifted.
    for (i64 n = -2; n <= 2; ++n)
      for (i64 d = n; d <= n + 6; ++d) {
        auto shifted = free_basis_window(n, 1, d, d, 6, 2);
        auto suspended = free_basis_window(n + 1, 0, d + 1, d + 1, 6, 2);
        REQUIRE(word_list(shifted) == word_list(suspended));
      }
    for (i64 d = 0; d <= 8; ++d) {
      auto shifted = free_basis_window(0, 1, d, d, 6, 3);
      auto suspended = free_basis_window(1, 0, d + 1, d + 1, 6, 3);
      REQUIRE(word_list(shifted) == word_list(suspended));
    }
  }
  SECTION("instability predicate holds on output") {
    for (i64 p : {2, 3}) {
      auto r = free_basis_window(1, 0, 1, 10, 4, p);
      for (const auto& aw : r.words) {
        REQUIRE((aw.excess >= 1 || aw.entries.empty()));
        REQUIRE(word_admissible(aw.entries, p));
        // excess monotonicity e(I) <= value of last letter
        if (!aw.entries.empty()) {
          const Letter& last = aw.entries.back();
          i64 lastval = p == 2 ? last.r : 2 * last.r - last.eps;
          REQUIRE(aw.excess <= lastval);
        }
      }
    }
  }
}

TEST_CASE("dl_generators") {
  SECTION("window [1,3] on degree-0 class") {
    auto r = dl_generators(0, 1, 3, 2, 2);
    CHECK(word_list(r) == std::vector<Word>{w2({1}), w2({2}), w2({2, 1}), w2({3})});
  }
  SECTION("window [1,1]") {
    auto r = dl_generators(0, 1, 1, 1, 2);
    CHECK(word_list(r) == std::vector<Word>{w2({1})});
  }
  SECTION("excess > 2 forces degree >= 3") {
    auto r = dl_generators(2, 1, 2, 2, 2);
    CHECK(r.words.empty());
  }
}

TEST_CASE("apply_to_module") {
  SECTION("trivial module kills positive-length words") {
    FModuleData triv = trivial_module(2, 0, "m", 0, -5, 10);
    ModuleElement x;
    x.add("m", 1, 2);
    CHECK(apply_to_module(single(2, w2({3})), x, triv).is_zero());
    CHECK(apply_to_module(single(2, w2({})), x, triv) == x);
  }
  SECTION("Q^0 = identity in degree 0") {
    FModuleData d = trivial_module(2, 0, "m", 0, 0, 4);
    ModuleElement m;
    m.add("m", 1, 2);
    d.set_action("m", 0, 0, m);
    CHECK(apply_to_module(single(2, w2({0, 0})), m, d) == m);
  }
  SECTION("declared zero entries act by zero") {
    FModuleData d = trivial_module(2, 0, "g", -2, -3, 3);
    ModuleElement g;
    g.add("g", 1, 2);
    CHECK(apply_to_module(single(2, w2({1})), g, d).is_zero());
  }
  SECTION("window exceeded throws") {
    FModuleData d = trivial_module(2, 0, "m", 0, 0, 2);
    ModuleElement m;
    m.add("m", 1, 2);
    CHECK_THROWS_AS(apply_to_module(single(2, w2({5})), m, d), WindowExceededError);
  }
}

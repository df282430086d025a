#include <random>

#include "doctest.h"
#include "dlam/word.hpp"
#include "oracle.hpp"

using namespace dlam;

namespace {
const Basis abc = Basis::parse("abc");
Word W(const char* s) { return abc.parse_word(s); }
std::string F(const Word& w) { return abc.format(w); }
}  // namespace

TEST_CASE("parsing and formatting") {
  CHECK(F(W("a b b' c")) == "a c");
  CHECK(F(W("a")) == "a");
  CHECK(F(W("1")) == "1");
  CHECK(F(W("bab'")) == "b a b'");
  CHECK(F(W("b^2 a b^-2")) == "b b a b' b'");
  CHECK(F(W("a^-1")) == "a'");
  CHECK_THROWS_AS(W("a d"), FormatError);
  CHECK_THROWS_AS(W("a^"), FormatError);
  Basis named = Basis::parse("x1 x2 x3");
  CHECK(named.format(named.parse_word("x1 x2' x2 x3")) == "x1 x3");
  CHECK_THROWS_AS(Basis::parse("a"), FormatError);
  CHECK_THROWS_AS(Basis::parse("aba"), FormatError);
}

TEST_CASE("reduction agrees with the naive oracle") {
  std::mt19937 rng(7);
  for (int t = 0; t < 2000; ++t) {
    auto raw = oracle::random_letters(rng, 3, rng() % 16);
    CHECK(Word(raw).letters() == oracle::reduce(raw));
  }
}

TEST_CASE("reduce is a monoid-compatible normal form (exhaustive N=2, length <= 4)") {
  auto words = oracle::reduced_up_to(2, 4, true);
  for (const auto& u : words) {
    for (const auto& v : words) {
      std::vector<Letter> cat = u;
      cat.insert(cat.end(), v.begin(), v.end());
      Word uv = Word(u) * Word(v);
      CHECK(uv.letters() == oracle::reduce(cat));
      CHECK(uv.size() <= u.size() + v.size());
      CHECK((u.size() + v.size() - uv.size()) % 2 == 0);
    }
  }
}

TEST_CASE("reduce is idempotent and compatible, sampled at N=3 up to length 8") {
  std::mt19937 rng(11);
  for (int t = 0; t < 3000; ++t) {
    auto u = oracle::random_letters(rng, 3, rng() % 9);
    auto v = oracle::random_letters(rng, 3, rng() % 9);
    std::vector<Letter> cat = u;
    cat.insert(cat.end(), v.begin(), v.end());
    CHECK(Word(Word(cat).letters()) == Word(cat));
    CHECK(Word(u) * Word(v) == Word(cat));
  }
}

TEST_CASE("cyclic decomposition") {
  auto d = cyclic_decompose(W("b a b'"));
  CHECK(F(d.conjugator) == "b");
  CHECK(F(d.core) == "a");
  d = cyclic_decompose(W("a b c"));
  CHECK(d.conjugator.empty());
  CHECK(F(d.core) == "a b c");
  d = cyclic_decompose(W("b^2 a c a' b^-2"));
  CHECK(F(d.conjugator) == "b b a");
  CHECK(F(d.core) == "c");
  CHECK_THROWS(cyclic_decompose(Word()));

  std::mt19937 rng(3);
  for (int t = 0; t < 1000; ++t) {
    Word w(oracle::random_reduced(rng, 3, 1 + rng() % 12));
    auto dec = cyclic_decompose(w);
    CHECK(dec.conjugator * dec.core * dec.conjugator.inverse() == w);
    CHECK(w.size() == 2 * dec.conjugator.size() + dec.core.size());
    CHECK(dec.core.is_cyclically_reduced());
  }
}

TEST_CASE("cyclic words are least rotations of the conjugacy class") {
  std::mt19937 rng(5);
  for (int t = 0; t < 500; ++t) {
    Word w(oracle::random_reduced(rng, 3, 1 + rng() % 9));
    Word g(oracle::random_reduced(rng, 3, rng() % 5));
    CyclicWord c(w);
    CHECK(CyclicWord(g * w * g.inverse()) == c);
    CHECK(is_canonical_cyclic(c.word().letters()));
    // every rotation of the core is >= the canonical one
    const auto& core = c.word().letters();
    for (std::size_t r = 0; r < core.size(); ++r) {
      std::vector<Letter> rot(core.begin() + static_cast<long>(r), core.end());
      rot.insert(rot.end(), core.begin(), core.begin() + static_cast<long>(r));
      CHECK(c.word() <= Word::from_reduced(rot));
    }
  }
  CHECK(F(CyclicWord(W("c b a")).word()) == "a c b");
  CHECK(F(CyclicWord(W("a b a b")).root().word()) == "a b");
}

TEST_CASE("subwords") {
  WordSet s = subwords(W("abc"), 2);
  WordSet expect;
  for (const char* x : {"a", "b", "c", "a b", "b c"}) {
    expect.insert(W(x));
    expect.insert(W(x).inverse());
  }
  CHECK(s == expect);
  CHECK(subwords(W("a"), 3) == WordSet{W("a"), W("a'")});

  std::mt19937 rng(9);
  for (int t = 0; t < 200; ++t) {
    Word w(oracle::random_reduced(rng, 3, 1 + rng() % 10));
    WordSet set = subwords(w, 4);
    for (const auto& u : set) {
      CHECK(set.count(u.inverse()) == 1);
      for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t len = 1; i + len <= u.size(); ++len) CHECK(set.count(u.factor(i, len)) == 1);
    }
  }
}

TEST_CASE("chop") {
  CHECK(F(chop(W("a b c a b"), 1)) == "b c a");
  Word w = W("a b c");
  CHECK(chop(w, 0) == w);
  CHECK(chop(w, 2).empty());
  CHECK(chop(W("a b"), 1).empty());
}

TEST_CASE("ray normalization") {
  Ray r(W("a b"), W("b' a"));  // a b (b' a)^∞ = a a b' a b' ...
  CHECK(F(r.prefix()) == "a");
  CHECK(F(r.period()) == "a b'");
  Ray s(W("c"), W("a a"));
  CHECK(F(s.period()) == "a");
  Ray t(W("a"), W("b a b'"));  // a · b a^∞
  CHECK(F(t.prefix()) == "a b");
  CHECK(F(t.period()) == "a");
  Ray u(W("b a"), W("b a"));
  CHECK(u.prefix().empty());
  CHECK(F(u.period()) == "b a");

  std::mt19937 rng(13);
  for (int i = 0; i < 500; ++i) {
    Word p(oracle::random_reduced(rng, 3, rng() % 6));
    Word v(oracle::random_reduced(rng, 3, 1 + rng() % 5));
    Ray ray(p, v);
    // oracle: the infinite word read off a long explicit expansion
    std::vector<Letter> raw = p.letters();
    for (int k = 0; k < 12; ++k) raw.insert(raw.end(), v.begin(), v.end());
    auto red = oracle::reduce(raw);
    std::size_t n = std::min<std::size_t>(20, red.size() > 10 ? red.size() - 10 : 0);
    for (std::size_t k = 0; k < n; ++k) CHECK(ray.at(k) == red[k]);
    CHECK(primitive_root(ray.period()) == ray.period());
    CHECK(ray.period().is_cyclically_reduced());
    CHECK((ray.prefix().empty() || (ray.prefix().back() != inverse(ray.period().front()) &&
                                    ray.prefix().back() != ray.period().back())));
  }
}

TEST_CASE("recurrent language ignores the prefix") {
  Ray r(W("c"), W("a"));
  CHECK(recurrent_factors(r, 2) == WordSet{W("a"), W("a'"), W("a a"), W("a' a'")});
  Ray ab(Word(), W("a b"));
  std::mt19937 rng(17);
  for (int t = 0; t < 100; ++t) {
    Word v(oracle::random_reduced(rng, 3, 1 + rng() % 5));
    if (!v.is_cyclically_reduced()) continue;
    Word p(oracle::random_reduced(rng, 3, rng() % 5));
    Ray a(p, v), b(Word(), v);
    CHECK(recurrent_factors(a, 3) == recurrent_factors(b, 3));
    auto ex = oracle::long_expansion(v.letters(), 3);
    WordSet expect;
    for (std::size_t i = 0; i + 3 <= ex.size(); ++i)
      for (std::size_t len = 1; len <= 3; ++len) {
        Word f = Word::from_reduced(std::vector<Letter>(ex.begin() + static_cast<long>(i),
                                                        ex.begin() + static_cast<long>(i + len)));
        expect.insert(f);
        expect.insert(f.inverse());
      }
    CHECK(recurrent_factors(a, 3) == expect);
  }
  CHECK(recurrent_factors(ab, 3).count(W("a b a")) == 1);
}

TEST_CASE("rho and leaves") {
  Leaf l(Ray(Word(), W("a")), Ray(Word(), W("b")));
  CHECK(F(rho(l).central(2)) == "a' a' b b");
  Leaf m(Ray(W("a"), W("b")), Ray(W("a"), W("c")));
  CHECK(F(rho(m).central(2)) == "b' b' c c");
  CHECK_THROWS_AS(Leaf(Ray(Word(), W("a")), Ray(W("a"), W("a"))), InvalidLeaf);
  CHECK(l.flip().flip() == l);

  std::mt19937 rng(19);
  for (int t = 0; t < 300; ++t) {
    Ray x(Word(oracle::random_reduced(rng, 3, rng() % 5)), Word(oracle::random_reduced(rng, 3, 1 + rng() % 4)));
    Ray y(Word(oracle::random_reduced(rng, 3, rng() % 5)), Word(oracle::random_reduced(rng, 3, 1 + rng() % 4)));
    if (x == y) continue;
    auto b = rho(Leaf(x, y));
    for (std::size_t k = 1; k <= 20; ++k) {
      // X_k^{-1} X'_k reduces to the central window of length 2(k - h)
      Word direct = x.initial(k).inverse() * y.initial(k);
      std::size_t h = x.common_prefix(y);
      if (k >= h) CHECK(direct == b.central(k - h));
    }
  }
}

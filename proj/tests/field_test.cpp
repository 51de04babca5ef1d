#include "algdep/field.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace algdep;

namespace {

// Brute-force oracle: first irreducible monic quadratic over F_p in base-p
// coefficient order, where degree-2 reducibility is equivalent to having a root.
std::vector<u64> first_irreducible_quadratic(u64 p) {
  for (u64 idx = 0;; ++idx) {
    u64 c0 = idx % p, c1 = idx / p;
    bool has_root = false;
    for (u64 x = 0; x < p && !has_root; ++x)
      has_root = (x * x + c1 * x + c0) % p == 0;
    if (!has_root) return {c0, c1};
  }
}

FieldElement el(const FieldDesc& f, std::initializer_list<u64> cs) {
  FieldElement a = f.zero();
  u32 i = 0;
  for (u64 c : cs) a.c[i++] = c;
  return a;
}

}  // namespace

TEST(MkField, PrimeField) {
  FieldDesc f = mk_field(7, 1);
  EXPECT_EQ(f.p, 7u);
  EXPECT_EQ(f.e, 1u);
  EXPECT_EQ(static_cast<u64>(f.size()), 7u);
}

TEST(MkField, CanonicalQuadraticModulusF4) {
  FieldDesc f = mk_field(2, 2);
  EXPECT_EQ(f.modulus, first_irreducible_quadratic(2));
  EXPECT_EQ(f.modulus, (std::vector<u64>{1, 1}));  // t^2 + t + 1
}

TEST(MkField, CanonicalQuadraticModulusMatchesOracle) {
  for (u64 p : {3ull, 5ull, 7ull, 11ull}) {
    FieldDesc f = mk_field(p, 2);
    EXPECT_EQ(f.modulus, first_irreducible_quadratic(p)) << "p=" << p;
  }
}

TEST(MkField, RejectsComposite) {
  try {
    mk_field(4, 1);
    FAIL() << "expected NotPrime";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPrime);
  }
}

TEST(MkField, RejectsOversizedCharacteristic) {
  try {
    mk_field(1ull << 61, 1);
    FAIL() << "expected TooLarge";
  } catch (const Error& e) {
    // 2^61 is even, but the size gate must fire before primality is consulted.
    EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
  }
}

TEST(MkField, DeterministicConstruction) {
  FieldDesc a = mk_field(3, 4), b = mk_field(3, 4);
  EXPECT_EQ(a, b);
}

TEST(FieldArith, PrimeFieldBasics) {
  FieldDesc f = mk_field(7, 1);
  EXPECT_EQ(f.add(f.from_int(3), f.from_int(5)), f.from_int(1));
  EXPECT_EQ(f.mul(f.from_int(3), f.from_int(5)), f.from_int(1));
  EXPECT_EQ(f.inv(f.from_int(3)), f.from_int(5));
  EXPECT_EQ(f.sub(f.from_int(2), f.from_int(5)), f.from_int(4));
}

TEST(FieldArith, ExtensionMulF4) {
  FieldDesc f = mk_field(2, 2);
  // t * (t + 1) = t^2 + t = 1 modulo t^2 + t + 1
  EXPECT_EQ(f.mul(el(f, {0, 1}), el(f, {1, 1})), f.one());
}

TEST(FieldArith, DivisionByZero) {
  FieldDesc f = mk_field(5, 1);
  try {
    f.inv(f.zero());
    FAIL() << "expected DivisionByZero";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivisionByZero);
  }
}

TEST(FieldArith, AxiomsExhaustive) {
  for (auto [p, e] : std::vector<std::pair<u64, u32>>{{2, 2}, {2, 3}, {3, 2}}) {
    FieldDesc f = mk_field(p, e);
    u64 q = static_cast<u64>(f.size());
    std::vector<FieldElement> all;
    for (u64 i = 0; i < q; ++i) all.push_back(f.from_index(i));
    for (const auto& a : all) {
      EXPECT_EQ(f.add(a, f.zero()), a);
      EXPECT_EQ(f.mul(a, f.one()), a);
      EXPECT_TRUE(f.add(a, f.neg(a)).is_zero());
      if (!a.is_zero()) EXPECT_EQ(f.mul(a, f.inv(a)), f.one());
      for (const auto& b : all) {
        EXPECT_EQ(f.add(a, b), f.add(b, a));
        EXPECT_EQ(f.mul(a, b), f.mul(b, a));
        for (const auto& c : all) {
          EXPECT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
          EXPECT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
          EXPECT_EQ(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        }
      }
    }
  }
}

TEST(FieldArith, FrobeniusIsAdditiveExhaustive) {
  // (a + b)^p = a^p + b^p on every pair, for F_4, F_8, F_9
  for (auto [p, e] : std::vector<std::pair<u64, u32>>{{2, 2}, {2, 3}, {3, 2}}) {
    FieldDesc f = mk_field(p, e);
    u64 q = static_cast<u64>(f.size());
    for (u64 i = 0; i < q; ++i)
      for (u64 j = 0; j < q; ++j) {
        FieldElement a = f.from_index(i), b = f.from_index(j);
        EXPECT_EQ(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
      }
  }
}

TEST(RootsOfUnity, CubeRootsInF7MatchBruteForce) {
  FieldDesc f = mk_field(7, 1);
  std::set<u64> expected;  // oracle: scan x^3 = 1
  for (u64 x = 0; x < 7; ++x)
    if (x * x * x % 7 == 1) expected.insert(x);
  EXPECT_EQ(expected, (std::set<u64>{1, 2, 4}));

  RootsOfUnity r = roots_of_unity(f, 3);
  EXPECT_EQ(r.field, f);
  std::set<u64> got;
  for (const auto& a : r.roots) got.insert(a.c[0]);
  EXPECT_EQ(got, expected);
}

TEST(RootsOfUnity, TrivialOrder) {
  FieldDesc f = mk_field(5, 1);
  RootsOfUnity r = roots_of_unity(f, 1);
  ASSERT_EQ(r.roots.size(), 1u);
  EXPECT_EQ(r.roots[0], f.one());
  EXPECT_EQ(r.field, f);
}

TEST(RootsOfUnity, CharacteristicDividesOrder) {
  FieldDesc f = mk_field(2, 1);
  try {
    roots_of_unity(f, 2);
    FAIL() << "expected CharDividesOrder";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CharDividesOrder);
  }
}

TEST(RootsOfUnity, ExtensionEscalation) {
  // 4th roots of unity over F_7: 4 | 7^2 - 1 = 48 but not 7 - 1 = 6
  FieldDesc f = mk_field(7, 1);
  RootsOfUnity r = roots_of_unity(f, 4);
  EXPECT_EQ(r.field.e, 2u);
  ASSERT_EQ(r.roots.size(), 4u);
  for (const auto& a : r.roots) EXPECT_EQ(r.field.pow(a, 4), r.field.one());
  // exactly the kernel of x -> x^4
  u64 count = 0;
  for (u64 i = 0; i < 49; ++i)
    if (r.field.pow(r.field.from_index(i), 4) == r.field.one()) ++count;
  EXPECT_EQ(count, 4u);
}

TEST(Sample, DeterministicGivenSeed) {
  FieldDesc f = mk_field(101, 1);
  auto r1 = make_rng(42, "sample");
  auto r2 = make_rng(42, "sample");
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample(f, r1), sample(f, r2));
  auto r3 = make_rng(43, "sample");
  bool differs = false;
  auto r4 = make_rng(42, "sample");
  for (int i = 0; i < 100; ++i)
    if (sample(f, r4) != sample(f, r3)) differs = true;
  EXPECT_TRUE(differs);
}

TEST(Sample, UniformityChiSquare) {
  // 10^4 draws over F_7, 6 degrees of freedom; critical value for
  // significance 0.001 is 22.458, so a correct sampler fails with p < 0.001.
  FieldDesc f = mk_field(7, 1);
  auto rng = make_rng(2024, "chi-square");
  std::map<u64, u64> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) counts[sample(f, rng).c[0]]++;
  double expected = n / 7.0, chi2 = 0;
  for (u64 v = 0; v < 7; ++v) {
    double d = counts[v] - expected;
    chi2 += d * d / expected;
  }
  EXPECT_LT(chi2, 22.458);
}

TEST(Embedding, PrimeIntoExtensionPreservesArith) {
  FieldDesc f2 = mk_field(2, 1), f64 = mk_field(2, 6);
  Embedding phi = make_embedding(f2, f64);
  EXPECT_EQ(phi(f2.one()), f64.one());
  EXPECT_EQ(phi(f2.zero()), f64.zero());
}

TEST(Embedding, F4IntoF16IsRingHomomorphism) {
  FieldDesc f4 = mk_field(2, 2), f16 = mk_field(2, 4);
  Embedding phi = make_embedding(f4, f16);
  for (u64 i = 0; i < 4; ++i)
    for (u64 j = 0; j < 4; ++j) {
      FieldElement a = f4.from_index(i), b = f4.from_index(j);
      EXPECT_EQ(phi(f4.add(a, b)), f16.add(phi(a), phi(b)));
      EXPECT_EQ(phi(f4.mul(a, b)), f16.mul(phi(a), phi(b)));
    }
  // injectivity
  std::set<std::vector<u64>> images;
  for (u64 i = 0; i < 4; ++i) images.insert(phi(f4.from_index(i)).c);
  EXPECT_EQ(images.size(), 4u);
}

TEST(Embedding, IncompatibleDegreesRejected) {
  FieldDesc f4 = mk_field(2, 2), f8 = mk_field(2, 3);
  try {
    make_embedding(f4, f8);
    FAIL() << "expected FieldMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FieldMismatch);
  }
}

TEST(SmallestExtension, MeetsSizeBound) {
  FieldDesc f = mk_field(3, 1);
  Embedding phi = smallest_extension_of_size(f, 100);
  EXPECT_EQ(phi.dst.e, 5u);  // 3^5 = 243 is the first power >= 100
  EXPECT_GE(static_cast<u64>(phi.dst.size()), 100u);
}

TEST(SmallField, MatchesVectorArithmeticExhaustive) {
  for (auto [p, e] : std::vector<std::pair<u64, u32>>{{2, 4}, {3, 2}, {5, 2}, {13, 1}}) {
    FieldDesc f = mk_field(p, e);
    SmallField sf(f);
    u32 q = sf.q;
    for (u32 i = 0; i < q; ++i) {
      EXPECT_EQ(sf.decode(i), f.from_index(i));
      EXPECT_EQ(sf.encode(f.from_index(i)), i);
      for (u32 j = 0; j < q; ++j) {
        FieldElement a = f.from_index(i), b = f.from_index(j);
        EXPECT_EQ(sf.add(i, j), sf.encode(f.add(a, b)));
        EXPECT_EQ(sf.mul(i, j), sf.encode(f.mul(a, b)));
      }
      EXPECT_EQ(sf.neg(i), sf.encode(f.neg(f.from_index(i))));
    }
  }
}

TEST(ElementText, RoundTrip) {
  FieldDesc f = mk_field(3, 2);
  for (u64 i = 0; i < 9; ++i) {
    FieldElement a = f.from_index(i);
    EXPECT_EQ(parse_element(f, format_element(f, a)), a);
  }
  EXPECT_EQ(parse_element(f, "-1"), f.from_int(-1));  // prime-subfield shorthand
}

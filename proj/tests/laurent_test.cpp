#include <gtest/gtest.h>

#include "algdep/laurent.hpp"
#include "test_util.hpp"

using namespace algdep;
using namespace testutil;

namespace {

LaurentPoly lp(const FieldDesc& f, std::initializer_list<std::pair<i64, u64>> ts) {
  LaurentPoly r = LaurentPoly::zero(f);
  for (auto [k, c] : ts) r.add_term(k, f.from_int(static_cast<i64>(c)));
  return r;
}

TEST(Laurent, ArithmeticGolden) {
  FieldDesc f = mk_field(5, 1);
  // (1 + eps)(1 - eps) = 1 - eps^2
  LaurentPoly a = lp(f, {{0, 1}, {1, 1}});
  LaurentPoly b = lp(f, {{0, 1}, {1, 4}});
  EXPECT_EQ(laurent_mul(a, b), lp(f, {{0, 1}, {2, 4}}));
  // (eps^-1 + 2)(eps - 1) = -eps^-1 + (1 - 2) + 2*eps = 4*eps^-1 + 4 + 2*eps mod 5
  LaurentPoly c = lp(f, {{-1, 1}, {0, 2}});
  LaurentPoly d = lp(f, {{1, 1}, {0, 4}});
  EXPECT_EQ(laurent_mul(c, d), lp(f, {{-1, 4}, {0, 4}, {1, 2}}));
  EXPECT_EQ(laurent_add(a, laurent_neg(a)), LaurentPoly::zero(f));
  EXPECT_TRUE(laurent_mul(a, LaurentPoly::zero(f)).is_zero());
}

TEST(Laurent, ValuationAndIdeal) {
  FieldDesc f = mk_field(7, 1);
  EXPECT_EQ(lp(f, {{-3, 2}, {5, 1}}).valuation(), -3);
  EXPECT_EQ(lp(f, {{2, 1}}).valuation(), 2);
  EXPECT_EQ(LaurentPoly::zero(f).valuation(), 0);

  EXPECT_TRUE(in_eps_ideal(LaurentPoly::zero(f)));
  EXPECT_TRUE(in_eps_ideal(lp(f, {{1, 3}, {4, 2}})));
  EXPECT_FALSE(in_eps_ideal(lp(f, {{0, 1}, {1, 3}})));
  EXPECT_FALSE(in_eps_ideal(lp(f, {{-1, 1}, {2, 3}})));
}

TEST(Laurent, ValueAtZero) {
  FieldDesc f = mk_field(5, 1);
  EXPECT_EQ(eps_zero_value(lp(f, {{0, 3}, {1, 2}})), f.from_int(3));
  EXPECT_EQ(eps_zero_value(lp(f, {{1, 2}, {2, 1}})), f.zero());
  EXPECT_EQ(eps_zero_value(LaurentPoly::zero(f)), f.zero());
  try {
    eps_zero_value(lp(f, {{-1, 1}, {0, 3}}));
    FAIL() << "pole accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NegativeValuation);
  }
}

TEST(Laurent, MulRespectsValuation) {
  FieldDesc f = mk_field(3, 2);
  auto rng = make_rng(7, "laurent-val");
  for (int it = 0; it < 200; ++it) {
    LaurentPoly a = LaurentPoly::zero(f);
    LaurentPoly b = LaurentPoly::zero(f);
    for (int t = 0; t < 4; ++t) {
      a.add_term(static_cast<i64>(uniform_u64(rng, 9)) - 4, sample(f, rng));
      b.add_term(static_cast<i64>(uniform_u64(rng, 9)) - 4, sample(f, rng));
    }
    LaurentPoly ab = laurent_mul(a, b);
    if (a.is_zero() || b.is_zero()) {
      EXPECT_TRUE(ab.is_zero());
    } else {
      // Lowest-order coefficients multiply to something nonzero in a field,
      // so valuations add exactly.
      EXPECT_EQ(ab.valuation(), a.valuation() + b.valuation());
    }
  }
}

TEST(Laurent, DegreeBoundsGolden) {
  // {x, x*y - 1}: degrees 1 and 2, window (2, 4).
  auto [d1, dp1] = eps_degree_bounds(inst_x_xy1(mk_field(7, 1)));
  EXPECT_EQ(d1, 2u);
  EXPECT_EQ(dp1, 4u);

  // (x1, x1, x1*x2 - 1, x2^2 - x3): degrees 1,1,2,2, window (4, 8).
  FieldDesc f = mk_field(5, 1);
  Instance remark{f, 3, {}};
  for (int i = 0; i < 2; ++i) {
    CircuitBuilder b(3, "g" + std::to_string(i + 1));
    b.var(1);
    remark.circuits.push_back(b.out(0));
  }
  {
    CircuitBuilder b(3, "g3");
    u32 m = b.mul(b.var(1), b.var(2));
    remark.circuits.push_back(b.out(b.add(m, b.cst(f.from_int(-1)))));
  }
  {
    CircuitBuilder b(3, "g4");
    u32 x2 = b.var(2);
    u32 sq = b.mul(x2, x2);
    u32 neg = b.mul(b.cst(f.from_int(-1)), b.var(3));
    remark.circuits.push_back(b.out(b.add(sq, neg)));
  }
  auto [d2, dp2] = eps_degree_bounds(remark);
  EXPECT_EQ(d2, 4u);
  EXPECT_EQ(dp2, 8u);
}

TEST(Laurent, DegreeBoundsRejectsConstants) {
  FieldDesc f = mk_field(5, 1);
  Instance inst{f, 1, {}};
  CircuitBuilder b(1, "c");
  b.cst(f.from_int(2));
  inst.circuits.push_back(b.out(0));
  try {
    eps_degree_bounds(inst);
    FAIL() << "constant circuit accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConstantCircuit);
  }
  inst.circuits.clear();
  EXPECT_THROW(eps_degree_bounds(inst), Error);
}

TEST(Laurent, CircuitEvaluationOnWitness) {
  // At (eps, eps^-1) the pair {x, x*y - 1} lands inside the eps-ideal:
  // first coordinate eps, second exactly 0.
  Instance inst = inst_x_xy1(mk_field(7, 1));
  std::vector<LaurentPoly> pt = {lp(inst.field, {{1, 1}}), lp(inst.field, {{-1, 1}})};
  LaurentRing ring(inst.field);
  LaurentPoly v0 = eval_generic(inst.circuits[0], ring, pt);
  LaurentPoly v1 = eval_generic(inst.circuits[1], ring, pt);
  EXPECT_EQ(v0, lp(inst.field, {{1, 1}}));
  EXPECT_TRUE(v1.is_zero());
  EXPECT_TRUE(in_eps_ideal(v0));
  EXPECT_TRUE(in_eps_ideal(v1));

  // At (eps, eps) the second circuit evaluates to eps^2 - 1, stuck at -1.
  std::vector<LaurentPoly> bad = {lp(inst.field, {{1, 1}}), lp(inst.field, {{1, 1}})};
  LaurentPoly w1 = eval_generic(inst.circuits[1], ring, bad);
  EXPECT_EQ(w1, lp(inst.field, {{0, 6}, {2, 1}}));
  EXPECT_FALSE(in_eps_ideal(w1));
}

TEST(Laurent, WitnessParseGolden) {
  Instance inst = inst_x_xy1(mk_field(7, 1));
  Witness w = parse_witness("x1 : 1:1\nx2 : -1:1\n", inst);
  EXPECT_EQ(w.field, inst.field);
  ASSERT_EQ(w.coords.size(), 2u);
  EXPECT_EQ(w.coords[0], lp(inst.field, {{1, 1}}));
  EXPECT_EQ(w.coords[1], lp(inst.field, {{-1, 1}}));

  // Comments, blank lines, multi-term coordinates, zero coordinate.
  Witness w2 = parse_witness("# a witness\n\nx2 :\nx1 : 0:3 2:1 2:6\n", inst);
  EXPECT_EQ(w2.coords[0], lp(inst.field, {{0, 3}}));  // 2:1 and 2:6 cancel mod 7
  EXPECT_TRUE(w2.coords[1].is_zero());
}

TEST(Laurent, WitnessFieldHeader) {
  Instance inst = inst_x_xy1(mk_field(7, 1));
  Witness w = parse_witness("field 7 2\nx1 : 1:0,1\nx2 : -1:3,5\n", inst);
  EXPECT_EQ(w.field.e, 2u);
  FieldElement t = w.field.from_index(7);  // coefficient vector (0,1)
  EXPECT_EQ(w.coords[0], LaurentPoly::eps(w.field, 1, t));

  // Witness field must extend the instance field.
  EXPECT_THROW(parse_witness("field 5 1\nx1 : 0:1\nx2 : 0:1\n", inst), Error);
  try {
    parse_witness("field 7 3\nfield 7 2\nx1 : 0:1\nx2 : 0:1\n", inst);
    FAIL() << "second field line accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SyntaxError);
  }
}

TEST(Laurent, WitnessErrors) {
  Instance inst = inst_x_xy1(mk_field(7, 1));
  auto expect_syntax = [&](const std::string& text) {
    try {
      parse_witness(text, inst);
      FAIL() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::SyntaxError) << text;
    }
  };
  expect_syntax("x1 : 0:1\n");                    // x2 missing
  expect_syntax("x1 : 0:1\nx1 : 0:1\nx2 : 0:1");  // duplicate
  expect_syntax("x3 : 0:1\nx2 : 0:1\nx1 : 0:1");  // out of range
  expect_syntax("x0 : 0:1\nx2 : 0:1\n");          // indices start at 1
  expect_syntax("x1 0:1\nx2 : 0:1\n");            // missing colon
  expect_syntax("x1 : q:1\nx2 : 0:1\n");          // bad exponent
  expect_syntax("y1 : 0:1\nx2 : 0:1\n");          // bad name
}

TEST(Laurent, WitnessRoundTrip) {
  Instance inst = inst_x_xy1(mk_field(7, 1));
  std::vector<std::string> texts = {
      "x1 : 1:1\nx2 : -1:1\n",
      "x1 : -2:3 0:1 5:6\nx2 :\n",
      "field 7 2\nx1 : 1:0,1\nx2 : -1:3,5\n",
  };
  for (const auto& text : texts) {
    Witness w = parse_witness(text, inst);
    std::string s = serialize_witness(w, inst.field);
    Witness w2 = parse_witness(s, inst);
    EXPECT_EQ(w2.field, w.field);
    EXPECT_EQ(w2.coords.size(), w.coords.size());
    for (size_t i = 0; i < w.coords.size(); ++i) EXPECT_EQ(w2.coords[i], w.coords[i]) << text;
    EXPECT_EQ(serialize_witness(w2, inst.field), s);
  }
}

TEST(Laurent, ToString) {
  FieldDesc f = mk_field(7, 1);
  EXPECT_EQ(laurent_to_string(LaurentPoly::zero(f)), "0");
  EXPECT_EQ(laurent_to_string(lp(f, {{-1, 2}, {0, 3}, {2, 1}})), "2*eps^-1 + 3 + 1*eps^2");
}

}  // namespace

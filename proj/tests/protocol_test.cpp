#include <algdep/annihilator.hpp>
#include <algdep/protocol.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <vector>

#include "test_util.hpp"

using namespace algdep;
using namespace testutil;

namespace {

// Independent recomputation of the round verdict from transcript data alone.
bool hash_hits(const GsRound& r, u64 x) {
  for (size_t i = 0; i < r.rows.size(); ++i) {
    u64 bit = static_cast<u64>(std::popcount(r.rows[i] & x)) & 1;
    if (bit != ((r.offset >> i) & 1)) return false;
  }
  return true;
}

double gs_rate(const std::vector<u64>& members, u32 bits, u64 claim, u32 rounds, u64 seed,
               u64 index) {
  GsSet set{bits, &members};
  auto rng = make_rng(seed, "gs-rates", index);
  u32 hits = 0;
  for (u32 t = 0; t < rounds; ++t) hits += gs_round(set, claim, rng).accept ? 1 : 0;
  return static_cast<double>(hits) / rounds;
}

}  // namespace

TEST(Protocol, FiberStatsIdentityPair) {
  GapReport r = fiber_stats(inst_pair(mk_field(5, 1)), 1);
  EXPECT_EQ(r.qprime, 5u);
  EXPECT_EQ(r.domain, 25u);
  EXPECT_EQ(r.image_size, 25u);
  ASSERT_EQ(r.histogram.size(), 1u);
  EXPECT_EQ(r.histogram[0], (std::pair<u64, u64>{1, 25}));
}

TEST(Protocol, FiberStatsParabola) {
  // (x1, x1^2): x2 is free in every fiber, so each of the 5 images has a
  // fiber of size q' and the image stays within D q'^{n-1} = 10.
  GapReport r = fiber_stats(inst_parabola(mk_field(5, 1)), 1);
  EXPECT_EQ(r.qprime, 5u);
  EXPECT_EQ(r.image_size, 5u);
  ASSERT_EQ(r.histogram.size(), 1u);
  EXPECT_EQ(r.histogram[0], (std::pair<u64, u64>{5, 5}));
  EXPECT_LE(r.image_size, 2u * 5u);
}

TEST(Protocol, FiberStatsTriangular) {
  GapReport r = fiber_stats(inst_triangular(mk_field(5, 1)), 1);
  EXPECT_EQ(r.image_size, 25u);
  ASSERT_EQ(r.histogram.size(), 1u);
  EXPECT_EQ(r.histogram[0], (std::pair<u64, u64>{1, 25}));
}

TEST(Protocol, FiberStatsHyperbolaPattern) {
  // (x, xy-1): x = 0 collapses a line onto (0, -1), everything else is 1:1.
  GapReport r = fiber_stats(inst_x_xy1(mk_field(5, 1)), 1);
  EXPECT_EQ(r.image_size, 21u);
  ASSERT_EQ(r.histogram.size(), 2u);
  EXPECT_EQ(r.histogram[0], (std::pair<u64, u64>{1, 20}));
  EXPECT_EQ(r.histogram[1], (std::pair<u64, u64>{5, 1}));
  EXPECT_EQ(r.points_with_fiber_le(1), 20u);
  EXPECT_EQ(r.points_with_fiber_le(4), 20u);
  EXPECT_EQ(r.points_with_fiber_le(5), 25u);
}

TEST(Protocol, FiberStatsRequiresSquareAndBudget) {
  FieldDesc f = mk_field(5, 1);
  try {
    fiber_stats(inst_x_xplus1(f), 1);
    FAIL() << "non-square instance accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ArityMismatch);
  }
  ResourceCaps caps;
  caps.max_enum_points = 10;
  try {
    fiber_stats(inst_pair(f), 1, caps);
    FAIL() << "budget ignored";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResourceLimit);
  }
}

TEST(Protocol, MapTableLookup) {
  MapTable mt(inst_parabola(mk_field(5, 1)), 1);
  u64 total = 0;
  for (size_t id = 0; id < mt.image_count(); ++id) total += mt.fiber_size(id);
  EXPECT_EQ(total, mt.domain);
  for (u64 a = 0; a < mt.domain; ++a) {
    auto id = mt.find_image(mt.eval_point(a));
    ASSERT_TRUE(id.has_value());
    const u32* lo = mt.order.data() + mt.start[*id];
    const u32* hi = mt.order.data() + mt.start[*id + 1];
    EXPECT_TRUE(std::binary_search(lo, hi, static_cast<u32>(a)));
  }
  EXPECT_FALSE(mt.find_image(mt.domain + 7).has_value());
}

TEST(Protocol, AmGapGoldens) {
  // Parabola profile: D = 2, D' = 2, n = 2, so the preimage gap needs
  // q' > 4nDD' + 8D^2 = 64.
  FieldDesc f7 = mk_field(7, 1);
  try {
    check_am_gap(fiber_stats(inst_parabola(f7), 2));  // q' = 49
    FAIL() << "threshold ignored";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ThresholdViolation);
  }
  try {
    check_am_gap(fiber_stats(inst_parabola(mk_field(5, 1)), 1));  // q' = 5
    FAIL() << "threshold ignored";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ThresholdViolation);
  }

  GapReport dep = fiber_stats(inst_parabola(f7), 3);  // q' = 343
  EXPECT_EQ(check_am_gap(dep), GapVerdict::ConsistentWithDependent);
  // Every fiber has size q' = 343 > 2D, so no point has a small fiber.
  EXPECT_EQ(dep.points_with_fiber_le(4), 0u);

  GapReport ind = fiber_stats(inst_pair(mk_field(5, 1)), 2);  // q' = 25 > 16
  EXPECT_EQ(check_am_gap(ind), GapVerdict::ConsistentWithIndependent);
  EXPECT_EQ(ind.points_with_fiber_le(1), ind.domain);
}

TEST(Protocol, AmGapInconclusiveSynthetic) {
  // Half the points sit on fibers of size 3, strictly between D and 2D, so
  // neither gap pattern holds. Real maps never do this above threshold.
  GapReport r;
  r.qprime = 1000;
  r.nvars = 2;
  r.domain = 1000000;
  r.deg_product = 2;
  r.deg_max = 2;
  r.image_size = 600000;
  r.histogram = {{1, 500000}, {5, 100000}};
  EXPECT_EQ(check_am_gap(r), GapVerdict::Inconclusive);
}

TEST(Protocol, CoamGapGoldens) {
  FieldDesc f5 = mk_field(5, 1);
  GapReport dep = fiber_stats(inst_parabola(f5), 2);  // q' = 25 > D(2D+nD') = 16
  EXPECT_EQ(dep.image_size, 25u);
  EXPECT_EQ(check_coam_gap(dep), GapVerdict::ConsistentWithDependent);

  GapReport ind = fiber_stats(inst_pair(f5), 2);
  EXPECT_EQ(ind.image_size, 625u);
  EXPECT_EQ(check_coam_gap(ind), GapVerdict::ConsistentWithIndependent);

  try {
    check_coam_gap(fiber_stats(inst_parabola(f5), 1));  // q' = 5 <= 16
    FAIL() << "threshold ignored";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ThresholdViolation);
  }

  GapReport mid;  // image size strictly between Dq'^{n-1} and 2Dq'^{n-1}
  mid.qprime = 25;
  mid.nvars = 2;
  mid.domain = 625;
  mid.deg_product = 2;
  mid.deg_max = 2;
  mid.image_size = 80;
  mid.histogram = {{1, 80}};
  EXPECT_EQ(check_coam_gap(mid), GapVerdict::Inconclusive);
}

TEST(Protocol, GsHashBits) {
  EXPECT_EQ(gs_hash_bits(1), 2u);
  EXPECT_EQ(gs_hash_bits(2), 3u);
  EXPECT_EQ(gs_hash_bits(3), 4u);
  EXPECT_EQ(gs_hash_bits(4), 4u);
  EXPECT_EQ(gs_hash_bits(16), 6u);
  EXPECT_EQ(gs_hash_bits(19683), 17u);
}

TEST(Protocol, GsRoundRates) {
  // Claim m = 16 (l = 6) over a 12-bit universe; member sets of size m, 2m,
  // 4m. Expected acceptance is monotone in |S|, at most m/2^l for the
  // cheating size and at least the inclusion-exclusion bound for 2m.
  std::vector<u64> sm, s2m, s4m;
  for (u64 v = 0; v < 64; ++v) {
    if (v < 16) sm.push_back(v * 61 % 4096);
    if (v < 32) s2m.push_back(v * 61 % 4096);
    s4m.push_back(v * 61 % 4096);
  }
  std::sort(sm.begin(), sm.end());
  std::sort(s2m.begin(), s2m.end());
  std::sort(s4m.begin(), s4m.end());
  double rm = gs_rate(sm, 12, 16, 400, 2026, 0);
  double r2m = gs_rate(s2m, 12, 16, 400, 2026, 1);
  double r4m = gs_rate(s4m, 12, 16, 400, 2026, 2);
  EXPECT_LE(rm, 0.25);
  EXPECT_GE(r2m, 0.25);
  EXPECT_GE(r2m - rm, 0.1);
  EXPECT_LE(rm, r2m);
  EXPECT_LE(r2m, r4m);
}

TEST(Protocol, GsEmptySetRejects) {
  std::vector<u64> empty;
  GsSet set{12, &empty};
  auto rng = make_rng(3, "gs-empty");
  for (int t = 0; t < 20; ++t) {
    GsRound r = gs_round(set, 4, rng);
    EXPECT_FALSE(r.accept);
    EXPECT_FALSE(r.response.has_value());
  }
}

TEST(Protocol, GsTranscriptRecomputable) {
  std::vector<u64> members;
  for (u64 v = 0; v < 32; ++v) members.push_back(v * 97 % 4096);
  std::sort(members.begin(), members.end());
  GsSet set{12, &members};
  auto rng = make_rng(11, "gs-audit");
  int accepts = 0;
  for (int t = 0; t < 200; ++t) {
    GsRound r = gs_round(set, 16, rng);
    ASSERT_EQ(r.rows.size(), 6u);
    if (r.accept) {
      ++accepts;
      ASSERT_TRUE(r.response.has_value());
      EXPECT_TRUE(std::binary_search(members.begin(), members.end(), *r.response));
      EXPECT_TRUE(hash_hits(r, *r.response));
    } else {
      EXPECT_FALSE(r.response.has_value());
    }
  }
  EXPECT_GT(accepts, 0);
}

TEST(Protocol, GsProverKernelPathMatchesScan) {
  // A member list much larger than the affine solution space forces the
  // kernel-enumeration prover; a full scan of S must agree on every round.
  std::vector<u64> members;
  auto mrng = make_rng(5, "gs-members");
  while (members.size() < 3000) members.push_back(uniform_u64(mrng, 4096));
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  GsSet set{12, &members};
  auto rng = make_rng(6, "gs-kernel");
  for (int t = 0; t < 100; ++t) {
    GsRound r = gs_round(set, 16, rng);
    bool exists = false;
    for (u64 x : members)
      if (hash_hits(r, x)) {
        exists = true;
        break;
      }
    EXPECT_EQ(r.accept, exists);
    if (r.accept) EXPECT_TRUE(hash_hits(r, *r.response));
  }
}

TEST(Protocol, AmDecideGoldens) {
  ProtocolParams pp;
  pp.rounds = 64;
  pp.seed = 7;

  pp.ext_degree = 3;  // q' = 343 > 64
  DecideResult dep = am_decide(inst_parabola(mk_field(7, 1)), pp);
  EXPECT_TRUE(dep.dependent);
  EXPECT_EQ(dep.claim, 2u);
  EXPECT_EQ(dep.hash_bits, 3u);

  pp.ext_degree = 7;  // q' = 128 > 64
  EXPECT_TRUE(am_decide(inst_frobenius_pair(mk_field(2, 1)), pp).dependent);
  pp.ext_degree = 6;  // q' = 64 sits exactly on the bound
  try {
    am_decide(inst_frobenius_pair(mk_field(2, 1)), pp);
    FAIL() << "threshold ignored";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ThresholdViolation);
  }

  pp.ext_degree = 3;  // q' = 125, independent triangular map
  EXPECT_FALSE(am_decide(inst_triangular(mk_field(5, 1)), pp).dependent);
}

TEST(Protocol, AmDecideIndependentAcrossSeeds) {
  MapTable mt(inst_pair(mk_field(5, 1)), 2);
  int correct = 0;
  for (u64 seed = 0; seed < 100; ++seed)
    if (!am_decide(mt, 64, seed).dependent) ++correct;
  EXPECT_GE(correct, 95);
}

TEST(Protocol, CoamDecideGoldens) {
  ProtocolParams pp;
  pp.rounds = 64;
  pp.seed = 7;
  pp.ext_degree = 2;  // q' = 25

  EXPECT_FALSE(coam_decide(inst_pair(mk_field(5, 1)), pp).dependent);
  EXPECT_TRUE(coam_decide(inst_parabola(mk_field(5, 1)), pp).dependent);

  pp.ext_degree = 1;  // q' = 5 <= 16
  try {
    coam_decide(inst_parabola(mk_field(5, 1)), pp);
    FAIL() << "threshold ignored";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ThresholdViolation);
  }
}

TEST(Protocol, DecideMatchesGroundTruthAcrossSeeds) {
  // Square corpus with the smallest extension degree clearing the preimage
  // threshold (which dominates the image threshold on every entry).
  struct Entry {
    Instance inst;
    u32 ext_degree;
  };
  std::vector<Entry> corpus;
  corpus.push_back({inst_pair(mk_field(5, 1)), 2});                    // q' = 25
  corpus.push_back({inst_x_xy1(mk_field(5, 1)), 3});                   // q' = 125
  corpus.push_back({inst_parabola(mk_field(5, 1)), 3});                // q' = 125
  corpus.push_back({inst_triangular(mk_field(5, 1)), 3});              // q' = 125
  corpus.push_back({inst_frobenius_pair(mk_field(2, 1)), 7});          // q' = 128
  corpus.push_back({inst_frobenius_pair(mk_field(3, 1)), 5});          // q' = 243
  corpus.push_back({inst_powers(mk_field(2, 1)), 8});                  // q' = 256
  corpus.push_back({inst_powers(mk_field(3, 1)), 7});                  // q' = 2187
  corpus.push_back({inst_separability_failure(mk_field(3, 1)), 7});    // q' = 2187

  for (const Entry& entry : corpus) {
    bool truth = is_dependent(entry.inst);
    MapTable mt(entry.inst, entry.ext_degree);
    int am_ok = 0, coam_ok = 0;
    for (u64 seed = 0; seed < 100; ++seed) {
      if (am_decide(mt, 64, seed).dependent == truth) ++am_ok;
      if (coam_decide(mt, 64, seed).dependent == truth) ++coam_ok;
    }
    EXPECT_GE(am_ok, 95) << entry.inst.circuits[0].name << " over F_" << entry.inst.field.p
                         << ", q' = " << mt.qprime;
    EXPECT_GE(coam_ok, 95) << entry.inst.circuits[0].name << " over F_" << entry.inst.field.p
                           << ", q' = " << mt.qprime;
  }
}

TEST(Protocol, DecideDeterministicPerSeed) {
  MapTable mt(inst_parabola(mk_field(7, 1)), 3);
  DecideResult a = am_decide(mt, 16, 5);
  DecideResult b = am_decide(mt, 16, 5);
  EXPECT_EQ(a.dependent, b.dependent);
  EXPECT_EQ(a.accepts, b.accepts);
  EXPECT_EQ(a.anchor, b.anchor);
  ASSERT_EQ(a.transcript.size(), b.transcript.size());
  for (size_t i = 0; i < a.transcript.size(); ++i) {
    EXPECT_EQ(a.transcript[i].rows, b.transcript[i].rows);
    EXPECT_EQ(a.transcript[i].offset, b.transcript[i].offset);
    EXPECT_EQ(a.transcript[i].response, b.transcript[i].response);
    EXPECT_EQ(a.transcript[i].accept, b.transcript[i].accept);
  }
  DecideResult c = am_decide(mt, 16, 6);
  bool differs = a.anchor != c.anchor;
  for (size_t i = 0; i < a.transcript.size() && !differs; ++i)
    differs = a.transcript[i].rows != c.transcript[i].rows;
  EXPECT_TRUE(differs);
}

TEST(Protocol, ReduceToSquare) {
  FieldDesc f5 = mk_field(5, 1);

  SquareReduction wide = reduce_to_square(inst_circle(f5), 1);  // m = 3 > n = 2
  EXPECT_TRUE(wide.shortcut_dependent);

  Instance pair = inst_pair(f5);
  SquareReduction same = reduce_to_square(pair, 1);
  EXPECT_FALSE(same.shortcut_dependent);
  EXPECT_TRUE(same.inst == pair);
  EXPECT_TRUE(same.matrix.empty());

  // One linear form in three variables: substitute down to one variable over
  // the smallest F_{5^j} above the floor of 64 sample points.
  Instance linear = inst_linear3(f5);
  for (u64 seed = 0; seed < 100; ++seed) {
    SquareReduction red = reduce_to_square(linear, seed);
    ASSERT_FALSE(red.shortcut_dependent);
    EXPECT_EQ(red.inst.nvars, 1u);
    ASSERT_EQ(red.inst.circuits.size(), 1u);
    EXPECT_EQ(red.inst.field.size(), u128(125));
    ASSERT_EQ(red.matrix.size(), 3u);
    EXPECT_EQ(red.matrix[0].size(), 1u);
    EXPECT_EQ(trdeg(red.inst).k, 1u);
  }
}

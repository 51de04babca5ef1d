#pragma once

#include <algdep/circuit.hpp>
#include <algdep/field.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace algdep {

// Exhaustive fiber and image statistics of square polynomial maps over a small
// extension field, exact checks of the four preimage/image gap bounds built on
// them, and a simulated Goldwasser-Sipser set-lowerbound protocol that turns
// those gaps into statistical dependence decisions.

struct ProtocolParams {
  u32 ext_degree = 1;  // run over F_{q^ext_degree}
  u32 rounds = 64;
  u64 seed = 0;
};

namespace detail {

/// Circuit evaluation ring over packed small-field element indices.
struct ScanRing {
  using Value = u32;
  const SmallField* sf;
  const Embedding* lift;

  Value add(Value a, Value b) const { return sf->add(a, b); }
  Value mul(Value a, Value b) const { return sf->mul(a, b); }
  Value constant(const FieldElement& c) const { return sf->encode((*lift)(c)); }
};

}  // namespace detail

/// One exhaustive sweep of a square map f : F_{q'}^n -> F_{q'}^n. Domain
/// points are indexed by base-q' digit strings (digit j = index of coordinate
/// j); image tuples are packed the same way, so every value fits in u64 once
/// the domain passes the enumeration budget. Built once per (instance, q') and
/// reused across seeds.
struct MapTable {
  Instance inst;
  FieldDesc ext;
  Embedding emb;
  SmallField sf;
  u32 nvars = 0;
  u64 qprime = 0;
  u64 domain = 0;
  u128 deg_product = 1;  // D, clamped syntactic degrees
  u64 deg_max = 1;       // D'

  std::vector<u64> images;  // distinct packed images, ascending
  std::vector<u64> start;   // images.size()+1 offsets into order
  std::vector<u32> order;   // domain indices grouped by image, ascending per group

  MapTable(const Instance& in, u32 ext_degree, const ResourceCaps& caps = {})
      : inst(in),
        ext(ext_degree <= 1 ? in.field : mk_field(in.field.p, in.field.e * ext_degree)),
        emb(make_embedding(in.field, ext)),
        sf(ext, caps.max_field_scan) {
    if (ext_degree < 1) fail(ErrorKind::SyntaxError, "extension degree must be at least 1");
    nvars = in.nvars;
    if (in.circuits.size() != nvars)
      fail(ErrorKind::ArityMismatch, "fiber enumeration needs a square instance (m = n)");
    if (nvars == 0) fail(ErrorKind::ArityMismatch, "fiber enumeration needs at least one variable");
    u128 q = ext.size();
    u128 dom = checked_pow(q, nvars, "enumeration domain");
    if (dom > caps.max_enum_points)
      fail(ErrorKind::ResourceLimit, "domain " + u128_to_string(dom) + " exceeds enumeration budget " +
                                         std::to_string(caps.max_enum_points));
    qprime = static_cast<u64>(q);
    domain = static_cast<u64>(dom);
    DegreeProfile dp = degree_profile(in);
    deg_product = dp.product;
    deg_max = dp.max;

    detail::ScanRing ring{&sf, &emb};
    std::vector<u64> packed(domain);
    std::vector<u32> pt(nvars);
    for (u64 idx = 0; idx < domain; ++idx) {
      u64 t = idx;
      for (u32 j = 0; j < nvars; ++j) {
        pt[j] = static_cast<u32>(t % qprime);
        t /= qprime;
      }
      u64 pk = 0, mult = 1;
      for (u32 i = 0; i < nvars; ++i) {
        pk += eval_generic(inst.circuits[i], ring, pt) * mult;
        mult *= qprime;
      }
      packed[idx] = pk;
    }

    order.resize(domain);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](u32 a, u32 b) { return packed[a] != packed[b] ? packed[a] < packed[b] : a < b; });
    for (u64 i = 0; i < domain; ++i) {
      if (i == 0 || packed[order[i]] != packed[order[i - 1]]) {
        images.push_back(packed[order[i]]);
        start.push_back(i);
      }
    }
    start.push_back(domain);
  }

  u64 image_count() const { return images.size(); }
  u64 fiber_size(size_t id) const { return start[id + 1] - start[id]; }

  std::optional<size_t> find_image(u64 packed) const {
    auto it = std::lower_bound(images.begin(), images.end(), packed);
    if (it == images.end() || *it != packed) return std::nullopt;
    return static_cast<size_t>(it - images.begin());
  }

  /// Packed image of a single domain point, recomputed on demand.
  u64 eval_point(u64 idx) const {
    detail::ScanRing ring{&sf, &emb};
    std::vector<u32> pt(nvars);
    u64 t = idx;
    for (u32 j = 0; j < nvars; ++j) {
      pt[j] = static_cast<u32>(t % qprime);
      t /= qprime;
    }
    u64 pk = 0, mult = 1;
    for (u32 i = 0; i < nvars; ++i) {
      pk += eval_generic(inst.circuits[i], ring, pt) * mult;
      mult *= qprime;
    }
    return pk;
  }
};

// --- gap statistics ---------------------------------------------------------------

struct GapReport {
  u64 qprime = 0;
  u32 nvars = 0;
  u64 domain = 0;
  u128 deg_product = 1;  // D
  u64 deg_max = 1;       // D'
  u64 image_size = 0;
  std::vector<std::pair<u64, u64>> histogram;  // (fiber size N, images with that N), N ascending

  /// Number of domain points a whose fiber N_{f(a)} is at most k.
  u64 points_with_fiber_le(u64 k) const {
    u64 s = 0;
    for (const auto& [fib, cnt] : histogram)
      if (fib <= k) s += fib * cnt;
    return s;
  }
};

inline GapReport fiber_stats(const MapTable& mt) {
  GapReport r;
  r.qprime = mt.qprime;
  r.nvars = mt.nvars;
  r.domain = mt.domain;
  r.deg_product = mt.deg_product;
  r.deg_max = mt.deg_max;
  r.image_size = mt.image_count();
  std::map<u64, u64> hist;
  u128 total = 0;
  for (size_t id = 0; id < mt.image_count(); ++id) {
    u64 f = mt.fiber_size(id);
    ++hist[f];
    total += f;
  }
  if (total != mt.domain) fail(ErrorKind::Internal, "fiber sizes do not sum to the domain size");
  r.histogram.assign(hist.begin(), hist.end());
  return r;
}

inline GapReport fiber_stats(const Instance& inst, u32 ext_degree, const ResourceCaps& caps = {}) {
  return fiber_stats(MapTable(inst, ext_degree, caps));
}

enum class GapVerdict { ConsistentWithIndependent, ConsistentWithDependent, Inconclusive };

inline const char* to_string(GapVerdict v) {
  switch (v) {
    case GapVerdict::ConsistentWithIndependent: return "consistent-with-independent";
    case GapVerdict::ConsistentWithDependent: return "consistent-with-dependent";
    case GapVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace detail {

// Fiber gaps need q' > 4nDD' + 4kD with k = 2D; image gaps need q' > D(2D + nD').
inline u128 am_gap_threshold(u32 n, u128 d, u64 dmax) {
  u128 a = checked_mul(checked_mul(4 * u128(n), d, "gap threshold"), dmax, "gap threshold");
  u128 b = checked_mul(checked_mul(8, d, "gap threshold"), d, "gap threshold");
  return a + b;
}

inline u128 coam_gap_threshold(u32 n, u128 d, u64 dmax) {
  u128 inner = 2 * d + u128(n) * dmax;
  return checked_mul(d, inner, "gap threshold");
}

inline void require_threshold(u64 qprime, u128 thr, const char* which) {
  if (qprime <= thr)
    fail(ErrorKind::ThresholdViolation, std::string(which) + " needs q' > " + u128_to_string(thr) +
                                            ", got q' = " + std::to_string(qprime));
}

}  // namespace detail

/// Fractions of points with small vs large fibers, compared exactly against
/// the preimage gap bounds: independent maps have N_{f(a)} <= D outside an
/// nDD'/q' fraction, dependent ones have N_{f(a)} > 2D outside a 2D^2/q'
/// fraction. Both patterns holding or failing at once is inconclusive.
inline GapVerdict check_am_gap(const GapReport& r) {
  detail::require_threshold(r.qprime, detail::am_gap_threshold(r.nvars, r.deg_product, r.deg_max),
                            "preimage gap");
  u64 d = static_cast<u64>(r.deg_product);  // below q' once the threshold holds
  u128 bad_indep = u128(r.domain) - r.points_with_fiber_le(d);
  u128 small_dep = r.points_with_fiber_le(2 * d);
  bool indep_ok = bad_indep * r.qprime <= u128(r.nvars) * d * r.deg_max * r.domain;
  bool dep_ok = small_dep * r.qprime <= u128(2) * d * d * r.domain;
  if (indep_ok && !dep_ok) return GapVerdict::ConsistentWithIndependent;
  if (dep_ok && !indep_ok) return GapVerdict::ConsistentWithDependent;
  return GapVerdict::Inconclusive;
}

/// Image-size comparison: independent maps have |Im(f)| > 2Dq'^{n-1} above the
/// threshold, dependent ones |Im(f)| <= Dq'^{n-1}.
inline GapVerdict check_coam_gap(const GapReport& r) {
  detail::require_threshold(r.qprime, detail::coam_gap_threshold(r.nvars, r.deg_product, r.deg_max),
                            "image gap");
  u128 dq = r.deg_product * (r.domain / r.qprime);
  if (r.image_size > 2 * dq) return GapVerdict::ConsistentWithIndependent;
  if (r.image_size <= dq) return GapVerdict::ConsistentWithDependent;
  return GapVerdict::Inconclusive;
}

// --- Goldwasser-Sipser rounds -----------------------------------------------------

/// A set S of u64-encoded points inside the universe [0, 2^bits), given by its
/// ascending member list. Membership certificates are the members themselves.
struct GsSet {
  u32 bits = 0;
  const std::vector<u64>* members = nullptr;
};

struct GsRound {
  std::vector<u64> rows;  // hash matrix over GF(2), one mask per output bit
  u64 offset = 0;         // target vector
  std::optional<u64> response;  // prover's member with h(x) = offset
  bool accept = false;
};

/// Hash output length for the claim |S| >= 2m vs |S| <= m.
inline u32 gs_hash_bits(u64 m) { return static_cast<u32>(std::bit_width(4 * m - 1)); }

namespace detail {

inline bool gs_hash_hits(const std::vector<u64>& rows, u64 offset, u64 x) {
  for (size_t i = 0; i < rows.size(); ++i)
    if ((static_cast<u64>(std::popcount(rows[i] & x)) & 1) != ((offset >> i) & 1)) return false;
  return true;
}

struct AffineSolution {
  bool solvable = false;
  u64 particular = 0;
  std::vector<u64> basis;  // kernel basis of the hash matrix
};

/// Solve rows * x = offset over GF(2) by Gauss-Jordan on u64 row masks.
inline AffineSolution gf2_solve(const std::vector<u64>& rows, u64 offset, u32 bits) {
  std::vector<u64> rmask;
  std::vector<u32> rrhs, rpivot;
  for (size_t i = 0; i < rows.size(); ++i) {
    u64 m = rows[i];
    u32 b = static_cast<u32>((offset >> i) & 1);
    for (size_t j = 0; j < rmask.size(); ++j)
      if ((m >> rpivot[j]) & 1) {
        m ^= rmask[j];
        b ^= rrhs[j];
      }
    if (m == 0) {
      if (b) return {};
      continue;
    }
    u32 piv = static_cast<u32>(std::countr_zero(m));
    for (size_t j = 0; j < rmask.size(); ++j)
      if ((rmask[j] >> piv) & 1) {
        rmask[j] ^= m;
        rrhs[j] ^= b;
      }
    rmask.push_back(m);
    rrhs.push_back(b);
    rpivot.push_back(piv);
  }
  AffineSolution s;
  s.solvable = true;
  for (size_t j = 0; j < rmask.size(); ++j)
    if (rrhs[j]) s.particular |= u64(1) << rpivot[j];
  u64 pivmask = 0;
  for (u32 p : rpivot) pivmask |= u64(1) << p;
  for (u32 c = 0; c < bits; ++c) {
    if ((pivmask >> c) & 1) continue;
    u64 v = u64(1) << c;
    for (size_t j = 0; j < rmask.size(); ++j)
      if ((rmask[j] >> c) & 1) v |= u64(1) << rpivot[j];
    s.basis.push_back(v);
  }
  return s;
}

}  // namespace detail

/// One verifier round: draw an affine hash h(x) = Ax + b with output length
/// ceil(log2(4m)), let the brute-force prover look for a member of S hashing
/// to zero, accept iff it produces one. The prover enumerates whichever is
/// smaller: the member list or the affine solution space of h(x) = 0.
inline GsRound gs_round(const GsSet& set, u64 claim, std::mt19937_64& rng) {
  if (claim < 1) fail(ErrorKind::Internal, "set-lowerbound claim must be at least 1");
  if (set.members == nullptr) fail(ErrorKind::Internal, "set-lowerbound needs a member list");
  u32 l = gs_hash_bits(claim);
  GsRound r;
  u64 umask = set.bits >= 64 ? ~u64(0) : (u64(1) << set.bits) - 1;
  for (u32 i = 0; i < l; ++i) r.rows.push_back(rng() & umask);
  r.offset = rng() & ((u64(1) << l) - 1);

  const std::vector<u64>& members = *set.members;
  detail::AffineSolution sol = detail::gf2_solve(r.rows, r.offset, set.bits);
  if (sol.solvable) {
    u64 kcount = sol.basis.size() >= 63 ? ~u64(0) : u64(1) << sol.basis.size();
    if (kcount <= members.size()) {
      for (u64 c = 0; c < kcount && !r.response; ++c) {
        u64 x = sol.particular;
        for (size_t j = 0; j < sol.basis.size(); ++j)
          if ((c >> j) & 1) x ^= sol.basis[j];
        if (std::binary_search(members.begin(), members.end(), x)) r.response = x;
      }
    } else {
      for (u64 x : members)
        if (detail::gs_hash_hits(r.rows, r.offset, x)) {
          r.response = x;
          break;
        }
    }
  }
  r.accept = r.response.has_value();
  return r;
}

// --- statistical decisions --------------------------------------------------------

struct DecideResult {
  bool dependent = false;
  u32 accepts = 0;
  u32 rounds = 0;
  u64 claim = 0;      // GS bound m
  u32 hash_bits = 0;  // l
  double threshold = 0;  // accept-rate cutoff tau
  u64 anchor = 0;     // sampled domain point (preimage protocol only)
  std::vector<GsRound> transcript;
};

namespace detail {

/// Midpoint of the modelled acceptance rates at |S| = 2m (honest) and
/// |S| = m (cheating), treating the per-member hash events as independent.
inline double gs_accept_threshold(u64 claim, u32 l) {
  long double miss = 1.0L - std::ldexp(1.0L, -static_cast<int>(l));
  long double cheat = 1.0L - std::pow(miss, static_cast<long double>(claim));
  long double honest = 1.0L - std::pow(miss, 2.0L * static_cast<long double>(claim));
  return static_cast<double>((cheat + honest) / 2.0L);
}

inline u32 universe_bits(u64 domain) { return static_cast<u32>(std::bit_width(domain - 1)); }

}  // namespace detail

/// Sample a domain point a, then run GS rounds on S = f^{-1}(f(a)) with claim
/// m = D. Independent maps keep |S| <= D for most a, dependent maps push
/// |S| > 2D, so a high acceptance rate indicates dependence.
inline DecideResult am_decide(const MapTable& mt, u32 rounds, u64 seed) {
  detail::require_threshold(mt.qprime,
                            detail::am_gap_threshold(mt.nvars, mt.deg_product, mt.deg_max),
                            "preimage protocol");
  auto rng = make_rng(seed, "am-decide");
  DecideResult res;
  res.rounds = rounds;
  res.claim = static_cast<u64>(mt.deg_product);
  res.hash_bits = gs_hash_bits(res.claim);
  res.threshold = detail::gs_accept_threshold(res.claim, res.hash_bits);
  res.anchor = uniform_u64(rng, mt.domain);
  size_t id = *mt.find_image(mt.eval_point(res.anchor));
  std::vector<u64> fiber(mt.order.begin() + static_cast<std::ptrdiff_t>(mt.start[id]),
                         mt.order.begin() + static_cast<std::ptrdiff_t>(mt.start[id + 1]));
  GsSet set{detail::universe_bits(mt.domain), &fiber};
  for (u32 t = 0; t < rounds; ++t) {
    GsRound r = gs_round(set, res.claim, rng);
    res.accepts += r.accept ? 1 : 0;
    res.transcript.push_back(std::move(r));
  }
  res.dependent = res.accepts > res.threshold * rounds;
  return res;
}

/// GS rounds on S = Im(f) with claim m = Dq'^{n-1}. Dependent maps have
/// |S| <= m, independent ones |S| > 2m, so here a high acceptance rate
/// indicates independence.
inline DecideResult coam_decide(const MapTable& mt, u32 rounds, u64 seed) {
  detail::require_threshold(mt.qprime,
                            detail::coam_gap_threshold(mt.nvars, mt.deg_product, mt.deg_max),
                            "image protocol");
  auto rng = make_rng(seed, "coam-decide");
  DecideResult res;
  res.rounds = rounds;
  res.claim = static_cast<u64>(mt.deg_product * (mt.domain / mt.qprime));
  res.hash_bits = gs_hash_bits(res.claim);
  res.threshold = detail::gs_accept_threshold(res.claim, res.hash_bits);
  GsSet set{detail::universe_bits(mt.domain), &mt.images};
  for (u32 t = 0; t < rounds; ++t) {
    GsRound r = gs_round(set, res.claim, rng);
    res.accepts += r.accept ? 1 : 0;
    res.transcript.push_back(std::move(r));
  }
  res.dependent = !(res.accepts > res.threshold * rounds);
  return res;
}

inline DecideResult am_decide(const Instance& inst, const ProtocolParams& pp,
                              const ResourceCaps& caps = {}) {
  MapTable mt(inst, pp.ext_degree, caps);
  return am_decide(mt, pp.rounds, pp.seed);
}

inline DecideResult coam_decide(const Instance& inst, const ProtocolParams& pp,
                                const ResourceCaps& caps = {}) {
  MapTable mt(inst, pp.ext_degree, caps);
  return coam_decide(mt, pp.rounds, pp.seed);
}

// --- square reduction -------------------------------------------------------------

struct SquareReduction {
  bool shortcut_dependent = false;  // m > n: dependent outright, no instance produced
  Instance inst;
  std::vector<std::vector<FieldElement>> matrix;  // n x m substitution rows (m < n only)
};

/// Make the instance square. More circuits than variables is dependence
/// outright; fewer means substituting each variable by a random linear form in
/// m fresh variables, drawn over an extension large enough to preserve the
/// transcendence degree with good probability.
inline SquareReduction reduce_to_square(const Instance& in, u64 seed,
                                        const ResourceCaps& caps = {}) {
  u32 m = static_cast<u32>(in.circuits.size());
  u32 n = in.nvars;
  if (m > n) return SquareReduction{true, in, {}};
  if (m == n) return SquareReduction{false, in, {}};

  DegreeProfile dp = degree_profile(in);
  u128 bound = checked_mul(checked_mul(4 * u128(n), dp.product, "reduction field bound"), dp.max,
                           "reduction field bound");
  if (bound < 64) bound = 64;
  Embedding emb = smallest_extension_of_size(in.field, bound + 1);
  if (emb.dst.size() > caps.max_field_scan)
    fail(ErrorKind::ResourceLimit, "reduction extension exceeds field scan cap");
  auto rng = make_rng(seed, "reduce-square");

  SquareReduction out;
  out.matrix.assign(n, {});
  for (u32 j = 0; j < n; ++j)
    for (u32 l = 0; l < m; ++l) out.matrix[j].push_back(sample(emb.dst, rng));

  out.inst.field = emb.dst;
  out.inst.nvars = m;
  for (const Circuit& c : in.circuits) {
    CircuitBuilder b(m, c.name);
    std::vector<u32> zvar;
    for (u32 l = 0; l < m; ++l) zvar.push_back(b.var(l + 1));
    std::vector<u32> sub(n, 0);
    for (u32 j = 0; j < n; ++j) {
      u32 acc = b.mul(b.cst(out.matrix[j][0]), zvar[0]);
      for (u32 l = 1; l < m; ++l) acc = b.add(acc, b.mul(b.cst(out.matrix[j][l]), zvar[l]));
      sub[j] = acc;
    }
    std::vector<u32> pos(c.gates.size(), 0);
    for (size_t g = 0; g < c.gates.size(); ++g) {
      const Gate& gate = c.gates[g];
      switch (gate.kind) {
        case GateKind::Var: pos[g] = sub[gate.var - 1]; break;
        case GateKind::Const: pos[g] = b.cst(emb(gate.cval)); break;
        case GateKind::Add: pos[g] = b.add(pos[gate.a], pos[gate.b]); break;
        case GateKind::Mul: pos[g] = b.mul(pos[gate.a], pos[gate.b]); break;
      }
    }
    out.inst.circuits.push_back(b.out(pos[c.output]));
  }
  return out;
}

}  // namespace algdep

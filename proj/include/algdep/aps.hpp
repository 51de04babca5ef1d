#pragma once

#include <algdep/annihilator.hpp>
#include <algdep/circuit.hpp>
#include <algdep/laurent.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace algdep {

// Decision procedure for "is the origin in the closure of the image of f":
// transcendence-degree dispatch, the random linear reduction to the principal
// case with one-sided trial amplification, and verification of approximate
// (Laurent series) solution witnesses.

// --- witness verification ------------------------------------------------------

struct WitnessReport {
  bool ok = false;
  std::vector<std::string> warnings;
};

/// Evaluates every circuit at the witness point and checks the results lie in
/// the ideal generated by eps. Coordinates may live in an extension of the
/// instance field; circuit constants are lifted through the embedding.
/// Exponents outside [-D, D'] (D = product, D' = max * product of syntactic
/// degrees) only warn: the window is sufficient for existence, not necessary.
inline WitnessReport verify_witness(const Instance& inst, const Witness& w,
                                    const ResourceCaps& caps = {}) {
  if (w.coords.size() != inst.nvars)
    fail(ErrorKind::ArityMismatch, "witness has " + std::to_string(w.coords.size()) +
                                       " coordinates for " + std::to_string(inst.nvars) +
                                       " variables");
  if (w.field.p != inst.field.p || w.field.e % inst.field.e != 0)
    fail(ErrorKind::FieldMismatch, "witness field is not an extension of the instance field");
  for (const LaurentPoly& c : w.coords)
    if (!(c.field == w.field))
      fail(ErrorKind::FieldMismatch, "witness coordinate lives outside the witness field");

  WitnessReport rep;
  std::optional<std::pair<u64, u64>> window;
  try {
    window = eps_degree_bounds(inst);
  } catch (const Error&) {
    // constant circuits or an overflowing bound: the advisory check is skipped
  }
  if (window) {
    for (size_t i = 0; i < w.coords.size(); ++i) {
      const LaurentPoly& c = w.coords[i];
      if (c.terms.empty()) continue;
      if (c.valuation() < -static_cast<i64>(window->first) ||
          c.top_exponent() > static_cast<i64>(window->second))
        rep.warnings.push_back("x" + std::to_string(i + 1) +
                               " lies outside the sufficient exponent window [-" +
                               std::to_string(window->first) + ", " +
                               std::to_string(window->second) + "]");
    }
  }

  LaurentRing ring = w.field == inst.field
                         ? LaurentRing(w.field)
                         : LaurentRing(w.field, make_embedding(inst.field, w.field,
                                                               caps.max_field_scan));
  rep.ok = true;
  for (const Circuit& c : inst.circuits)
    if (!in_eps_ideal(eval_generic(c, ring, w.coords))) {
      rep.ok = false;
      break;
    }
  return rep;
}

// --- random linear reduction ---------------------------------------------------

/// A sampled reduction g_i = sum_j c_{i,j} f_j to k+1 circuits, with the
/// coefficients drawn from the whole sample field S. The single-trial failure
/// probability is delta = (k+1) dmax^k / |S| <= 1/2 by the choice of S.
struct ReductionPlan {
  u32 k = 0;
  Embedding emb;        // instance field -> sample field S
  u64 sample_size = 0;  // |S|
  u64 delta_num = 0;    // (k+1) * dmax^k
  std::vector<std::vector<FieldElement>> c;  // (k+1) x m over emb.dst

  double delta() const {
    return sample_size == 0 ? 0.0
                            : static_cast<double>(delta_num) / static_cast<double>(sample_size);
  }
};

/// Builds the reduced instance of a plan: one circuit per row, each a linear
/// combination layer over replayed copies of the f_j gate lists, constants
/// lifted into the sample field. Zero coefficients contribute no gates.
inline Instance apply_plan(const Instance& inst, const ReductionPlan& plan) {
  if (!(plan.emb.src == inst.field))
    fail(ErrorKind::FieldMismatch, "reduction plan was sampled for a different field");
  const size_t m = inst.circuits.size();
  Instance out{plan.emb.dst, inst.nvars, {}};
  for (size_t i = 0; i < plan.c.size(); ++i) {
    const auto& row = plan.c[i];
    if (row.size() != m)
      fail(ErrorKind::ArityMismatch, "plan row has " + std::to_string(row.size()) +
                                         " coefficients for " + std::to_string(m) + " circuits");
    CircuitBuilder b(inst.nvars, "g" + std::to_string(i + 1));
    std::optional<u32> acc;
    for (size_t j = 0; j < m; ++j) {
      if (row[j].is_zero()) continue;
      const Circuit& f = inst.circuits[j];
      std::vector<u32> pos(f.gates.size());
      for (size_t g = 0; g < f.gates.size(); ++g) {
        const Gate& gate = f.gates[g];
        switch (gate.kind) {
          case GateKind::Var: pos[g] = b.var(gate.var); break;
          case GateKind::Const: pos[g] = b.cst(plan.emb(gate.cval)); break;
          case GateKind::Add: pos[g] = b.add(pos[gate.a], pos[gate.b]); break;
          case GateKind::Mul: pos[g] = b.mul(pos[gate.a], pos[gate.b]); break;
        }
      }
      u32 term = b.mul(b.cst(row[j]), pos[f.output]);
      acc = acc ? b.add(*acc, term) : term;
    }
    if (!acc) acc = b.cst(out.field.zero());
    out.circuits.push_back(b.out(*acc));
  }
  return out;
}

struct Reduction {
  ReductionPlan plan;
  Instance reduced;
};

/// Samples a reduction to k+1 circuits. S is the whole smallest extension of
/// size >= 2 (k+1) dmax^k, with dmax the largest clamped syntactic degree.
inline Reduction random_reduce(const Instance& inst, u32 k, std::mt19937_64& rng,
                               const ResourceCaps& caps = {}) {
  const size_t m = inst.circuits.size();
  if (static_cast<size_t>(k) + 1 >= m)
    fail(ErrorKind::ArityMismatch, "random reduction needs trdeg k < m - 1 (k " +
                                       std::to_string(k) + ", m " + std::to_string(m) + ")");
  DegreeProfile prof = degree_profile(inst);
  u128 num = checked_mul(static_cast<u128>(k) + 1,
                         checked_pow(prof.max, k, "reduction sample bound"),
                         "reduction sample bound");
  u128 bound = checked_mul(num, static_cast<u128>(2), "reduction sample bound");
  if (bound > caps.max_field_scan)
    fail(ErrorKind::ResourceLimit, "reduction sample field of size >= " + u128_to_string(bound) +
                                       " exceeds the field scan cap");
  ReductionPlan plan;
  plan.k = k;
  plan.emb = smallest_extension_of_size(inst.field, bound);
  u128 sz = plan.emb.dst.size();
  if (sz > caps.max_field_scan)
    fail(ErrorKind::ResourceLimit, "reduction sample field of size " + u128_to_string(sz) +
                                       " exceeds the field scan cap");
  plan.sample_size = static_cast<u64>(sz);
  plan.delta_num = static_cast<u64>(num);
  plan.c.assign(k + 1, std::vector<FieldElement>());
  for (auto& row : plan.c) {
    row.reserve(m);
    for (size_t j = 0; j < m; ++j) row.push_back(sample(plan.emb.dst, rng));
  }
  Instance g = apply_plan(inst, plan);
  return Reduction{std::move(plan), std::move(g)};
}

// --- decision ------------------------------------------------------------------

enum class ApsRoute { IndependentCase, PrincipalCase, Reduced, DirectOracle };

inline std::string to_string(ApsRoute r) {
  switch (r) {
    case ApsRoute::IndependentCase: return "independent-case";
    case ApsRoute::PrincipalCase: return "principal-case";
    case ApsRoute::Reduced: return "reduced";
    case ApsRoute::DirectOracle: return "direct-oracle";
  }
  fail(ErrorKind::Internal, "unknown route");
}

struct ApsOptions {
  u32 trials = 10;
  u64 seed = 0;
  bool direct_oracle = false;  // decide by the exhaustive annihilator oracle instead
  bool sweep = false;          // enumerate every plan instead of sampling (tiny S only)
  u64 sweep_cap = u64(1) << 13;
  ResourceCaps caps{};
};

struct ApsVerdict {
  bool answer = false;
  ApsRoute route = ApsRoute::IndependentCase;
  u32 trials_used = 0;
  std::vector<u64> trial_seeds;  // rng indices of the accepted (trdeg-preserving) trials
};

namespace detail {

/// Drops semantically zero circuits; a nonzero constant circuit forces the
/// answer false, since a nonzero constant never lands in the eps ideal.
struct NormalizedInstance {
  Instance inst;
  bool constant_false = false;
};

inline NormalizedInstance normalize_for_decision(const Instance& in, const ResourceCaps& caps) {
  NormalizedInstance out;
  out.inst.field = in.field;
  out.inst.nvars = in.nvars;
  for (const Circuit& c : in.circuits) {
    Polynomial p = expand(c, in.field, caps.max_terms);
    if (p.is_zero()) continue;
    if (p.total_degree() == 0) out.constant_false = true;
    out.inst.circuits.push_back(c);
  }
  return out;
}

/// A single trial on an already reduced (k+1)-circuit instance. Returns
/// nothing when the trial must be discarded for losing transcendence degree.
inline std::optional<bool> principal_trial(const Instance& reduced, u32 k,
                                           const ResourceCaps& caps) {
  if (trdeg(reduced, caps).k != k) return std::nullopt;
  return constant_term(minimal_annihilator(reduced, caps)).is_zero();
}

}  // namespace detail

/// Full enumeration of S^{(k+1) x m} in place of sampled trials; feasible only
/// when the plan count stays under the cap. The answer is the conjunction of
/// every transcendence-preserving trial.
struct SweepReport {
  bool feasible = false;
  u64 plans = 0;      // plans enumerated
  u64 preserved = 0;  // trials with trdeg(g) = k
  bool answer = true;
  u64 sample_size = 0;
};

inline SweepReport sweep_reduce(const Instance& inst, u64 plan_cap = ApsOptions{}.sweep_cap,
                                const ResourceCaps& caps = {}) {
  detail::NormalizedInstance norm = detail::normalize_for_decision(inst, caps);
  const size_t m = norm.inst.circuits.size();
  u32 k = trdeg(norm.inst, caps).k;
  if (norm.constant_false || static_cast<size_t>(k) + 1 >= m)
    fail(ErrorKind::ArityMismatch, "full sweep applies only to the reduced route (trdeg < m - 1)");

  SweepReport rep;
  auto probe_rng = make_rng(0, "sweep-probe");
  Reduction probe = random_reduce(norm.inst, k, probe_rng, caps);
  rep.sample_size = probe.plan.sample_size;
  u64 cells = static_cast<u64>(k + 1) * m;
  u128 total = 1;
  for (u64 i = 0; i < cells; ++i) {
    total *= rep.sample_size;
    if (total > plan_cap) return rep;  // infeasible
  }
  rep.feasible = true;

  ReductionPlan plan = probe.plan;
  std::vector<u64> digit(cells, 0);
  u64 scanned = 0;
  while (true) {
    for (u64 i = 0; i < cells; ++i)
      plan.c[i / m][i % m] = plan.emb.dst.from_index(digit[i]);
    Instance g = apply_plan(norm.inst, plan);
    ++scanned;
    if (auto t = detail::principal_trial(g, k, caps)) {
      ++rep.preserved;
      if (!*t) rep.answer = false;
    }
    u64 i = 0;
    while (i < cells && ++digit[i] == rep.sample_size) digit[i++] = 0;
    if (i == cells) break;
  }
  rep.plans = scanned;
  if (rep.preserved == 0)
    fail(ErrorKind::Internal, "no transcendence-preserving plan in the full sweep");
  return rep;
}

/// Decides whether the origin lies in the closure of the image. k = m goes
/// through the independent case, k = m - 1 through the principal annihilator,
/// and anything lower through T accepted reduction trials with one-sided
/// amplification: any false trial is final, true needs all T. A true instance
/// never produces a false trial, so the false-positive error is <= delta^T.
inline ApsVerdict aps_decide(const Instance& inst, const ApsOptions& opt = {}) {
  if (opt.trials < 1) fail(ErrorKind::SyntaxError, "the decision needs at least one trial");
  ApsVerdict v;
  if (opt.direct_oracle) {
    v.answer = ann_at_zero_direct(inst, opt.caps);
    v.route = ApsRoute::DirectOracle;
    return v;
  }
  detail::NormalizedInstance norm = detail::normalize_for_decision(inst, opt.caps);
  if (norm.constant_false) {
    v.route = ApsRoute::PrincipalCase;
    return v;
  }
  const size_t m = norm.inst.circuits.size();
  u32 k = trdeg(norm.inst, opt.caps).k;
  if (k == m) {
    v.answer = true;
    return v;
  }
  if (static_cast<size_t>(k) + 1 == m) {
    v.answer = constant_term(minimal_annihilator(norm.inst, opt.caps)).is_zero();
    v.route = ApsRoute::PrincipalCase;
    return v;
  }
  v.route = ApsRoute::Reduced;
  if (opt.sweep) {
    SweepReport rep = sweep_reduce(norm.inst, opt.sweep_cap, opt.caps);
    if (!rep.feasible)
      fail(ErrorKind::ResourceLimit, "full plan sweep is over the plan cap; use sampled trials");
    v.answer = rep.answer;
    v.trials_used = rep.preserved > ~u32(0) ? ~u32(0) : static_cast<u32>(rep.preserved);
    return v;
  }
  const u64 attempt_cap = 16ull * opt.trials;
  for (u64 a = 0; a < attempt_cap && v.trials_used < opt.trials; ++a) {
    auto rng = make_rng(opt.seed, "aps-trial", a);
    Reduction red = random_reduce(norm.inst, k, rng, opt.caps);
    auto t = detail::principal_trial(red.reduced, k, opt.caps);
    if (!t) continue;  // trdeg dropped; resample
    ++v.trials_used;
    v.trial_seeds.push_back(a);
    if (!*t) return v;  // one-sided: a single false trial is conclusive
  }
  if (v.trials_used < opt.trials)
    fail(ErrorKind::ResourceLimit,
         "reduction kept losing transcendence degree (" + std::to_string(v.trials_used) + " of " +
             std::to_string(opt.trials) + " trials accepted)");
  v.answer = true;
  return v;
}

// --- empirical failure rate ------------------------------------------------------

/// Single-trial disagreement statistics against the exhaustive oracle. Not
/// applicable when no reduction happens (trdeg >= m - 1 after normalization).
struct StressReport {
  bool applicable = false;
  u32 seeds = 0;
  u32 drops = 0;          // trials discarded for losing transcendence degree
  u32 disagreements = 0;  // among the kept trials
  u64 delta_num = 0;
  u64 sample_size = 0;

  double delta() const {
    return sample_size == 0 ? 0.0
                            : static_cast<double>(delta_num) / static_cast<double>(sample_size);
  }
  double drop_rate() const {
    return seeds == 0 ? 0.0 : static_cast<double>(drops) / static_cast<double>(seeds);
  }
  double disagree_rate() const {
    u32 kept = seeds - drops;
    return kept == 0 ? 0.0 : static_cast<double>(disagreements) / static_cast<double>(kept);
  }
};

inline StressReport reduction_stress(const Instance& inst, u32 seeds, u64 seed0 = 0,
                                     const ResourceCaps& caps = {}) {
  StressReport r;
  detail::NormalizedInstance norm = detail::normalize_for_decision(inst, caps);
  const size_t m = norm.inst.circuits.size();
  u32 k = trdeg(norm.inst, caps).k;
  if (norm.constant_false || static_cast<size_t>(k) + 1 >= m) return r;
  r.applicable = true;
  r.seeds = seeds;
  bool truth = ann_at_zero_direct(norm.inst, caps);
  for (u32 i = 0; i < seeds; ++i) {
    auto rng = make_rng(seed0, "stress-trial", i);
    Reduction red = random_reduce(norm.inst, k, rng, caps);
    r.delta_num = red.plan.delta_num;
    r.sample_size = red.plan.sample_size;
    auto t = detail::principal_trial(red.reduced, k, caps);
    if (!t) {
      ++r.drops;
      continue;
    }
    if (*t != truth) ++r.disagreements;
  }
  return r;
}

}  // namespace algdep

#pragma once

#include <string>
#include <vector>

#include "algdep/circuit.hpp"
#include "algdep/linalg.hpp"

namespace algdep {

struct JacobianReport {
  size_t rank = 0;
  u32 trials = 0;
  bool applicable = false;  // rank criterion valid: char exceeds dmax^min(m,n)
  std::string reason;
};

/// Matrix of formal partial derivatives: entry (i,j) = d f_i / d x_j.
inline std::vector<std::vector<Circuit>> jacobian_matrix(const Instance& inst) {
  std::vector<std::vector<Circuit>> J;
  J.reserve(inst.circuits.size());
  for (const Circuit& c : inst.circuits) {
    std::vector<Circuit> row;
    row.reserve(inst.nvars);
    for (u32 j = 1; j <= inst.nvars; ++j) row.push_back(formal_partial(c, inst.field, j));
    J.push_back(std::move(row));
  }
  return J;
}

namespace detail {

/// Largest clamped syntactic degree over the instance's circuits (at least 1).
inline u64 max_clamped_degree(const Instance& inst) {
  u64 dmax = 1;
  for (const Circuit& c : inst.circuits) {
    i64 s = syntactic_degree(c);
    if (s > static_cast<i64>(dmax)) dmax = static_cast<u64>(s);
  }
  return dmax;
}

/// dmax^r, saturating at 2^127 (far above any representable characteristic).
inline u128 sat_pow(u64 base, u64 exp) {
  const u128 cap = static_cast<u128>(1) << 127;
  u128 r = 1;
  u128 b = base;
  while (exp) {
    if (exp & 1) {
      if (b != 0 && r > cap / b) return cap;
      r *= b;
    }
    exp >>= 1;
    if (exp) {
      if (b > cap / (b ? b : 1)) return cap;
      b *= b;
    }
  }
  return r;
}

/// Rank of the Jacobian evaluated at one random point of the extension.
inline size_t jacobian_rank_at_point(const std::vector<std::vector<Circuit>>& J, u32 nvars,
                                     const FieldRing& ring, std::mt19937_64& rng) {
  std::vector<FieldElement> point;
  point.reserve(nvars);
  for (u32 j = 0; j < nvars; ++j) point.push_back(sample(ring.field, rng));
  std::vector<std::vector<FieldElement>> rows;
  rows.reserve(J.size());
  for (const auto& circ_row : J) {
    std::vector<FieldElement> row;
    row.reserve(nvars);
    for (const Circuit& c : circ_row) row.push_back(eval_generic(c, ring, point));
    rows.push_back(std::move(row));
  }
  return matrix_rank(ring.field, rows);
}

/// Extension large enough for a union-bounded rank estimate across `trials`
/// random points: size > 4 * min(m,n) * (dmax - 1) * trials.
inline FieldRing rank_probe_ring(const Instance& inst, u64 dmax, u32 trials) {
  u64 r = std::min<u64>(inst.circuits.size(), inst.nvars);
  u128 bound = checked_mul(checked_mul(4 * static_cast<u128>(r), dmax > 1 ? dmax - 1 : 0,
                                       "rank probe bound"),
                           trials, "rank probe bound");
  Embedding emb = smallest_extension_of_size(inst.field, bound + 1);
  FieldDesc ext = emb.dst;
  return FieldRing(ext, std::move(emb));
}

}  // namespace detail

/// Best Jacobian rank seen over `trials` random evaluations, with an
/// applicability flag for the rank-equals-trdeg criterion (valid only when the
/// characteristic exceeds dmax^min(m,n); in small characteristic the rank can
/// undershoot the transcendence degree).
inline JacobianReport jacobian_rank(const Instance& inst, u64 seed, u32 trials = 4) {
  if (trials < 1) fail(ErrorKind::Internal, "jacobian_rank needs at least one trial");
  JacobianReport rep;
  rep.trials = trials;
  u64 r = std::min<u64>(inst.circuits.size(), inst.nvars);
  u64 dmax = detail::max_clamped_degree(inst);
  u128 crit = detail::sat_pow(dmax, r);
  rep.applicable = static_cast<u128>(inst.field.p) > crit;
  if (rep.applicable) {
    rep.reason = "rank criterion valid: characteristic exceeds d^r = " + u128_to_string(crit);
  } else {
    rep.reason = "rank criterion inapplicable: characteristic " + std::to_string(inst.field.p) +
                 " is at most d^r" + (crit == (static_cast<u128>(1) << 127)
                                          ? std::string(" (d^r overflows)")
                                          : " = " + u128_to_string(crit));
  }
  if (inst.circuits.empty() || inst.nvars == 0) return rep;

  std::vector<std::vector<Circuit>> J = jacobian_matrix(inst);
  FieldRing ring = detail::rank_probe_ring(inst, dmax, trials);
  auto rng = make_rng(seed, "jacobian-rank");
  for (u32 t = 0; t < trials; ++t) {
    size_t rk = detail::jacobian_rank_at_point(J, inst.nvars, ring, rng);
    rep.rank = std::max(rep.rank, rk);
    if (rep.rank == r) break;
  }
  return rep;
}

/// One-sided independence certificate: true when some random evaluation of the
/// Jacobian has rank m. A full-rank specialization forces the formal Jacobian
/// to full rank, which rules out any annihilator in every characteristic; a
/// false return proves nothing.
inline bool jacobian_independence_probe(const Instance& inst, u64 seed, u32 trials = 8) {
  size_t m = inst.circuits.size();
  if (m == 0) return true;
  if (m > inst.nvars) return false;
  std::vector<std::vector<Circuit>> J = jacobian_matrix(inst);
  u64 dmax = detail::max_clamped_degree(inst);
  FieldRing ring = detail::rank_probe_ring(inst, dmax, trials);
  auto rng = make_rng(seed, "jacobian-probe");
  for (u32 t = 0; t < trials; ++t)
    if (detail::jacobian_rank_at_point(J, inst.nvars, ring, rng) == m) return true;
  return false;
}

}  // namespace algdep

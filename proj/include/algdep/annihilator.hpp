#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "algdep/jacobian.hpp"
#include "algdep/linalg.hpp"
#include "algdep/poly.hpp"

namespace algdep {

/// Vector space of annihilators up to a fixed total degree. Basis polynomials
/// live in y_1..y_m (one variable per circuit), are in reduced echelon form
/// over the graded-lex monomial coordinates, and each is monic in its leading
/// monomial.
struct AnnSpace {
  u64 d = 0;
  std::vector<Polynomial> basis;
};

struct TrdegResult {
  u32 k = 0;
  std::vector<u32> witness;  // positions of a maximal independent subset
};

inline FieldElement constant_term(const Polynomial& a) {
  auto it = a.terms.find(Monomial::of(std::vector<u32>(a.nvars, 0)));
  return it == a.terms.end() ? a.field.zero() : it->second;
}

inline Instance sub_instance(const Instance& inst, const std::vector<u32>& subset) {
  Instance sub{inst.field, inst.nvars, {}};
  sub.circuits.reserve(subset.size());
  for (u32 i : subset) {
    if (i >= inst.circuits.size()) fail(ErrorKind::Internal, "subset index out of range");
    sub.circuits.push_back(inst.circuits[i]);
  }
  return sub;
}

namespace detail {

/// Compositions P_alpha = prod f_i^{alpha_i} for all |alpha| <= d, memoized so
/// each needs a single polynomial multiply.
inline std::map<Monomial, Polynomial, GradedLexLess> composition_table(
    const std::vector<Polynomial>& f, const std::vector<Monomial>& alphas_ascending,
    const FieldDesc& field, u32 nvars, u64 term_cap) {
  std::map<Monomial, Polynomial, GradedLexLess> memo;
  for (const Monomial& a : alphas_ascending) {
    if (a.deg == 0) {
      memo.emplace(a, Polynomial::constant(field, nvars, field.one()));
      continue;
    }
    u32 i = 0;
    while (a.e[i] == 0) ++i;
    Monomial b = a;
    b.e[i] -= 1;
    b.deg -= 1;
    memo.emplace(a, poly_mul(memo.at(b), f[i], term_cap));
  }
  return memo;
}

}  // namespace detail

/// Solve for all A = sum_{|alpha| <= d} c_alpha y^alpha with A(f_1..f_m) = 0:
/// one linear constraint per x-monomial appearing in any composition P_alpha.
inline AnnSpace annihilator_space(const Instance& inst, u64 d, const ResourceCaps& caps = {}) {
  const FieldDesc& F = inst.field;
  u32 m = static_cast<u32>(inst.circuits.size());
  if (d > std::numeric_limits<u32>::max())
    fail(ErrorKind::ResourceLimit, "annihilator degree bound " + std::to_string(d) + " is out of range");

  std::vector<Monomial> ascending = monomials_up_to(m, static_cast<u32>(d), caps.max_terms);
  std::vector<Monomial> cols(ascending.rbegin(), ascending.rend());  // descending graded-lex

  std::vector<Polynomial> f;
  f.reserve(m);
  for (const Circuit& c : inst.circuits) f.push_back(expand(c, F, caps.max_terms));
  auto memo = detail::composition_table(f, ascending, F, inst.nvars, caps.max_terms);

  // rows: x-monomial -> sparse (column, coefficient) list
  std::map<Monomial, std::vector<std::pair<size_t, FieldElement>>, GradedLexLess> rowmap;
  for (size_t j = 0; j < cols.size(); ++j)
    for (const auto& [xm, coef] : memo.at(cols[j]).terms) rowmap[xm].emplace_back(j, coef);

  if (checked_mul(rowmap.size(), cols.size(), "constraint matrix") > caps.max_matrix_cells)
    fail(ErrorKind::ResourceLimit, "constraint matrix " + std::to_string(rowmap.size()) + "x" +
                                       std::to_string(cols.size()) + " exceeds the cell budget");

  RowReducer red(F, cols.size(), caps.max_matrix_cells);
  std::vector<FieldElement> dense(cols.size(), F.zero());
  for (const auto& [xm, entries] : rowmap) {
    for (const auto& [j, coef] : entries) dense[j] = coef;
    red.add_row(dense);
    for (const auto& [j, coef] : entries) dense[j] = F.zero();
    if (red.saturated()) break;  // kernel already trivial
  }

  AnnSpace space;
  space.d = d;
  std::vector<std::vector<FieldElement>> kernel = rref_rows(F, red.nullspace_basis());
  space.basis.reserve(kernel.size());
  for (const auto& vec : kernel) {
    Polynomial A = Polynomial::zero(F, m);
    for (size_t j = 0; j < cols.size(); ++j)
      if (!vec[j].is_zero()) A.add_term(cols[j], vec[j]);

    // Exactness check: substitute the expanded circuits back in.
    Polynomial composed = Polynomial::zero(F, inst.nvars);
    for (const auto& [alpha, c] : A.terms)
      composed = poly_add(composed, poly_scale(memo.at(alpha), c));
    if (!composed.is_zero()) fail(ErrorKind::Internal, "kernel vector is not an annihilator");
    space.basis.push_back(std::move(A));
  }
  return space;
}

namespace detail {

/// Perron-style degree bound: product of clamped syntactic degrees, saturated
/// far above any feasible solve so the monomial cap reports overruns.
inline u64 subset_degree_bound(const Instance& inst) {
  u128 bound = 1;
  const u128 cap = static_cast<u128>(1) << 62;
  for (const Circuit& c : inst.circuits) {
    i64 s = syntactic_degree(c);
    u64 ds = s < 1 ? 1 : static_cast<u64>(s);
    bound = bound > cap / ds ? cap : bound * ds;
  }
  return static_cast<u64>(bound > cap ? cap : bound);
}

inline u64 instance_seed(const Instance& inst) { return hash_tag(serialize_instance(inst)); }

}  // namespace detail

/// Algebraic dependence of the chosen circuits, decided exactly. A nonzero
/// annihilator of total degree at most the product of the (clamped) syntactic
/// degrees exists iff the circuits are dependent, so the search below is a
/// decision procedure. Two shortcuts keep typical calls cheap: more circuits
/// than variables forces dependence, and a full-rank Jacobian specialization
/// certifies independence in every characteristic.
inline bool is_dependent(const Instance& inst, const std::vector<u32>& subset,
                         const ResourceCaps& caps = {}) {
  if (subset.empty()) fail(ErrorKind::Internal, "dependence query over an empty subset");
  Instance sub = sub_instance(inst, subset);
  if (sub.circuits.size() > sub.nvars) return true;
  if (jacobian_independence_probe(sub, detail::instance_seed(sub))) return false;

  u64 bound = detail::subset_degree_bound(sub);
  for (u64 d = 1;; d = std::min(bound, d * 2)) {
    if (!annihilator_space(sub, d, caps).basis.empty()) return true;
    if (d >= bound) return false;
  }
}

inline std::vector<u32> all_indices(const Instance& inst) {
  std::vector<u32> all(inst.circuits.size());
  for (u32 i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

inline bool is_dependent(const Instance& inst) { return is_dependent(inst, all_indices(inst)); }

/// Greedy maximal independent subset. Algebraic independence is a matroid
/// independence system, so the greedy size equals the transcendence degree.
inline TrdegResult trdeg(const Instance& inst, const ResourceCaps& caps = {}) {
  TrdegResult res;
  std::vector<u32> current;
  for (u32 i = 0; i < inst.circuits.size(); ++i) {
    if (current.size() == inst.nvars) break;  // no independent set can exceed nvars
    std::vector<u32> candidate = current;
    candidate.push_back(i);
    if (!is_dependent(inst, candidate, caps)) current = std::move(candidate);
  }
  res.k = static_cast<u32>(current.size());
  res.witness = std::move(current);
  return res;
}

/// The generator of the annihilator ideal in the principal case k = m - 1,
/// monic in its graded-lex leading monomial. Found by raising the degree one
/// step at a time, so the first nonempty space is one-dimensional.
inline Polynomial minimal_annihilator(const Instance& inst, const ResourceCaps& caps = {}) {
  u32 m = static_cast<u32>(inst.circuits.size());
  TrdegResult t = trdeg(inst, caps);
  if (m == 0 || t.k != m - 1)
    fail(ErrorKind::NotPrincipalCase, "annihilator ideal is principal only when trdeg = m-1 (trdeg " +
                                          std::to_string(t.k) + ", m " + std::to_string(m) + ")");
  for (u64 d = 1;; ++d) {
    AnnSpace space = annihilator_space(inst, d, caps);
    if (space.basis.empty()) continue;
    if (space.basis.size() != 1)
      fail(ErrorKind::Internal, "principal case produced a multi-dimensional minimal slice");
    return space.basis[0];
  }
}

/// Whether the closure of the image of f contains the origin, decided directly
/// from the annihilator space at the bound (max clamped degree)^trdeg: the
/// origin lies in the closure iff every annihilator has zero constant term,
/// and any nonzero constant term already shows up at this degree.
inline bool ann_at_zero_direct(const Instance& inst, const ResourceCaps& caps = {}) {
  if (inst.circuits.empty()) return true;  // image of the empty map is the origin of A^0
  TrdegResult t = trdeg(inst, caps);
  u64 dmax = detail::max_clamped_degree(inst);
  u128 d = checked_pow(dmax, t.k, "direct decision degree");
  if (d > (static_cast<u128>(1) << 32))
    fail(ErrorKind::ResourceLimit, "direct decision degree is out of range");
  AnnSpace space = annihilator_space(inst, static_cast<u64>(d), caps);
  for (const Polynomial& A : space.basis)
    if (!constant_term(A).is_zero()) return false;
  return true;
}

}  // namespace algdep

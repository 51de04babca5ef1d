#pragma once

#include <map>
#include <string>
#include <vector>

#include "algdep/field.hpp"

namespace algdep {

/// Exponent vector with cached total degree.
struct Monomial {
  u32 deg = 0;
  std::vector<u32> e;

  static Monomial of(std::vector<u32> exps) {
    Monomial m;
    m.e = std::move(exps);
    for (u32 v : m.e) m.deg += v;
    return m;
  }
  bool operator==(const Monomial& o) const { return e == o.e; }
};

/// Graded lexicographic order: total degree first, then lexicographic on the
/// exponent vector with the first variable most significant.
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    if (a.deg != b.deg) return a.deg < b.deg;
    return a.e < b.e;
  }
};

/// Sparse multivariate polynomial with canonically ordered terms.
struct Polynomial {
  FieldDesc field;
  u32 nvars = 0;
  std::map<Monomial, FieldElement, GradedLexLess> terms;

  static Polynomial zero(const FieldDesc& f, u32 nvars) { return Polynomial{f, nvars, {}}; }
  static Polynomial constant(const FieldDesc& f, u32 nvars, const FieldElement& c) {
    Polynomial p = zero(f, nvars);
    if (!c.is_zero()) p.terms.emplace(Monomial::of(std::vector<u32>(nvars, 0)), c);
    return p;
  }
  static Polynomial variable(const FieldDesc& f, u32 nvars, u32 i) {  // i is 1-based
    if (i == 0 || i > nvars) fail(ErrorKind::ArityMismatch, "variable index out of range");
    Polynomial p = zero(f, nvars);
    std::vector<u32> e(nvars, 0);
    e[i - 1] = 1;
    p.terms.emplace(Monomial::of(std::move(e)), f.one());
    return p;
  }

  bool is_zero() const { return terms.empty(); }
  size_t term_count() const { return terms.size(); }

  /// -1 for the zero polynomial.
  i64 total_degree() const {
    if (terms.empty()) return -1;
    return static_cast<i64>(terms.rbegin()->first.deg);
  }

  bool operator==(const Polynomial& o) const {
    return field == o.field && nvars == o.nvars && terms == o.terms;
  }

  void add_term(const Monomial& m, const FieldElement& c) {
    if (c.is_zero()) return;
    auto it = terms.find(m);
    if (it == terms.end()) {
      terms.emplace(m, c);
    } else {
      it->second = field.add(it->second, c);
      if (it->second.is_zero()) terms.erase(it);
    }
  }
};

namespace detail {
inline void check_compatible(const Polynomial& a, const Polynomial& b) {
  if (a.field != b.field) fail(ErrorKind::FieldMismatch, "polynomials over different fields");
  if (a.nvars != b.nvars) fail(ErrorKind::ArityMismatch, "polynomials with different arities");
}
}  // namespace detail

inline Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
  detail::check_compatible(a, b);
  Polynomial r = a;
  for (const auto& [m, c] : b.terms) r.add_term(m, c);
  return r;
}

inline Polynomial poly_sub(const Polynomial& a, const Polynomial& b) {
  detail::check_compatible(a, b);
  Polynomial r = a;
  for (const auto& [m, c] : b.terms) r.add_term(m, a.field.neg(c));
  return r;
}

inline Polynomial poly_scale(const Polynomial& a, const FieldElement& s) {
  Polynomial r = Polynomial::zero(a.field, a.nvars);
  if (s.is_zero()) return r;
  for (const auto& [m, c] : a.terms) {
    FieldElement v = a.field.mul(c, s);
    if (!v.is_zero()) r.terms.emplace(m, v);
  }
  return r;
}

inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b, u64 term_cap = 0) {
  detail::check_compatible(a, b);
  // Work is bounded alongside the result size so that a capped computation
  // fails fast instead of grinding through a quadratic pass first.
  if (term_cap) {
    u128 work = static_cast<u128>(a.terms.size()) * b.terms.size();
    if (work > 64 * static_cast<u128>(term_cap))
      fail(ErrorKind::ResourceLimit, "product work exceeds term cap");
  }
  Polynomial r = Polynomial::zero(a.field, a.nvars);
  for (const auto& [ma, ca] : a.terms) {
    for (const auto& [mb, cb] : b.terms) {
      Monomial m;
      m.deg = ma.deg + mb.deg;
      m.e.resize(a.nvars);
      for (u32 i = 0; i < a.nvars; ++i) m.e[i] = ma.e[i] + mb.e[i];
      r.add_term(m, a.field.mul(ca, cb));
      if (term_cap && r.terms.size() > term_cap)
        fail(ErrorKind::ResourceLimit, "product exceeds term cap");
    }
  }
  return r;
}

/// Evaluate at a point of the coefficient field (or an extension, when an
/// embedding for the coefficients is supplied).
inline FieldElement poly_eval(const Polynomial& a, const std::vector<FieldElement>& point) {
  if (point.size() != a.nvars) fail(ErrorKind::ArityMismatch, "evaluation point has wrong arity");
  const FieldDesc& f = a.field;
  FieldElement acc = f.zero();
  for (const auto& [m, c] : a.terms) {
    FieldElement t = c;
    for (u32 i = 0; i < a.nvars; ++i)
      if (m.e[i]) t = f.mul(t, f.pow(point[i], m.e[i]));
    acc = f.add(acc, t);
  }
  return acc;
}

inline Polynomial map_coefficients(const Polynomial& a, const Embedding& phi) {
  if (a.field != phi.src) fail(ErrorKind::FieldMismatch, "embedding source mismatch");
  Polynomial r = Polynomial::zero(phi.dst, a.nvars);
  for (const auto& [m, c] : a.terms) r.terms.emplace(m, phi(c));
  return r;
}

/// All monomials in n variables of total degree <= d, ascending graded-lex.
/// Count is C(n+d, d); exceeding the cap raises ResourceLimit.
inline std::vector<Monomial> monomials_up_to(u32 n, u32 d, u64 cap = 1u << 26) {
  u128 count = 1;
  for (u32 i = 1; i <= n; ++i) count = checked_mul(count, d + i, "monomial count") / i;
  if (count > cap) fail(ErrorKind::ResourceLimit, "monomial count " + u128_to_string(count) + " exceeds cap");

  std::vector<Monomial> out;
  out.reserve(static_cast<size_t>(count));
  std::vector<u32> e(n, 0);
  for (u32 t = 0; t <= d; ++t) {
    // compositions of t into n parts, lexicographically ascending
    std::vector<u32> cur(n, 0);
    // iterative odometer over exponent vectors summing to t
    auto emit = [&](auto&& self, u32 pos, u32 remaining) -> void {
      if (pos + 1 == n) {
        cur[pos] = remaining;
        out.push_back(Monomial::of(cur));
        return;
      }
      for (u32 v = 0; v <= remaining; ++v) {
        cur[pos] = v;
        self(self, pos + 1, remaining - v);
      }
    };
    if (n == 0) {
      if (t == 0) out.push_back(Monomial::of({}));
      continue;
    }
    emit(emit, 0, t);
  }
  return out;
}

/// Terms in descending graded-lex order, e.g. "1*y1^2 + 6*y3 + 2".
inline std::string poly_to_string(const Polynomial& a, const std::string& varprefix = "x") {
  if (a.terms.empty()) return "0";
  std::string s;
  for (auto it = a.terms.rbegin(); it != a.terms.rend(); ++it) {
    if (!s.empty()) s += " + ";
    const auto& [m, c] = *it;
    if (m.deg == 0) {
      s += format_element(a.field, c);
      continue;
    }
    s += format_element(a.field, c);
    s += '*';
    bool first = true;
    for (u32 i = 0; i < a.nvars; ++i) {
      if (m.e[i] == 0) continue;
      if (!first) s += '*';
      first = false;
      s += varprefix + std::to_string(i + 1);
      if (m.e[i] > 1) s += "^" + std::to_string(m.e[i]);
    }
  }
  return s;
}

}  // namespace algdep

#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "algdep/circuit.hpp"

namespace algdep {

/// Finite Laurent polynomial in one infinitesimal: sum of c * eps^k, k in Z.
struct LaurentPoly {
  FieldDesc field;
  std::map<i64, FieldElement> terms;  // exponent -> nonzero coefficient

  static LaurentPoly zero(const FieldDesc& f) { return LaurentPoly{f, {}}; }
  static LaurentPoly constant(const FieldDesc& f, const FieldElement& c) {
    LaurentPoly r = zero(f);
    if (!c.is_zero()) r.terms.emplace(0, c);
    return r;
  }
  static LaurentPoly eps(const FieldDesc& f, i64 k, const FieldElement& c) {
    LaurentPoly r = zero(f);
    if (!c.is_zero()) r.terms.emplace(k, c);
    return r;
  }

  bool is_zero() const { return terms.empty(); }
  /// Smallest exponent with nonzero coefficient; 0 for the zero element.
  i64 valuation() const { return terms.empty() ? 0 : terms.begin()->first; }
  i64 top_exponent() const { return terms.empty() ? 0 : terms.rbegin()->first; }

  bool operator==(const LaurentPoly& o) const { return field == o.field && terms == o.terms; }

  void add_term(i64 k, const FieldElement& c) {
    if (c.is_zero()) return;
    auto it = terms.find(k);
    if (it == terms.end()) {
      terms.emplace(k, c);
    } else {
      it->second = field.add(it->second, c);
      if (it->second.is_zero()) terms.erase(it);
    }
  }
};

namespace detail {
inline void check_compatible(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.field != b.field) fail(ErrorKind::FieldMismatch, "Laurent operands over different fields");
}
}  // namespace detail

inline LaurentPoly laurent_add(const LaurentPoly& a, const LaurentPoly& b) {
  detail::check_compatible(a, b);
  LaurentPoly r = a;
  for (const auto& [k, c] : b.terms) r.add_term(k, c);
  return r;
}

inline LaurentPoly laurent_mul(const LaurentPoly& a, const LaurentPoly& b) {
  detail::check_compatible(a, b);
  LaurentPoly r = LaurentPoly::zero(a.field);
  for (const auto& [ka, ca] : a.terms)
    for (const auto& [kb, cb] : b.terms) r.add_term(ka + kb, a.field.mul(ca, cb));
  return r;
}

inline LaurentPoly laurent_neg(const LaurentPoly& a) {
  LaurentPoly r = a;
  for (auto& [k, c] : r.terms) c = a.field.neg(c);
  return r;
}

/// True when a lies in the ideal generated by eps, i.e. every exponent is >= 1.
/// The zero element qualifies.
inline bool in_eps_ideal(const LaurentPoly& a) { return a.terms.empty() || a.valuation() >= 1; }

/// Value at eps = 0: the coefficient of eps^0. Defined only for nonnegative
/// valuation; a pole raises NegativeValuation.
inline FieldElement eps_zero_value(const LaurentPoly& a) {
  if (!a.terms.empty() && a.valuation() < 0)
    fail(ErrorKind::NegativeValuation, "value at eps = 0 of an element with a pole");
  auto it = a.terms.find(0);
  return it == a.terms.end() ? a.field.zero() : it->second;
}

/// Exponent window for approximating witnesses: coordinates may range over
/// [-D, D'] with D the product and D' = (max degree) * D of the instance's
/// syntactic degrees. Requires every circuit to be syntactically nonconstant.
inline std::pair<u64, u64> eps_degree_bounds(const Instance& inst) {
  u128 product = 1;
  u64 dmax = 0;
  for (const Circuit& c : inst.circuits) {
    i64 s = syntactic_degree(c);
    if (s < 1)
      fail(ErrorKind::ConstantCircuit,
           "circuit '" + c.name + "' is syntactically constant; no exponent window");
    product = checked_mul(product, static_cast<u64>(s), "degree product");
    dmax = std::max(dmax, static_cast<u64>(s));
  }
  if (inst.circuits.empty()) fail(ErrorKind::ConstantCircuit, "empty instance has no exponent window");
  u128 dprime = checked_mul(product, dmax, "degree window");
  if (product > ~u64(0) || dprime > ~u64(0)) fail(ErrorKind::TooLarge, "degree window overflows");
  return {static_cast<u64>(product), static_cast<u64>(dprime)};
}

/// Ring adapter: evaluate circuits on Laurent points, lifting circuit
/// constants through an optional subfield embedding.
struct LaurentRing {
  using Value = LaurentPoly;
  FieldDesc field;
  std::optional<Embedding> lift;

  explicit LaurentRing(const FieldDesc& f) : field(f) {}
  LaurentRing(const FieldDesc& f, Embedding emb) : field(f), lift(std::move(emb)) {}

  Value add(const Value& a, const Value& b) const { return laurent_add(a, b); }
  Value mul(const Value& a, const Value& b) const { return laurent_mul(a, b); }
  Value constant(const FieldElement& c) const {
    return LaurentPoly::constant(field, lift ? (*lift)(c) : c);
  }
};

// --- witness files -----------------------------------------------------------
//
//   x<i> : <exp>:<c0,...> <exp>:<c0,...> ...
//
// One line per variable; a line with no terms denotes 0. An optional leading
// "field <p> <e>" line lets the witness live in an extension of the instance
// field.

struct Witness {
  FieldDesc field;
  std::vector<LaurentPoly> coords;  // one per variable
};

inline Witness parse_witness(std::istream& in, const Instance& inst) {
  Witness w;
  w.field = inst.field;
  w.coords.assign(inst.nvars, LaurentPoly::zero(inst.field));
  std::vector<bool> seen(inst.nvars, false);
  bool first_content = true;
  int lineno = 0;
  std::string line;
  auto syntax = [&](const std::string& msg) {
    fail(ErrorKind::SyntaxError, "witness line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string head;
    if (!(ss >> head)) continue;
    if (first_content && head == "field") {
      u64 p;
      u32 e;
      if (!(ss >> p >> e)) syntax("field line needs '<p> <e>'");
      FieldDesc wf = mk_field(p, e);
      if (wf.p != inst.field.p || wf.e % inst.field.e != 0)
        fail(ErrorKind::FieldMismatch, "witness field is not an extension of the instance field");
      w.field = wf;
      for (auto& c : w.coords) c = LaurentPoly::zero(wf);
      first_content = false;
      continue;
    }
    first_content = false;
    if (head.size() < 2 || head[0] != 'x') syntax("expected 'x<i>'");
    u32 idx = 0;
    try {
      idx = static_cast<u32>(std::stoul(head.substr(1)));
    } catch (const std::exception&) {
      syntax("bad variable name '" + head + "'");
    }
    if (idx == 0 || idx > inst.nvars) syntax("variable index out of range");
    if (seen[idx - 1]) syntax("duplicate line for x" + std::to_string(idx));
    seen[idx - 1] = true;
    std::string colon;
    if (!(ss >> colon) || colon != ":") syntax("expected ':' after variable name");
    LaurentPoly v = LaurentPoly::zero(w.field);
    std::string term;
    while (ss >> term) {
      auto sep = term.find(':');
      if (sep == std::string::npos) syntax("term '" + term + "' is not <exp>:<coeffs>");
      i64 k = 0;
      try {
        k = std::stoll(term.substr(0, sep));
      } catch (const std::exception&) {
        syntax("bad exponent in '" + term + "'");
      }
      FieldElement c = parse_element(w.field, term.substr(sep + 1));
      v.add_term(k, c);
    }
    w.coords[idx - 1] = std::move(v);
  }
  for (u32 i = 0; i < inst.nvars; ++i)
    if (!seen[i]) fail(ErrorKind::SyntaxError, "witness missing a line for x" + std::to_string(i + 1));
  return w;
}

inline Witness parse_witness(const std::string& text, const Instance& inst) {
  std::istringstream ss(text);
  return parse_witness(ss, inst);
}

inline std::string serialize_witness(const Witness& w, const FieldDesc& instance_field) {
  std::ostringstream out;
  if (!(w.field == instance_field)) out << "field " << w.field.p << ' ' << w.field.e << '\n';
  for (size_t i = 0; i < w.coords.size(); ++i) {
    out << 'x' << (i + 1) << " :";
    for (const auto& [k, c] : w.coords[i].terms) out << ' ' << k << ':' << format_element(w.field, c);
    out << '\n';
  }
  return out.str();
}

inline std::string laurent_to_string(const LaurentPoly& a) {
  if (a.terms.empty()) return "0";
  std::string s;
  for (const auto& [k, c] : a.terms) {
    if (!s.empty()) s += " + ";
    s += format_element(a.field, c);
    if (k != 0) s += "*eps^" + std::to_string(k);
  }
  return s;
}

}  // namespace algdep

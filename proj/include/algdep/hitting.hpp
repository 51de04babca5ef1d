#pragma once

#include <algdep/aps.hpp>
#include <algdep/circuit.hpp>

#include <bit>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace algdep {

// Hitting-set certification: compile a parameterized circuit family and a
// candidate point set into the polynomial system whose approximate solvability
// is equivalent to the candidate failing, then decide it with the APS engine.

// A family Psi(y, x) over variables (y_1..y_s', x_1..x_n): the first `sparams`
// variables are the parameters, the rest are the essential inputs. Every
// parameter choice is meant to give a homogeneous degree-r polynomial in x;
// that is a property of the shipped families, not something enforced here.
struct HittingFamily {
  FieldDesc field;
  u32 sparams = 0;
  Circuit psi;

  u32 nx() const { return psi.nvars - sparams; }
};

struct HittingInstance {
  HittingFamily family;
  u64 r = 0;
  std::vector<std::vector<FieldElement>> points;  // the candidate H
};

// --- file formats ----------------------------------------------------------------
//
// A family file is the instance text format restricted to one circuit, plus a
// "sparams <k>" header line. A point file has one point per line: n field
// constants separated by commas.

inline HittingFamily parse_family(std::istream& in) {
  std::ostringstream forward;
  std::optional<u32> sparams;
  int lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string head;
    if (ss >> head && head == "sparams") {
      if (sparams)
        fail(ErrorKind::SyntaxError, "line " + std::to_string(lineno) + ": duplicate sparams line");
      u32 k = 0;
      if (!(ss >> k) || k == 0)
        fail(ErrorKind::SyntaxError,
             "line " + std::to_string(lineno) + ": sparams needs a positive integer");
      sparams = k;
      forward << '\n';  // keep line numbers aligned for parse_instance errors
      continue;
    }
    forward << line << '\n';
  }
  if (!sparams) fail(ErrorKind::SyntaxError, "family file has no sparams line");
  Instance inst = parse_instance(forward.str());
  if (inst.circuits.size() != 1)
    fail(ErrorKind::SyntaxError, "family file must define exactly one circuit");
  HittingFamily fam{inst.field, *sparams, std::move(inst.circuits[0])};
  if (fam.sparams >= fam.psi.nvars)
    fail(ErrorKind::ArityMismatch, "family needs at least one essential variable after " +
                                       std::to_string(fam.sparams) + " parameters");
  return fam;
}

inline HittingFamily parse_family(const std::string& text) {
  std::istringstream ss(text);
  return parse_family(ss);
}

inline std::vector<std::vector<FieldElement>> parse_points(std::istream& in, const FieldDesc& f,
                                                           u32 n) {
  std::vector<std::vector<FieldElement>> pts;
  int lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<FieldElement> pt;
    std::istringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      auto b = tok.find_first_not_of(" \t\r");
      if (b == std::string::npos)
        fail(ErrorKind::SyntaxError, "point line " + std::to_string(lineno) + ": empty coordinate");
      auto e = tok.find_last_not_of(" \t\r");
      pt.push_back(parse_element(f, tok.substr(b, e - b + 1)));
    }
    if (pt.size() != n)
      fail(ErrorKind::ArityMismatch, "point line " + std::to_string(lineno) + " has " +
                                         std::to_string(pt.size()) + " coordinates, expected " +
                                         std::to_string(n));
    pts.push_back(std::move(pt));
  }
  return pts;
}

inline std::vector<std::vector<FieldElement>> parse_points(const std::string& text,
                                                           const FieldDesc& f, u32 n) {
  std::istringstream ss(text);
  return parse_points(ss, f, n);
}

// --- criterion system ------------------------------------------------------------

namespace detail {

inline void validate(const HittingInstance& hi) {
  const HittingFamily& fam = hi.family;
  if (fam.sparams == 0 || fam.sparams >= fam.psi.nvars)
    fail(ErrorKind::ArityMismatch, "family parameter arity must stay below the variable count");
  if (hi.r == 0) fail(ErrorKind::SyntaxError, "target degree r must be positive");
  if ((hi.r + 1) % fam.field.p == 0)
    fail(ErrorKind::CharDividesOrder, "characteristic " + std::to_string(fam.field.p) +
                                          " divides r + 1 = " + std::to_string(hi.r + 1));
  for (const auto& pt : hi.points)
    if (pt.size() != fam.nx())
      fail(ErrorKind::ArityMismatch, "candidate point has " + std::to_string(pt.size()) +
                                         " coordinates for " + std::to_string(fam.nx()) +
                                         " essential variables");
}

/// Replays psi, hard-wiring the essential variables to the given point. The
/// result reads only the s' parameter variables.
inline Circuit specialize_psi(const HittingFamily& fam, const std::vector<FieldElement>& v,
                              const std::string& name) {
  CircuitBuilder b(fam.psi.nvars, name);
  std::vector<u32> pos(fam.psi.gates.size());
  for (size_t g = 0; g < fam.psi.gates.size(); ++g) {
    const Gate& gate = fam.psi.gates[g];
    switch (gate.kind) {
      case GateKind::Var:
        pos[g] = gate.var > fam.sparams ? b.cst(v[gate.var - fam.sparams - 1]) : b.var(gate.var);
        break;
      case GateKind::Const: pos[g] = b.cst(gate.cval); break;
      case GateKind::Add: pos[g] = b.add(pos[gate.a], pos[gate.b]); break;
      case GateKind::Mul: pos[g] = b.mul(pos[gate.a], pos[gate.b]); break;
    }
  }
  return b.out(pos[fam.psi.output]);
}

}  // namespace detail

/// The n + h + 1 circuits over (y, x) whose approximate solvability says the
/// candidate is NOT a hitting set: every x_i is approximately a (r+1)-st root
/// of unity, Psi(y, x) is approximately 1, and the specialization Psi(y, .)
/// approximately vanishes on every candidate point.
inline Instance build_criterion(const HittingInstance& hi) {
  detail::validate(hi);
  const HittingFamily& fam = hi.family;
  const FieldDesc& F = fam.field;
  u32 n = fam.nx();
  Instance out{F, fam.psi.nvars, {}};

  for (u32 i = 1; i <= n; ++i) {
    CircuitBuilder b(fam.psi.nvars, "pow_x" + std::to_string(i));
    u32 x = b.var(fam.sparams + i);
    u32 acc = x;
    for (int bit = std::bit_width(hi.r + 1) - 2; bit >= 0; --bit) {
      acc = b.mul(acc, acc);
      if ((hi.r + 1) >> bit & 1) acc = b.mul(acc, x);
    }
    out.circuits.push_back(b.out(b.add(acc, b.cst(F.from_int(-1)))));
  }
  {
    CircuitBuilder b(fam.psi.nvars, "psi_minus_1");
    std::vector<u32> pos(fam.psi.gates.size());
    for (size_t g = 0; g < fam.psi.gates.size(); ++g) {
      const Gate& gate = fam.psi.gates[g];
      switch (gate.kind) {
        case GateKind::Var: pos[g] = b.var(gate.var); break;
        case GateKind::Const: pos[g] = b.cst(gate.cval); break;
        case GateKind::Add: pos[g] = b.add(pos[gate.a], pos[gate.b]); break;
        case GateKind::Mul: pos[g] = b.mul(pos[gate.a], pos[gate.b]); break;
      }
    }
    out.circuits.push_back(b.out(b.add(pos[fam.psi.output], b.cst(F.from_int(-1)))));
  }
  for (size_t i = 0; i < hi.points.size(); ++i)
    out.circuits.push_back(
        detail::specialize_psi(fam, hi.points[i], "psi_at_v" + std::to_string(i + 1)));
  return out;
}

/// True iff the candidate is certified as a hitting set: the criterion system
/// must NOT be approximately solvable.
inline bool certify(const HittingInstance& hi, const ApsOptions& opt = {}) {
  return !aps_decide(build_criterion(hi), opt).answer;
}

/// Draws random size-h candidates and returns the first certified one, or
/// nothing once the budget is spent. Deterministic in the seed; candidate
/// index i is always drawn from the same split stream.
inline std::optional<std::vector<std::vector<FieldElement>>> search(const HittingFamily& fam,
                                                                    u64 r, u32 h, u32 budget,
                                                                    u64 seed,
                                                                    const ApsOptions& opt = {}) {
  if (h == 0) return std::nullopt;
  u32 n = fam.nx();
  for (u32 cand = 0; cand < budget; ++cand) {
    auto rng = make_rng(seed, "hitting-search", cand);
    HittingInstance hi{fam, r, {}};
    hi.points.reserve(h);
    for (u32 i = 0; i < h; ++i) {
      std::vector<FieldElement> pt;
      pt.reserve(n);
      for (u32 j = 0; j < n; ++j) pt.push_back(sample(fam.field, rng));
      hi.points.push_back(std::move(pt));
    }
    if (certify(hi, opt)) return hi.points;
  }
  return std::nullopt;
}

/// Deterministic sweep of every size-h candidate over F_q^n in index order
/// (point 1, coordinate 1 most significant); returns the first certified one.
/// Only available while the candidate space q^{nh} stays within 2^20.
inline std::optional<std::vector<std::vector<FieldElement>>> exhaustive_search(
    const HittingFamily& fam, u64 r, u32 h, const ApsOptions& opt = {}) {
  if (h == 0) return std::nullopt;
  const FieldDesc& F = fam.field;
  u32 cells = h * fam.nx();
  u128 total = checked_pow(F.size(), cells, "candidate space size");
  if (total > (static_cast<u128>(1) << 20))
    fail(ErrorKind::ResourceLimit,
         "candidate space of " + u128_to_string(total) + " tuples exceeds the 2^20 sweep bound");
  u64 q = static_cast<u64>(F.size());
  std::vector<std::vector<FieldElement>> pts(h, std::vector<FieldElement>(fam.nx(), F.zero()));
  for (u64 idx = 0; idx < static_cast<u64>(total); ++idx) {
    u64 rest = idx;
    for (u32 c = cells; c-- > 0;) {
      pts[c / fam.nx()][c % fam.nx()] = F.from_index(rest % q);
      rest /= q;
    }
    HittingInstance hi{fam, r, pts};
    if (certify(hi, opt)) return pts;
  }
  return std::nullopt;
}

/// Exhaustive one-sided ground truth: the first parameter point (coordinate 1
/// most significant) whose specialization is a nonzero polynomial vanishing on
/// every candidate point. Such a point witnesses, without any epsilon, that
/// the candidate misses a family member.
inline std::optional<std::vector<FieldElement>> brute_counterexample(const HittingInstance& hi,
                                                                     const ResourceCaps& caps = {}) {
  detail::validate(hi);
  const HittingFamily& fam = hi.family;
  const FieldDesc& F = fam.field;
  u128 total = checked_pow(F.size(), fam.sparams, "parameter space size");
  if (total > caps.max_enum_points)
    fail(ErrorKind::ResourceLimit, "parameter scan over " + u128_to_string(total) +
                                       " points exceeds the enumeration budget");
  u32 n = fam.nx();
  for (u128 idx = 0; idx < total; ++idx) {
    std::vector<FieldElement> y(fam.sparams, F.zero());
    u128 rest = idx;
    for (u32 j = fam.sparams; j-- > 0;) {
      y[j] = F.from_index(rest % F.size());
      rest /= F.size();
    }
    std::vector<FieldElement> full = y;
    full.resize(fam.psi.nvars, F.zero());
    bool vanishes = true;
    for (const auto& pt : hi.points) {
      for (u32 j = 0; j < n; ++j) full[fam.sparams + j] = pt[j];
      if (!eval_circuit(fam.psi, F, full).is_zero()) {
        vanishes = false;
        break;
      }
    }
    if (!vanishes) continue;
    // vanishing on H established; now reject the identically zero member
    CircuitBuilder b(fam.psi.nvars, "member");
    std::vector<u32> pos(fam.psi.gates.size());
    for (size_t g = 0; g < fam.psi.gates.size(); ++g) {
      const Gate& gate = fam.psi.gates[g];
      switch (gate.kind) {
        case GateKind::Var:
          pos[g] = gate.var <= fam.sparams ? b.cst(y[gate.var - 1]) : b.var(gate.var);
          break;
        case GateKind::Const: pos[g] = b.cst(gate.cval); break;
        case GateKind::Add: pos[g] = b.add(pos[gate.a], pos[gate.b]); break;
        case GateKind::Mul: pos[g] = b.mul(pos[gate.a], pos[gate.b]); break;
      }
    }
    if (!expand(b.out(pos[fam.psi.output]), F, caps.max_terms).is_zero()) return y;
  }
  return std::nullopt;
}

}  // namespace algdep

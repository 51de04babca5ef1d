#pragma once

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "algdep/poly.hpp"

namespace algdep {

enum class GateKind { Var, Const, Add, Mul };

struct Gate {
  GateKind kind;
  u64 id = 0;     // positive, strictly increasing in file order
  u32 var = 0;    // Var: 1-based variable index
  FieldElement cval;  // Const
  u32 a = 0, b = 0;   // Add/Mul: operand positions within the gate list
};

/// Division-free arithmetic circuit over a fixed field and arity.
struct Circuit {
  std::string name;
  u32 nvars = 0;
  std::vector<Gate> gates;
  u32 output = 0;  // position of the output gate

  size_t size() const { return gates.size(); }

  bool operator==(const Circuit& o) const {
    if (name != o.name || nvars != o.nvars || output != o.output || gates.size() != o.gates.size())
      return false;
    for (size_t i = 0; i < gates.size(); ++i) {
      const Gate &g = gates[i], &h = o.gates[i];
      if (g.kind != h.kind || g.id != h.id || g.var != h.var || g.a != h.a || g.b != h.b ||
          !(g.cval == h.cval))
        return false;
    }
    return true;
  }
};

/// A tuple of circuits over one field and variable set.
struct Instance {
  FieldDesc field;
  u32 nvars = 0;
  std::vector<Circuit> circuits;

  bool operator==(const Instance& o) const {
    return field == o.field && nvars == o.nvars && circuits == o.circuits;
  }
};

/// Convenience construction of circuits gate by gate.
class CircuitBuilder {
 public:
  CircuitBuilder(u32 nvars, std::string name = "f") : name_(std::move(name)) { c_.nvars = nvars; }

  u32 var(u32 i) {
    Gate g{GateKind::Var};
    g.var = i;
    return push(g);
  }
  u32 cst(const FieldElement& v) {
    Gate g{GateKind::Const};
    g.cval = v;
    return push(g);
  }
  u32 add(u32 a, u32 b) {
    Gate g{GateKind::Add};
    g.a = a;
    g.b = b;
    return push(g);
  }
  u32 mul(u32 a, u32 b) {
    Gate g{GateKind::Mul};
    g.a = a;
    g.b = b;
    return push(g);
  }
  Circuit out(u32 pos) {
    c_.output = pos;
    c_.name = name_;
    return c_;
  }

 private:
  u32 push(Gate g) {
    g.id = c_.gates.size() + 1;
    c_.gates.push_back(g);
    return static_cast<u32>(c_.gates.size() - 1);
  }
  Circuit c_;
  std::string name_;
};

// --- generic evaluation -------------------------------------------------------
//
// A Ring supplies: typename Value; Value add(a, b); Value mul(a, b);
// Value constant(const FieldElement&). Evaluation is memoized per gate.

template <class Ring>
std::vector<typename Ring::Value> eval_gates(const Circuit& c, const Ring& ring,
                                             const std::vector<typename Ring::Value>& point) {
  if (point.size() != c.nvars) fail(ErrorKind::ArityMismatch, "point arity != circuit arity");
  std::vector<typename Ring::Value> val;
  val.reserve(c.gates.size());
  for (size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    try {
      switch (g.kind) {
        case GateKind::Var: val.push_back(point[g.var - 1]); break;
        case GateKind::Const: val.push_back(ring.constant(g.cval)); break;
        case GateKind::Add: val.push_back(ring.add(val[g.a], val[g.b])); break;
        case GateKind::Mul: val.push_back(ring.mul(val[g.a], val[g.b])); break;
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ResourceLimit)
        fail(ErrorKind::ResourceLimit, std::string(e.what()) + " at gate " + std::to_string(g.id));
      throw;
    }
  }
  return val;
}

template <class Ring>
typename Ring::Value eval_generic(const Circuit& c, const Ring& ring,
                                  const std::vector<typename Ring::Value>& point) {
  return eval_gates(c, ring, point)[c.output];
}

/// Evaluation over the field itself, optionally through a coefficient embedding.
struct FieldRing {
  using Value = FieldElement;
  FieldDesc field;
  std::optional<Embedding> lift;  // constants live in lift->src when present

  explicit FieldRing(const FieldDesc& f) : field(f) {}
  FieldRing(const FieldDesc& f, Embedding emb) : field(f), lift(std::move(emb)) {}

  Value add(const Value& a, const Value& b) const { return field.add(a, b); }
  Value mul(const Value& a, const Value& b) const { return field.mul(a, b); }
  Value constant(const FieldElement& c) const { return lift ? (*lift)(c) : c; }
};

/// Evaluation over the polynomial ring, with a term-count cap.
struct PolyRing {
  using Value = Polynomial;
  FieldDesc field;
  u32 nvars;
  u64 term_cap;

  PolyRing(const FieldDesc& f, u32 n, u64 cap = ResourceCaps{}.max_terms)
      : field(f), nvars(n), term_cap(cap) {}

  Value add(const Value& a, const Value& b) const {
    Value r = poly_add(a, b);
    if (term_cap && r.term_count() > term_cap) fail(ErrorKind::ResourceLimit, "sum exceeds term cap");
    return r;
  }
  Value mul(const Value& a, const Value& b) const { return poly_mul(a, b, term_cap); }
  Value constant(const FieldElement& c) const { return Polynomial::constant(field, nvars, c); }
};

/// Expanded sparse form of the circuit's polynomial.
inline Polynomial expand(const Circuit& c, const FieldDesc& f, u64 term_cap = ResourceCaps{}.max_terms) {
  PolyRing ring(f, c.nvars, term_cap);
  std::vector<Polynomial> point;
  for (u32 i = 1; i <= c.nvars; ++i) point.push_back(Polynomial::variable(f, c.nvars, i));
  return eval_generic(c, ring, point);
}

inline FieldElement eval_circuit(const Circuit& c, const FieldDesc& f,
                                 const std::vector<FieldElement>& point) {
  return eval_generic(c, FieldRing(f), point);
}

// --- syntactic degree -----------------------------------------------------------

/// Upper bound on the degree of the computed polynomial: vars count 1,
/// constants 0, addition takes max, multiplication adds. Saturates at 2^62.
inline i64 syntactic_degree(const Circuit& c) {
  constexpr i64 kSat = i64(1) << 62;
  std::vector<i64> deg(c.gates.size(), 0);
  for (size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    switch (g.kind) {
      case GateKind::Var: deg[i] = 1; break;
      case GateKind::Const: deg[i] = 0; break;
      case GateKind::Add: deg[i] = std::max(deg[g.a], deg[g.b]); break;
      case GateKind::Mul: deg[i] = std::min(kSat, deg[g.a] + deg[g.b]); break;
    }
  }
  return deg[c.output];
}

struct DegreeProfile {
  std::vector<i64> per_circuit;  // syntactic degree bounds
  u128 product = 1;              // degrees clamped to >= 1
  u64 max = 1;                   // likewise clamped
};

inline DegreeProfile degree_profile(const Instance& inst) {
  DegreeProfile d;
  for (const Circuit& c : inst.circuits) {
    i64 s = syntactic_degree(c);
    d.per_circuit.push_back(s);
    u64 clamped = s < 1 ? 1 : static_cast<u64>(s);
    d.product = checked_mul(d.product, clamped, "degree product");
    d.max = std::max(d.max, clamped);
  }
  return d;
}

// --- formal partial derivative ---------------------------------------------------

namespace detail {

// Forward-mode differentiation with algebraic simplification. Tags let known
// zero/one derivatives collapse products and sums instead of adding gates.
struct PartialBuilder {
  const Circuit& src;
  const FieldDesc& field;
  Circuit out;
  std::vector<int> orig_pos;  // position of copied source gate in out, -1 until emitted

  static constexpr int kZero = -1;
  static constexpr int kOne = -2;

  PartialBuilder(const Circuit& c, const FieldDesc& f) : src(c), field(f) {
    out.nvars = c.nvars;
    out.name = c.name;
    orig_pos.assign(c.gates.size(), -1);
  }

  u32 push(Gate g) {
    g.id = out.gates.size() + 1;
    out.gates.push_back(g);
    return static_cast<u32>(out.gates.size() - 1);
  }

  // Copy a source gate (and transitively its operands) into the output.
  u32 copy_orig(u32 pos) {
    if (orig_pos[pos] >= 0) return static_cast<u32>(orig_pos[pos]);
    const Gate& g = src.gates[pos];
    Gate h = g;
    if (g.kind == GateKind::Add || g.kind == GateKind::Mul) {
      h.a = copy_orig(g.a);
      h.b = copy_orig(g.b);
    }
    u32 p = push(h);
    orig_pos[pos] = static_cast<int>(p);
    return p;
  }

  int emit_const(const FieldElement& v) {
    Gate g{GateKind::Const};
    g.cval = v;
    return static_cast<int>(push(g));
  }

  int materialize(int tag) {
    if (tag == kZero) return emit_const(field.zero());
    if (tag == kOne) return emit_const(field.one());
    return tag;
  }

  int simp_mul(int da, u32 orig_b) {
    if (da == kZero) return kZero;
    if (da == kOne) return static_cast<int>(copy_orig(orig_b));
    Gate g{GateKind::Mul};
    g.a = static_cast<u32>(da);
    g.b = copy_orig(orig_b);
    return static_cast<int>(push(g));
  }

  int simp_add(int x, int y) {
    if (x == kZero) return y;
    if (y == kZero) return x;
    Gate g{GateKind::Add};
    g.a = static_cast<u32>(materialize(x));
    g.b = static_cast<u32>(materialize(y));
    return static_cast<int>(push(g));
  }

  Circuit run(u32 wrt) {
    std::vector<int> d(src.gates.size(), kZero);
    for (size_t i = 0; i < src.gates.size(); ++i) {
      const Gate& g = src.gates[i];
      switch (g.kind) {
        case GateKind::Var: d[i] = (g.var == wrt) ? kOne : kZero; break;
        case GateKind::Const: d[i] = kZero; break;
        case GateKind::Add: d[i] = simp_add(d[g.a], d[g.b]); break;
        case GateKind::Mul: d[i] = simp_add(simp_mul(d[g.a], g.b), simp_mul(d[g.b], g.a)); break;
      }
    }
    out.output = static_cast<u32>(materialize(d[src.output]));
    prune();
    return out;
  }

  // Drop gates unreachable from the output and renumber ids contiguously.
  void prune() {
    std::vector<bool> keep(out.gates.size(), false);
    std::vector<u32> stack{out.output};
    while (!stack.empty()) {
      u32 p = stack.back();
      stack.pop_back();
      if (keep[p]) continue;
      keep[p] = true;
      const Gate& g = out.gates[p];
      if (g.kind == GateKind::Add || g.kind == GateKind::Mul) {
        stack.push_back(g.a);
        stack.push_back(g.b);
      }
    }
    std::vector<Gate> kept;
    std::vector<u32> remap(out.gates.size(), 0);
    for (size_t i = 0; i < out.gates.size(); ++i) {
      if (!keep[i]) continue;
      remap[i] = static_cast<u32>(kept.size());
      Gate g = out.gates[i];
      if (g.kind == GateKind::Add || g.kind == GateKind::Mul) {
        g.a = remap[g.a];
        g.b = remap[g.b];
      }
      g.id = kept.size() + 1;
      kept.push_back(g);
    }
    out.output = remap[out.output];
    out.gates = std::move(kept);
  }
};

}  // namespace detail

/// Formal partial derivative circuit with respect to variable `wrt` (1-based).
inline Circuit formal_partial(const Circuit& c, const FieldDesc& f, u32 wrt) {
  if (wrt == 0 || wrt > c.nvars) fail(ErrorKind::ArityMismatch, "derivative variable out of range");
  detail::PartialBuilder b(c, f);
  Circuit r = b.run(wrt);
  r.name = c.name + "_d" + std::to_string(wrt);
  return r;
}

// --- text format ------------------------------------------------------------------
//
//   field <p> <e>
//   nvars <n>
//   circuit <name>
//   <id> var <i> | <id> const <c0,...> | <id> add <l> <r> | <id> mul <l> <r>
//   output <id>
//
// '#' starts a comment; gate ids are positive and strictly increasing; operands
// must reference earlier gates of the same circuit.

inline Instance parse_instance(std::istream& in) {
  Instance inst;
  bool have_field = false, have_nvars = false;
  std::optional<Circuit> cur;
  std::vector<u64> cur_ids;
  int lineno = 0;
  std::string line;

  auto syntax = [&](const std::string& msg) -> void {
    fail(ErrorKind::SyntaxError, "line " + std::to_string(lineno) + ": " + msg);
  };
  auto resolve = [&](u64 id) -> u32 {
    auto it = std::lower_bound(cur_ids.begin(), cur_ids.end(), id);
    if (it == cur_ids.end() || *it != id)
      fail(ErrorKind::UndefinedGate,
           "line " + std::to_string(lineno) + ": gate " + std::to_string(id) + " not defined yet");
    return static_cast<u32>(it - cur_ids.begin());
  };
  auto finish_circuit = [&]() {
    if (!cur) return;
    syntax("circuit '" + cur->name + "' has no output line");
  };

  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;

    if (tok == "field") {
      if (have_field) syntax("duplicate field line");
      u64 p;
      u32 e;
      if (!(ss >> p >> e)) syntax("field line needs '<p> <e>'");
      inst.field = mk_field(p, e);
      have_field = true;
    } else if (tok == "nvars") {
      if (have_nvars) syntax("duplicate nvars line");
      if (!(ss >> inst.nvars) || inst.nvars == 0) syntax("nvars needs a positive integer");
      have_nvars = true;
    } else if (tok == "circuit") {
      if (!have_field || !have_nvars) syntax("circuit before field/nvars header");
      finish_circuit();
      cur = Circuit{};
      cur_ids.clear();
      cur->nvars = inst.nvars;
      if (!(ss >> cur->name)) syntax("circuit line needs a name");
    } else if (tok == "output") {
      if (!cur) syntax("output outside a circuit block");
      if (cur->gates.empty()) syntax("circuit '" + cur->name + "' has an empty gate list");
      u64 id;
      if (!(ss >> id)) syntax("output needs a gate id");
      cur->output = resolve(id);
      inst.circuits.push_back(std::move(*cur));
      cur.reset();
    } else {
      if (!cur) syntax("gate line outside a circuit block");
      u64 id;
      try {
        id = std::stoull(tok);
      } catch (const std::exception&) {
        syntax("unrecognized directive '" + tok + "'");
        return inst;  // unreachable
      }
      if (id == 0) syntax("gate ids must be positive");
      if (!cur_ids.empty() && id <= cur_ids.back()) syntax("gate ids must be strictly increasing");
      std::string kind;
      if (!(ss >> kind)) syntax("gate " + std::to_string(id) + " missing kind");
      Gate g{};
      g.id = id;
      if (kind == "var") {
        g.kind = GateKind::Var;
        if (!(ss >> g.var)) syntax("var gate needs an index");
        if (g.var == 0 || g.var > inst.nvars) syntax("variable index out of range");
      } else if (kind == "const") {
        g.kind = GateKind::Const;
        std::string val;
        if (!(ss >> val)) syntax("const gate needs a value");
        g.cval = parse_element(inst.field, val);
      } else if (kind == "add" || kind == "mul") {
        g.kind = kind == "add" ? GateKind::Add : GateKind::Mul;
        u64 l, r;
        if (!(ss >> l >> r)) syntax(kind + " gate needs two operands");
        g.a = resolve(l);
        g.b = resolve(r);
      } else {
        syntax("unknown gate kind '" + kind + "'");
      }
      std::string extra;
      if (ss >> extra) syntax("trailing tokens on gate line");
      cur->gates.push_back(g);
      cur_ids.push_back(id);
    }
  }
  if (cur) finish_circuit();
  if (!have_field || !have_nvars) fail(ErrorKind::SyntaxError, "missing field/nvars header");
  if (inst.circuits.empty()) fail(ErrorKind::SyntaxError, "instance has no circuits");
  return inst;
}

inline Instance parse_instance(const std::string& text) {
  std::istringstream ss(text);
  return parse_instance(ss);
}

inline std::string serialize_instance(const Instance& inst) {
  std::ostringstream out;
  out << "field " << inst.field.p << ' ' << inst.field.e << '\n';
  out << "nvars " << inst.nvars << '\n';
  for (const Circuit& c : inst.circuits) {
    out << "circuit " << c.name << '\n';
    for (const Gate& g : c.gates) {
      out << g.id << ' ';
      switch (g.kind) {
        case GateKind::Var: out << "var " << g.var; break;
        case GateKind::Const: out << "const " << format_element(inst.field, g.cval); break;
        case GateKind::Add: out << "add " << c.gates[g.a].id << ' ' << c.gates[g.b].id; break;
        case GateKind::Mul: out << "mul " << c.gates[g.a].id << ' ' << c.gates[g.b].id; break;
      }
      out << '\n';
    }
    out << "output " << c.gates[c.output].id << '\n';
  }
  return out.str();
}

}  // namespace algdep

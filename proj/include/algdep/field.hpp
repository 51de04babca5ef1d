#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "algdep/common.hpp"

namespace algdep {

/// Element of F_{p^e}: coefficient vector of length e over F_p, low degree first.
struct FieldElement {
  std::vector<u64> c;

  bool operator==(const FieldElement& o) const { return c == o.c; }
  bool operator!=(const FieldElement& o) const { return !(*this == o); }
  bool is_zero() const {
    return std::all_of(c.begin(), c.end(), [](u64 v) { return v == 0; });
  }
};

/// Base-p value of the coefficient vector; canonical element order.
inline u128 element_index(const FieldElement& a, u64 p) {
  u128 v = 0;
  for (size_t i = a.c.size(); i-- > 0;) v = v * p + a.c[i];
  return v;
}

inline bool element_less(const FieldElement& a, const FieldElement& b, u64 p) {
  return element_index(a, p) < element_index(b, p);
}

namespace detail {

// Arithmetic over F_p with p < 2^61, products via 128-bit intermediates.
inline u64 mod_add(u64 a, u64 b, u64 p) {
  u64 s = a + b;
  return s >= p ? s - p : s;
}
inline u64 mod_sub(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }
inline u64 mod_mul(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<u128>(a) * b % p); }
inline u64 mod_pow(u64 a, u128 ex, u64 p) {
  u64 r = 1 % p;
  a %= p;
  while (ex) {
    if (ex & 1) r = mod_mul(r, a, p);
    a = mod_mul(a, a, p);
    ex >>= 1;
  }
  return r;
}

inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  if (n < (1ull << 32)) {
    for (u64 d = 41; d * d <= n; d += 2)
      if (n % d == 0) return false;
    return true;
  }
  // Deterministic Miller-Rabin for n < 2^64 with the standard 12-base set.
  u64 d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = mod_pow(a % n, d, n);
    if (x == 0 || x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < r; ++i) {
      x = mod_mul(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

// Dense univariate polynomials over F_p (coefficient vectors, low first),
// used only for modulus construction and irreducibility testing.
using PolyFp = std::vector<u64>;

inline void trim(PolyFp& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline PolyFp polmod_mul(const PolyFp& a, const PolyFp& b, const PolyFp& mod, u64 p) {
  if (a.empty() || b.empty()) return {};
  PolyFp r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = mod_add(r[i + j], mod_mul(a[i], b[j], p), p);
  }
  size_t e = mod.size() - 1;  // mod is monic of degree e
  for (size_t i = r.size(); i-- > e;) {
    u64 q = r[i];
    if (q == 0) continue;
    r[i] = 0;
    for (size_t j = 0; j < e; ++j) r[i - e + j] = mod_sub(r[i - e + j], mod_mul(q, mod[j], p), p);
  }
  r.resize(e);
  trim(r);
  return r;
}

inline PolyFp polmod_pow(PolyFp base, u64 ex, const PolyFp& mod, u64 p) {
  PolyFp r{1 % p};
  trim(r);
  while (ex) {
    if (ex & 1) r = polmod_mul(r, base, mod, p);
    ex >>= 1;
    if (ex) base = polmod_mul(base, base, mod, p);
  }
  return r;
}

inline PolyFp poly_gcd(PolyFp a, PolyFp b, u64 p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    // a mod b
    u64 lead_inv = mod_pow(b.back(), p - 2, p);
    while (a.size() >= b.size()) {
      u64 q = mod_mul(a.back(), lead_inv, p);
      size_t shift = a.size() - b.size();
      for (size_t j = 0; j < b.size(); ++j)
        a[shift + j] = mod_sub(a[shift + j], mod_mul(q, b[j], p), p);
      trim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  return a;
}

inline std::vector<u64> prime_factors(u64 n) {
  std::vector<u64> fs;
  for (u64 d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d == 0) {
      fs.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) fs.push_back(n);
  return fs;
}

/// Rabin irreducibility test for a monic degree-e polynomial over F_p.
inline bool is_irreducible(const PolyFp& f, u64 p) {
  size_t e = f.size() - 1;
  if (e == 1) return true;
  // t^(p^k) mod f by iterating the p-th power map.
  std::vector<PolyFp> frob(e + 1);
  frob[0] = {0, 1};  // t, already reduced since deg f >= 2
  for (size_t k = 1; k <= e; ++k) frob[k] = polmod_pow(frob[k - 1], p, f, p);
  // t^(p^e) == t (mod f)
  PolyFp t{0, 1};
  trim(t);
  if (frob[e] != t) return false;
  for (u64 ell : prime_factors(static_cast<u64>(e))) {
    PolyFp g = frob[e / ell];
    // gcd(t^(p^(e/ell)) - t, f) must be 1
    if (g.size() < 2) g.resize(2, 0);
    g[1] = mod_sub(g[1], 1, p);
    trim(g);
    PolyFp d = poly_gcd(g, f, p);
    if (d.size() != 1) return false;
  }
  return true;
}

}  // namespace detail

/// Description of F_{p^e}. For e > 1 the modulus is the first monic
/// irreducible degree-e polynomial over F_p when non-leading coefficient
/// vectors are ordered by their base-p value, so equal (p, e) always yields
/// structurally equal fields.
struct FieldDesc {
  u64 p = 0;
  u32 e = 1;
  std::vector<u64> modulus;  // non-leading coefficients c0..c_{e-1}; monic leading 1 implied

  bool operator==(const FieldDesc& o) const { return p == o.p && e == o.e && modulus == o.modulus; }
  bool operator!=(const FieldDesc& o) const { return !(*this == o); }

  u128 size() const { return checked_pow(p, e, "field size overflows 128 bits"); }

  FieldElement zero() const { return FieldElement{std::vector<u64>(e, 0)}; }
  FieldElement one() const {
    FieldElement a = zero();
    a.c[0] = 1 % p;
    return a;
  }
  /// Element from a base-p index (canonical enumeration order).
  FieldElement from_index(u128 idx) const {
    FieldElement a = zero();
    for (u32 i = 0; i < e; ++i) {
      a.c[i] = static_cast<u64>(idx % p);
      idx /= p;
    }
    return a;
  }
  FieldElement from_int(i64 v) const {
    i64 r = v % static_cast<i64>(p);
    if (r < 0) r += static_cast<i64>(p);
    FieldElement a = zero();
    a.c[0] = static_cast<u64>(r);
    return a;
  }

  void check(const FieldElement& a, const char* what) const {
    if (a.c.size() != e) fail(ErrorKind::FieldMismatch, std::string(what) + ": wrong component count");
    for (u64 v : a.c)
      if (v >= p) fail(ErrorKind::FieldMismatch, std::string(what) + ": component out of range");
  }

  FieldElement add(const FieldElement& a, const FieldElement& b) const {
    FieldElement r = zero();
    for (u32 i = 0; i < e; ++i) r.c[i] = detail::mod_add(a.c[i], b.c[i], p);
    return r;
  }
  FieldElement sub(const FieldElement& a, const FieldElement& b) const {
    FieldElement r = zero();
    for (u32 i = 0; i < e; ++i) r.c[i] = detail::mod_sub(a.c[i], b.c[i], p);
    return r;
  }
  FieldElement neg(const FieldElement& a) const { return sub(zero(), a); }

  FieldElement mul(const FieldElement& a, const FieldElement& b) const {
    if (e == 1) return FieldElement{{detail::mod_mul(a.c[0], b.c[0], p)}};
    std::vector<u64> r(2 * e - 1, 0);
    for (u32 i = 0; i < e; ++i) {
      if (a.c[i] == 0) continue;
      for (u32 j = 0; j < e; ++j)
        r[i + j] = detail::mod_add(r[i + j], detail::mod_mul(a.c[i], b.c[j], p), p);
    }
    // reduce by the monic modulus
    for (size_t i = r.size(); i-- > e;) {
      u64 q = r[i];
      if (q == 0) continue;
      r[i] = 0;
      for (u32 j = 0; j < e; ++j)
        r[i - e + j] = detail::mod_sub(r[i - e + j], detail::mod_mul(q, modulus[j], p), p);
    }
    r.resize(e);
    return FieldElement{std::move(r)};
  }

  FieldElement pow(FieldElement a, u128 ex) const {
    FieldElement r = one();
    while (ex) {
      if (ex & 1) r = mul(r, a);
      ex >>= 1;
      if (ex) a = mul(a, a);
    }
    return r;
  }

  FieldElement inv(const FieldElement& a) const {
    if (a.is_zero()) fail(ErrorKind::DivisionByZero, "inverse of zero");
    return pow(a, size() - 2);
  }

  FieldElement div(const FieldElement& a, const FieldElement& b) const { return mul(a, inv(b)); }
};

/// Construct F_{p^e}. Rejects composite p, p >= 2^61, and p^e >= 2^128.
inline FieldDesc mk_field(u64 p, u32 e) {
  if (p >= (1ull << 61)) fail(ErrorKind::TooLarge, "characteristic must be below 2^61");
  if (!detail::is_prime_u64(p)) fail(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
  if (e == 0) fail(ErrorKind::TooLarge, "extension degree must be positive");
  checked_pow(p, e, "field size overflows 128 bits");

  FieldDesc f;
  f.p = p;
  f.e = e;
  if (e == 1) {
    f.modulus = {0};  // t
    return f;
  }
  // First irreducible monic polynomial t^e + c_{e-1} t^{e-1} + ... + c_0 in
  // base-p order of (c_0, ..., c_{e-1}).
  u128 total = checked_pow(p, e, "modulus search space");
  for (u128 idx = 0; idx < total; ++idx) {
    detail::PolyFp cand(e + 1, 0);
    cand[e] = 1;
    u128 v = idx;
    for (u32 i = 0; i < e; ++i) {
      cand[i] = static_cast<u64>(v % p);
      v /= p;
    }
    if (detail::is_irreducible(cand, p)) {
      f.modulus.assign(cand.begin(), cand.begin() + e);
      return f;
    }
  }
  fail(ErrorKind::Internal, "no irreducible modulus found");
}

// --- element text form: "c0,c1,...,c_{e-1}" (single value for e = 1) --------

inline std::string format_element(const FieldDesc& f, const FieldElement& a) {
  std::string s;
  for (u32 i = 0; i < f.e; ++i) {
    if (i) s += ',';
    s += std::to_string(a.c[i]);
  }
  return s;
}

inline FieldElement parse_element(const FieldDesc& f, const std::string& text) {
  FieldElement a = f.zero();
  std::stringstream ss(text);
  std::string part;
  u32 i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= f.e) fail(ErrorKind::FieldMismatch, "too many components in '" + text + "'");
    if (part.empty()) fail(ErrorKind::SyntaxError, "empty component in '" + text + "'");
    try {
      long long v = std::stoll(part);
      long long r = v % static_cast<long long>(f.p);
      if (r < 0) r += static_cast<long long>(f.p);
      a.c[i] = static_cast<u64>(r);
    } catch (const std::exception&) {
      fail(ErrorKind::SyntaxError, "bad field constant '" + text + "'");
    }
    ++i;
  }
  if (i == 0) fail(ErrorKind::SyntaxError, "empty field constant");
  if (i != f.e && i != 1)
    fail(ErrorKind::FieldMismatch, "constant '" + text + "' has " + std::to_string(i) +
                                       " components, field needs " + std::to_string(f.e));
  return a;  // single component over an extension means a prime-subfield constant
}

/// Uniform element; consumes e rejection-sampled draws.
inline FieldElement sample(const FieldDesc& f, std::mt19937_64& rng) {
  FieldElement a = f.zero();
  for (u32 i = 0; i < f.e; ++i) a.c[i] = uniform_u64(rng, f.p);
  return a;
}

// --- subfield embedding ------------------------------------------------------

/// Embedding F_{p^es} -> F_{p^ed} (es | ed), realized by mapping the source
/// generator t to a root of the source modulus in the destination field.
struct Embedding {
  FieldDesc src;
  FieldDesc dst;
  FieldElement t_image;

  FieldElement operator()(const FieldElement& a) const {
    if (src.e == 1) {
      FieldElement r = dst.zero();
      r.c[0] = a.c[0];
      return r;
    }
    // Horner in the destination field
    FieldElement r = dst.zero();
    for (size_t i = src.e; i-- > 0;) {
      r = dst.mul(r, t_image);
      FieldElement ci = dst.zero();
      ci.c[0] = a.c[i];
      r = dst.add(r, ci);
    }
    return r;
  }
};

inline Embedding make_embedding(const FieldDesc& src, const FieldDesc& dst,
                                u64 scan_cap = ResourceCaps{}.max_field_scan) {
  if (src.p != dst.p || dst.e % src.e != 0)
    fail(ErrorKind::FieldMismatch, "no embedding between the given fields");
  if (src == dst) {
    FieldElement t = dst.zero();
    if (dst.e > 1) t.c[1] = 1;
    return Embedding{src, dst, t};
  }
  if (src.e == 1) return Embedding{src, dst, dst.zero()};
  u128 q = dst.size();
  if (q > scan_cap) fail(ErrorKind::TooLarge, "embedding root search exceeds field scan cap");
  // First root (canonical element order) of the source modulus in dst.
  for (u128 idx = 0; idx < q; ++idx) {
    FieldElement cand = dst.from_index(idx);
    FieldElement v = dst.zero();
    // evaluate t^e + sum modulus[i] t^i at cand
    FieldElement power = dst.one();
    for (u32 i = 0; i < src.e; ++i) {
      FieldElement ci = dst.zero();
      ci.c[0] = src.modulus[i];
      v = dst.add(v, dst.mul(ci, power));
      power = dst.mul(power, cand);
    }
    v = dst.add(v, power);
    if (v.is_zero()) return Embedding{src, dst, cand};
  }
  fail(ErrorKind::Internal, "subfield root not found");
}

/// Smallest F_{p^{e*j}} with size >= bound, together with the embedding.
inline Embedding smallest_extension_of_size(const FieldDesc& f, u128 bound) {
  u32 j = 1;
  while (true) {
    u128 sz = checked_pow(f.p, static_cast<u64>(f.e) * j, "extension size overflows 128 bits");
    if (sz >= bound) break;
    ++j;
  }
  if (j == 1) return make_embedding(f, f);
  FieldDesc ext = mk_field(f.p, f.e * j);
  return make_embedding(f, ext);
}

// --- roots of unity -----------------------------------------------------------

struct RootsOfUnity {
  FieldDesc field;    // smallest F_{p^{e*j}} with k | p^{e*j} - 1
  std::vector<FieldElement> roots;  // all k of them, canonical element order
};

inline RootsOfUnity roots_of_unity(const FieldDesc& f, u64 k, u64 scan_cap = ResourceCaps{}.max_field_scan) {
  if (k == 0) fail(ErrorKind::TooLarge, "order must be positive");
  if (f.p != 0 && k % f.p == 0)
    fail(ErrorKind::CharDividesOrder, "characteristic divides requested order " + std::to_string(k));
  if (k == 1) return RootsOfUnity{f, {f.one()}};

  // smallest j with k | p^{e*j} - 1, i.e. the multiplicative order of q mod k
  u128 q = f.size();
  u64 qk = static_cast<u64>(q % k);
  u64 j = 1, acc = qk % k;
  while (acc != 1 % k) {
    acc = static_cast<u64>(static_cast<u128>(acc) * qk % k);
    ++j;
    if (static_cast<u64>(f.e) * j > 128) fail(ErrorKind::TooLarge, "roots live in too large an extension");
  }
  FieldDesc ext = (j == 1) ? f : mk_field(f.p, f.e * static_cast<u32>(j));
  u128 qe = ext.size();
  u128 d = (qe - 1) / k;

  // find an element of multiplicative order exactly k
  std::vector<u64> kfactors = detail::prime_factors(k);
  FieldElement gen = ext.zero();
  u128 scan = qe < scan_cap ? qe : static_cast<u128>(scan_cap);
  bool found = false;
  for (u128 idx = 1; idx < scan; ++idx) {
    FieldElement u = ext.pow(ext.from_index(idx), d);
    if (u.is_zero() || u == ext.one()) continue;
    bool full_order = true;
    for (u64 ell : kfactors) {
      if (ext.pow(u, k / ell) == ext.one()) {
        full_order = false;
        break;
      }
    }
    if (full_order) {
      gen = u;
      found = true;
      break;
    }
  }
  if (!found) fail(ErrorKind::ResourceLimit, "root-of-unity generator search exhausted scan cap");

  std::vector<FieldElement> roots;
  FieldElement r = ext.one();
  for (u64 i = 0; i < k; ++i) {
    roots.push_back(r);
    r = ext.mul(r, gen);
  }
  std::sort(roots.begin(), roots.end(), [&](const FieldElement& a, const FieldElement& b) {
    return element_less(a, b, ext.p);
  });
  return RootsOfUnity{ext, std::move(roots)};
}

// --- packed small-field arithmetic -------------------------------------------
//
// For exhaustive sweeps over F_q^n the vector representation is too slow.
// Elements are packed as their base-p index; multiplication goes through
// discrete-log tables and addition through Zech logarithms (XOR for p = 2).

struct SmallField {
  FieldDesc desc;
  u32 q = 0;
  u32 qm1 = 0;
  static constexpr u32 kZechZero = 0xffffffffu;
  std::vector<u32> expt;  // expt[i] = index of g^i, length q-1
  std::vector<u32> logt;  // logt[idx] = i, length q
  std::vector<u32> zech;  // zech[z] = log(1 + g^z), kZechZero if 1 + g^z = 0
  u32 neg_log = 0;        // log of -1 (0 when p = 2)

  explicit SmallField(const FieldDesc& f, u64 scan_cap = ResourceCaps{}.max_field_scan) : desc(f) {
    u128 sz = f.size();
    if (sz > scan_cap) fail(ErrorKind::TooLarge, "field too large for packed tables");
    q = static_cast<u32>(sz);
    qm1 = q - 1;
    if (f.e == 1) return;  // direct modular arithmetic

    auto decode = [&](u32 idx) { return f.from_index(idx); };
    auto encode = [&](const FieldElement& a) { return static_cast<u32>(element_index(a, f.p)); };

    std::vector<u64> fs = detail::prime_factors(qm1);
    u32 gidx = 0;
    for (u32 cand = 2; cand < q; ++cand) {
      FieldElement g = decode(cand);
      bool primitive = true;
      for (u64 ell : fs) {
        if (f.pow(g, qm1 / ell) == f.one()) {
          primitive = false;
          break;
        }
      }
      if (primitive) {
        gidx = cand;
        break;
      }
    }
    if (gidx == 0) fail(ErrorKind::Internal, "no primitive element");

    expt.assign(qm1, 0);
    logt.assign(q, 0);
    FieldElement g = decode(gidx), acc = f.one();
    for (u32 i = 0; i < qm1; ++i) {
      u32 idx = encode(acc);
      expt[i] = idx;
      logt[idx] = i;
      acc = f.mul(acc, g);
    }
    zech.assign(qm1, kZechZero);
    FieldElement one = f.one();
    for (u32 z = 0; z < qm1; ++z) {
      FieldElement s = f.add(one, decode(expt[z]));
      if (!s.is_zero()) zech[z] = logt[encode(s)];
    }
    neg_log = logt[encode(f.neg(one))];
  }

  u32 add(u32 a, u32 b) const {
    if (desc.e == 1) return detail::mod_add(a, b, desc.p) & 0xffffffffu;
    if (desc.p == 2) return a ^ b;
    if (a == 0) return b;
    if (b == 0) return a;
    u32 la = logt[a], lb = logt[b];
    u32 z = lb >= la ? lb - la : lb + qm1 - la;
    u32 t = zech[z];
    if (t == kZechZero) return 0;
    u32 s = la + t;
    if (s >= qm1) s -= qm1;
    return expt[s];
  }

  u32 neg(u32 a) const {
    if (desc.e == 1) return a == 0 ? 0 : static_cast<u32>(desc.p) - a;
    if (desc.p == 2 || a == 0) return a;
    u32 s = logt[a] + neg_log;
    if (s >= qm1) s -= qm1;
    return expt[s];
  }

  u32 mul(u32 a, u32 b) const {
    if (desc.e == 1) return static_cast<u32>(detail::mod_mul(a, b, desc.p));
    if (a == 0 || b == 0) return 0;
    u32 s = logt[a] + logt[b];
    if (s >= qm1) s -= qm1;
    return expt[s];
  }

  u32 encode(const FieldElement& a) const { return static_cast<u32>(element_index(a, desc.p)); }
  FieldElement decode(u32 idx) const { return desc.from_index(idx); }
};

}  // namespace algdep

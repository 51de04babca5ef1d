#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace algdep {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

enum class ErrorKind {
  NotPrime,
  TooLarge,
  DivisionByZero,
  CharDividesOrder,
  ArityMismatch,
  FieldMismatch,
  ResourceLimit,
  SyntaxError,
  UndefinedGate,
  NegativeValuation,
  ConstantCircuit,
  ThresholdViolation,
  NotPrincipalCase,
  Internal,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotPrime: return "NotPrime";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::CharDividesOrder: return "CharDividesOrder";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::FieldMismatch: return "FieldMismatch";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UndefinedGate: return "UndefinedGate";
    case ErrorKind::NegativeValuation: return "NegativeValuation";
    case ErrorKind::ConstantCircuit: return "ConstantCircuit";
    case ErrorKind::ThresholdViolation: return "ThresholdViolation";
    case ErrorKind::NotPrincipalCase: return "NotPrincipalCase";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

/// Resource caps shared by expansion, matrix assembly and exhaustive sweeps.
struct ResourceCaps {
  u64 max_terms = 200000;          // term count per expanded polynomial
  u64 max_matrix_cells = 1u << 26; // rows*cols of a single linear system
  u64 max_enum_points = 1u << 24;  // exhaustive domain sweeps
  u64 max_field_scan = 1u << 22;   // per-element scans of one field
};

// --- deterministic seeding -------------------------------------------------
//
// All randomized operations take a 64-bit seed. Sub-streams are derived by
// mixing the seed with a role tag and a trial index, so a single RunConfig
// seed reproduces every draw of a run byte-for-byte.

inline u64 splitmix64(u64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline u64 hash_tag(std::string_view tag) {
  u64 h = 0xcbf29ce484222325ULL; // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::mt19937_64 make_rng(u64 seed, std::string_view tag, u64 index = 0) {
  return std::mt19937_64(splitmix64(splitmix64(seed ^ hash_tag(tag)) + index));
}

/// Uniform draw from [0, n) by rejection; portable across standard libraries
/// (unlike std::uniform_int_distribution, whose mapping is unspecified).
inline u64 uniform_u64(std::mt19937_64& rng, u64 n) {
  if (n == 0) fail(ErrorKind::Internal, "uniform_u64 over empty range");
  if ((n & (n - 1)) == 0) return rng() & (n - 1);
  u64 limit = std::numeric_limits<u64>::max() - std::numeric_limits<u64>::max() % n;
  u64 v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

// --- checked 128-bit helpers ------------------------------------------------

inline u128 checked_mul(u128 a, u128 b, const char* what) {
  if (a != 0 && b > static_cast<u128>(-1) / a) fail(ErrorKind::TooLarge, what);
  return a * b;
}

inline u128 checked_pow(u128 base, u64 exp, const char* what) {
  u128 r = 1;
  while (exp) {
    if (exp & 1) r = checked_mul(r, base, what);
    exp >>= 1;
    if (exp) base = checked_mul(base, base, what);
  }
  return r;
}

inline std::string u128_to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

}  // namespace algdep

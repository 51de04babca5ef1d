#pragma once

#include <algorithm>
#include <vector>

#include "algdep/field.hpp"

namespace algdep {

/// Incremental Gauss-Jordan elimination over a finite field.
///
/// Rows arrive one at a time and the reducer keeps its stored rows in reduced
/// row echelon form throughout, so a caller can stop feeding rows as soon as
/// the rank saturates. Column order is fixed by the caller; pivots are always
/// normalized to 1 and cleared from every other stored row. Prime fields get a
/// flat u64 representation; extensions fall back to FieldElement rows.
class RowReducer {
 public:
  RowReducer(const FieldDesc& f, size_t cols, u64 max_cells = ResourceCaps{}.max_matrix_cells)
      : field_(f),
        fast_(f.e == 1),
        cols_(cols),
        max_cells_(max_cells),
        col_pivot_(cols, kNoPivot) {}

  size_t cols() const { return cols_; }
  size_t rank() const { return pivot_cols_.size(); }
  bool saturated() const { return rank() == cols_; }
  const std::vector<size_t>& pivot_cols() const { return pivot_cols_; }

  /// Reduce `r` against the current rows. Returns true when the row carried a
  /// new pivot (rank grew), false when it reduced to zero.
  bool add_row(const std::vector<FieldElement>& r) {
    if (r.size() != cols_) fail(ErrorKind::Internal, "row width mismatch");
    charge();
    if (!fast_) return add_generic(r);
    std::vector<u64> row(cols_);
    for (size_t j = 0; j < cols_; ++j) row[j] = r[j].c[0];
    return add_fast(std::move(row));
  }

  /// Prime-field entry point taking residues directly.
  bool add_row_u64(std::vector<u64> r) {
    if (!fast_) fail(ErrorKind::Internal, "u64 rows need a prime field");
    if (r.size() != cols_) fail(ErrorKind::Internal, "row width mismatch");
    charge();
    return add_fast(std::move(r));
  }

  /// Stored row i as field elements.
  std::vector<FieldElement> row(size_t i) const {
    if (!fast_) return rows_e_[i];
    std::vector<FieldElement> out(cols_, field_.zero());
    for (size_t j = 0; j < cols_; ++j) out[j].c[0] = rows_1_[i][j];
    return out;
  }

  /// Kernel basis of the matrix whose rows were fed in: one vector per free
  /// column, with a 1 in that column.
  std::vector<std::vector<FieldElement>> nullspace_basis() const {
    std::vector<std::vector<FieldElement>> basis;
    for (size_t c = 0; c < cols_; ++c) {
      if (col_pivot_[c] != kNoPivot) continue;
      std::vector<FieldElement> v(cols_, field_.zero());
      v[c] = field_.one();
      for (size_t i = 0; i < rank(); ++i) {
        FieldElement coef = fast_ ? residue(rows_1_[i][c]) : rows_e_[i][c];
        if (!coef.is_zero()) v[pivot_cols_[i]] = field_.neg(coef);
      }
      basis.push_back(std::move(v));
    }
    return basis;
  }

 private:
  static constexpr size_t kNoPivot = static_cast<size_t>(-1);

  void charge() {
    fed_ += 1;
    if (static_cast<u128>(fed_) * cols_ > max_cells_)
      fail(ErrorKind::ResourceLimit, "linear system exceeds the cell budget");
  }

  FieldElement residue(u64 v) const {
    FieldElement r = field_.zero();
    r.c[0] = v;
    return r;
  }

  bool add_fast(std::vector<u64> r) {
    const u64 p = field_.p;
    size_t lead = kNoPivot;
    for (size_t c = 0; c < cols_; ++c) {
      if (r[c] == 0) continue;
      size_t pr = col_pivot_[c];
      if (pr == kNoPivot) {
        if (lead == kNoPivot) lead = c;
        continue;
      }
      const std::vector<u64>& pivot_row = rows_1_[pr];
      u64 factor = r[c];
      for (size_t j = c; j < cols_; ++j)
        if (pivot_row[j]) r[j] = detail::mod_sub(r[j], detail::mod_mul(factor, pivot_row[j], p), p);
    }
    if (lead == kNoPivot) return false;
    u64 inv = detail::mod_pow(r[lead], p - 2, p);
    for (size_t j = lead; j < cols_; ++j)
      if (r[j]) r[j] = detail::mod_mul(r[j], inv, p);
    for (auto& row : rows_1_) {
      u64 factor = row[lead];
      if (!factor) continue;
      for (size_t j = lead; j < cols_; ++j)
        if (r[j]) row[j] = detail::mod_sub(row[j], detail::mod_mul(factor, r[j], p), p);
    }
    col_pivot_[lead] = rows_1_.size();
    rows_1_.push_back(std::move(r));
    pivot_cols_.push_back(lead);
    return true;
  }

  bool add_generic(std::vector<FieldElement> r) {
    size_t lead = kNoPivot;
    for (size_t c = 0; c < cols_; ++c) {
      if (r[c].is_zero()) continue;
      size_t pr = col_pivot_[c];
      if (pr == kNoPivot) {
        if (lead == kNoPivot) lead = c;
        continue;
      }
      eliminate(r, rows_e_[pr], c);
    }
    if (lead == kNoPivot) return false;
    FieldElement inv = field_.inv(r[lead]);
    for (size_t j = lead; j < cols_; ++j)
      if (!r[j].is_zero()) r[j] = field_.mul(r[j], inv);
    for (auto& row : rows_e_) eliminate(row, r, lead);
    col_pivot_[lead] = rows_e_.size();
    rows_e_.push_back(std::move(r));
    pivot_cols_.push_back(lead);
    return true;
  }

  // row -= row[c] * pivot_row, where pivot_row[c] == 1.
  void eliminate(std::vector<FieldElement>& row, const std::vector<FieldElement>& pivot_row,
                 size_t c) const {
    if (row[c].is_zero()) return;
    FieldElement factor = row[c];
    for (size_t j = c; j < cols_; ++j)
      if (!pivot_row[j].is_zero())
        row[j] = field_.sub(row[j], field_.mul(factor, pivot_row[j]));
  }

  FieldDesc field_;
  bool fast_;
  size_t cols_;
  u64 max_cells_;
  u64 fed_ = 0;
  std::vector<std::vector<u64>> rows_1_;           // prime-field rows
  std::vector<std::vector<FieldElement>> rows_e_;  // extension rows
  std::vector<size_t> pivot_cols_;
  std::vector<size_t> col_pivot_;
};

/// Reduced row echelon form of an explicit list of rows. The result's rows are
/// ordered by pivot column; each pivot is 1 and alone in its column.
inline std::vector<std::vector<FieldElement>> rref_rows(
    const FieldDesc& f, const std::vector<std::vector<FieldElement>>& rows) {
  if (rows.empty()) return {};
  RowReducer red(f, rows[0].size());
  for (const auto& r : rows) red.add_row(r);
  std::vector<size_t> order(red.rank());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return red.pivot_cols()[a] < red.pivot_cols()[b]; });
  std::vector<std::vector<FieldElement>> out;
  out.reserve(order.size());
  for (size_t i : order) out.push_back(red.row(i));
  return out;
}

/// Rank of the matrix given as rows.
inline size_t matrix_rank(const FieldDesc& f, const std::vector<std::vector<FieldElement>>& rows) {
  if (rows.empty()) return 0;
  RowReducer red(f, rows[0].size());
  for (const auto& r : rows) {
    red.add_row(r);
    if (red.saturated()) break;
  }
  return red.rank();
}

}  // namespace algdep

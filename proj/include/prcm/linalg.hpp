#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prcm/fq.hpp"

namespace prcm {

// Sparse F_q vector: (index, value) pairs sorted by index, values in [1, q).
struct SparseVec {
    std::vector<std::pair<uint32_t, uint32_t>> nz;

    bool empty() const { return nz.empty(); }
    uint32_t leading_index() const { return nz.front().first; }
    uint32_t leading_value() const { return nz.front().second; }
    void clear() { nz.clear(); }

    uint32_t at(uint32_t idx) const {
        for (const auto& [i, v] : nz)
            if (i == idx) return v;
        return 0;
    }
};

// r += c * x  (over F_q)
void axpy(const Fq& F, SparseVec& r, uint32_t c, const SparseVec& x);

// Column-major sparse matrix over F_q.
struct SparseMatFq {
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<SparseVec> col;

    SparseMatFq() = default;
    SparseMatFq(uint32_t r, uint32_t c) : rows(r), cols(c), col(c) {}

    void set(uint32_t r, uint32_t c, uint32_t v);
    SparseVec mul_vec(const Fq& F, const SparseVec& x) const; // A x
    SparseMatFq transpose() const;
};

// Incremental Gaussian elimination over F_q, column by column. Pivots are
// chosen at the lowest nonzero row index of the reduced column, so the set of
// pivot rows and the reduced columns are deterministic for a fixed insertion
// order. Supports rank queries, membership tests and (optionally) tracking of
// the combination of inserted columns that produced each pivot, which yields
// kernel vectors and solves.
class EliminationFront {
public:
    EliminationFront(const Fq& F, uint32_t rows, bool track_combinations = false)
        : F_(F), rows_(rows), pivot_of_row_(rows, -1), track_(track_combinations) {}

    // Reduces `v` in place against the current pivots. If combinations are
    // tracked, `comb` accumulates the coefficients (indexed by insertion id)
    // of the pivot columns used.
    void reduce(SparseVec& v, SparseVec* comb = nullptr) const;

    // Inserts a column (with external id `id`); returns 1 if it increased the
    // rank (a new pivot was created), 0 if it reduced to zero.
    int add_column(SparseVec v, uint32_t id);

    // comb output of a full reduction of `v` to zero, or nullopt if v is
    // outside the span. Requires track_combinations.
    std::optional<SparseVec> express(const SparseVec& v) const;

    uint32_t rank() const { return static_cast<uint32_t>(cols_.size()); }
    uint32_t rows() const { return rows_; }
    const Fq& field() const { return F_; }

private:
    Fq F_;
    uint32_t rows_;
    std::vector<int32_t> pivot_of_row_;     // row -> index into cols_, or -1
    std::vector<SparseVec> cols_;           // reduced pivot columns, leading value 1
    std::vector<SparseVec> combs_;          // combination over inserted ids
    std::vector<uint32_t> ids_;             // external id per pivot column
    bool track_;
};

uint32_t rank(const Fq& F, const SparseMatFq& A);

// Kernel basis in the deterministic reduced form: columns are processed in
// order and every column that falls in the span of its predecessors yields
// one kernel vector supported on that column plus earlier pivot columns.
std::vector<SparseVec> kernel_basis(const Fq& F, const SparseMatFq& A);

// Some x with A x = b (free variables zero), or nullopt if inconsistent.
std::optional<SparseVec> solve(const Fq& F, const SparseMatFq& A, const SparseVec& b);

// Rank of A restricted to a subset of columns.
uint32_t rank_of_columns(const Fq& F, const SparseMatFq& A, const std::vector<uint32_t>& cols);

// Dense elimination oracle used by tests and brute-force verification paths.
uint32_t dense_rank(const Fq& F, const SparseMatFq& A);

// Rank tracker with column removal: additions go through the incremental
// front, removals rebuild it from the stored column set.
class RankTracker {
public:
    RankTracker(const Fq& F, uint32_t rows) : F_(F), rows_(rows), front_(F_, rows) {}

    void add(uint32_t id, SparseVec col);
    void remove(uint32_t id);
    uint32_t rank_with(const SparseVec& extra) const; // rank if `extra` were appended
    uint32_t rank() const { return front_.rank(); }

private:
    void rebuild();

    Fq F_;
    uint32_t rows_;
    std::vector<std::pair<uint32_t, SparseVec>> columns_; // insertion order
    EliminationFront front_;
};

} // namespace prcm

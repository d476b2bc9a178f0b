#include "prcm/linalg.hpp"

#include <algorithm>

namespace prcm {

void axpy(const Fq& F, SparseVec& r, uint32_t c, const SparseVec& x) {
    if (c == 0 || x.nz.empty()) return;
    SparseVec out;
    out.nz.reserve(r.nz.size() + x.nz.size());
    size_t a = 0, b = 0;
    while (a < r.nz.size() || b < x.nz.size()) {
        if (b == x.nz.size() || (a < r.nz.size() && r.nz[a].first < x.nz[b].first)) {
            out.nz.push_back(r.nz[a++]);
        } else if (a == r.nz.size() || x.nz[b].first < r.nz[a].first) {
            out.nz.emplace_back(x.nz[b].first, F.mul(c, x.nz[b].second));
            ++b;
        } else {
            uint32_t v = F.add(r.nz[a].second, F.mul(c, x.nz[b].second));
            if (v != 0) out.nz.emplace_back(r.nz[a].first, v);
            ++a;
            ++b;
        }
    }
    r.nz = std::move(out.nz);
}

void SparseMatFq::set(uint32_t r, uint32_t c, uint32_t v) {
    auto& nz = col[c].nz;
    auto it = std::lower_bound(nz.begin(), nz.end(), r,
                               [](const auto& e, uint32_t row) { return e.first < row; });
    if (it != nz.end() && it->first == r) {
        if (v == 0)
            nz.erase(it);
        else
            it->second = v;
    } else if (v != 0) {
        nz.insert(it, {r, v});
    }
}

SparseVec SparseMatFq::mul_vec(const Fq& F, const SparseVec& x) const {
    SparseVec r;
    for (const auto& [j, xj] : x.nz) axpy(F, r, xj, col[j]);
    return r;
}

SparseMatFq SparseMatFq::transpose() const {
    SparseMatFq T(cols, rows);
    for (uint32_t c = 0; c < cols; ++c)
        for (const auto& [r, v] : col[c].nz) T.col[r].nz.emplace_back(c, v);
    return T;
}

void EliminationFront::reduce(SparseVec& v, SparseVec* comb) const {
    while (!v.empty()) {
        uint32_t r = v.leading_index();
        int32_t p = pivot_of_row_[r];
        if (p < 0) return;
        uint32_t c = v.leading_value(); // pivot column has leading value 1
        if (comb && track_) axpy(F_, *comb, c, combs_[p]);
        axpy(F_, v, F_.neg(c), cols_[p]);
    }
}

int EliminationFront::add_column(SparseVec v, uint32_t id) {
    SparseVec comb;
    if (track_) comb.nz.emplace_back(id, 1);
    while (!v.empty()) {
        uint32_t r = v.leading_index();
        int32_t p = pivot_of_row_[r];
        if (p < 0) {
            uint32_t lead = v.leading_value();
            uint32_t s = F_.inv(lead);
            if (s != 1) {
                for (auto& e : v.nz) e.second = F_.mul(e.second, s);
                if (track_)
                    for (auto& e : comb.nz) e.second = F_.mul(e.second, s);
            }
            pivot_of_row_[r] = static_cast<int32_t>(cols_.size());
            cols_.push_back(std::move(v));
            if (track_) combs_.push_back(std::move(comb));
            ids_.push_back(id);
            return 1;
        }
        uint32_t c = v.leading_value();
        // Invariant: the stored column equals A * comb, so the reduction
        // subtracts from both sides.
        if (track_) axpy(F_, comb, F_.neg(c), combs_[p]);
        axpy(F_, v, F_.neg(c), cols_[p]);
    }
    return 0;
}

std::optional<SparseVec> EliminationFront::express(const SparseVec& v) const {
    SparseVec w = v, comb;
    reduce(w, &comb);
    if (!w.empty()) return std::nullopt;
    return comb;
}

uint32_t rank(const Fq& F, const SparseMatFq& A) {
    EliminationFront front(F, A.rows);
    for (uint32_t c = 0; c < A.cols; ++c) front.add_column(A.col[c], c);
    return front.rank();
}

std::vector<SparseVec> kernel_basis(const Fq& F, const SparseMatFq& A) {
    EliminationFront front(F, A.rows, /*track=*/true);
    std::vector<SparseVec> basis;
    for (uint32_t c = 0; c < A.cols; ++c) {
        // Reduce with combination tracking; if the column is dependent the
        // accumulated combination is a kernel vector.
        SparseVec v = A.col[c];
        SparseVec dep;
        front.reduce(v, &dep);
        if (v.empty()) {
            // kernel vector: x_c = 1, minus the combination that expresses
            // column c through earlier pivots.
            SparseVec k;
            k.nz.emplace_back(c, 1);
            axpy(F, k, F.neg(1), dep);
            basis.push_back(std::move(k));
        } else {
            front.add_column(A.col[c], c);
        }
    }
    return basis;
}

std::optional<SparseVec> solve(const Fq& F, const SparseMatFq& A, const SparseVec& b) {
    if (!b.empty() && b.nz.back().first >= A.rows)
        throw std::invalid_argument("solve: rhs dimension exceeds matrix rows");
    EliminationFront front(F, A.rows, /*track=*/true);
    for (uint32_t c = 0; c < A.cols; ++c) front.add_column(A.col[c], c);
    return front.express(b);
}

uint32_t rank_of_columns(const Fq& F, const SparseMatFq& A, const std::vector<uint32_t>& cols) {
    EliminationFront front(F, A.rows);
    for (uint32_t c : cols) front.add_column(A.col[c], c);
    return front.rank();
}

uint32_t dense_rank(const Fq& F, const SparseMatFq& A) {
    std::vector<std::vector<uint32_t>> M(A.rows, std::vector<uint32_t>(A.cols, 0));
    for (uint32_t c = 0; c < A.cols; ++c)
        for (const auto& [r, v] : A.col[c].nz) M[r][c] = v;
    uint32_t rk = 0;
    for (uint32_t c = 0; c < A.cols && rk < A.rows; ++c) {
        uint32_t pr = rk;
        while (pr < A.rows && M[pr][c] == 0) ++pr;
        if (pr == A.rows) continue;
        std::swap(M[pr], M[rk]);
        uint32_t s = F.inv(M[rk][c]);
        for (uint32_t j = c; j < A.cols; ++j) M[rk][j] = F.mul(M[rk][j], s);
        for (uint32_t r = 0; r < A.rows; ++r) {
            if (r == rk || M[r][c] == 0) continue;
            uint32_t f = M[r][c];
            for (uint32_t j = c; j < A.cols; ++j)
                M[r][j] = F.sub(M[r][j], F.mul(f, M[rk][j]));
        }
        ++rk;
    }
    return rk;
}

void RankTracker::add(uint32_t id, SparseVec col) {
    columns_.emplace_back(id, col);
    front_.add_column(std::move(col), id);
}

void RankTracker::remove(uint32_t id) {
    auto it = std::find_if(columns_.begin(), columns_.end(),
                           [&](const auto& e) { return e.first == id; });
    if (it == columns_.end()) return;
    columns_.erase(it);
    rebuild();
}

void RankTracker::rebuild() {
    front_ = EliminationFront(F_, rows_);
    for (const auto& [id, col] : columns_) front_.add_column(col, id);
}

uint32_t RankTracker::rank_with(const SparseVec& extra) const {
    SparseVec v = extra;
    front_.reduce(v);
    return front_.rank() + (v.empty() ? 0 : 1);
}

} // namespace prcm

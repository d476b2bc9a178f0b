#include "prcm/homology.hpp"

#include <numeric>
#include <stdexcept>

namespace prcm {

uint32_t BoundaryMatrices::cells(int k) const {
    if (k < 0 || k > top_dim()) return 0;
    if (k >= 1) return d[k].cols;
    return d.size() > 1 ? d[1].rows : 0;
}

void BoundaryMatrices::validate(const Fq& F) const {
    for (int k = 2; k <= top_dim(); ++k) {
        if (d[k].rows != d[k - 1].cols)
            throw std::invalid_argument("boundary matrices have inconsistent shapes");
        for (uint32_t c = 0; c < d[k].cols; ++c)
            if (!d[k - 1].mul_vec(F, d[k].col[c]).empty())
                throw std::invalid_argument("boundary of boundary is nonzero");
    }
}

int betti(const Fq& F, const BoundaryMatrices& M, int k) {
    if (k < 0 || k > M.top_dim()) return 0;
    uint32_t n = M.cells(k);
    uint32_t rk = (k >= 1) ? rank(F, M.d[k]) : 0;
    uint32_t rk1 = (k + 1 <= M.top_dim()) ? rank(F, M.d[k + 1]) : 0;
    return static_cast<int>(n - rk - rk1);
}

HomologyContext::HomologyContext(const Complex& ambient, uint32_t q_field)
    : X_(ambient), F_(q_field) {
    bmat_.resize(X_.max_dim() + 1);
    bmat_rank_.resize(X_.max_dim() + 1);
    image_front_.resize(X_.max_dim() + 1);
}

const SparseMatFq& HomologyContext::boundary_matrix(int k) const {
    if (k < 1 || k > X_.max_dim()) throw std::invalid_argument("no boundary matrix at this dim");
    if (!bmat_[k]) bmat_[k] = X_.boundary_matrix(k, F_);
    return *bmat_[k];
}

uint32_t HomologyContext::skeleton_rank(int k) const {
    if (k < 1) return 0;
    if (!bmat_rank_[k]) bmat_rank_[k] = rank(F_, boundary_matrix(k));
    return *bmat_rank_[k];
}

uint32_t HomologyContext::rank_open(int i, const std::vector<uint8_t>& open) const {
    const SparseMatFq& A = boundary_matrix(i);
    EliminationFront front(F_, A.rows);
    for (uint32_t c = 0; c < A.cols; ++c)
        if (open[c]) front.add_column(A.col[c], c);
    return front.rank();
}

int HomologyContext::betti(int i, const std::vector<uint8_t>& open, int k) const {
    if (k < 0 || k > i) return 0;
    uint32_t eta = static_cast<uint32_t>(std::count(open.begin(), open.end(), 1));
    uint32_t n = (k == i) ? eta : X_.cell_count(k);
    uint32_t r_k = 0, r_k1 = 0;
    if (k >= 1) r_k = (k == i) ? rank_open(i, open) : skeleton_rank(k);
    if (k + 1 <= i) r_k1 = (k + 1 == i) ? rank_open(i, open) : skeleton_rank(k + 1);
    return static_cast<int>(n - r_k - r_k1);
}

int HomologyContext::betti_full(int k) const {
    if (k < 0 || k > X_.max_dim()) return 0;
    uint32_t r_k = (k >= 1) ? skeleton_rank(k) : 0;
    uint32_t r_k1 = (k + 1 <= X_.max_dim()) ? skeleton_rank(k + 1) : 0;
    return static_cast<int>(X_.cell_count(k) - r_k - r_k1);
}

std::vector<SparseVec> HomologyContext::cycle_basis(int i, const std::vector<uint8_t>& open,
                                                    int k) const {
    if (k == 0) {
        // Every vertex is a 0-cycle.
        std::vector<SparseVec> basis(X_.cell_count(0));
        for (uint32_t v = 0; v < basis.size(); ++v) basis[v].nz.emplace_back(v, 1);
        return basis;
    }
    const SparseMatFq& A = boundary_matrix(k);
    if (k < i) return kernel_basis(F_, A);
    // k == i: kernel over the open columns, expressed in ambient cell ids.
    SparseMatFq sub(A.rows, 0);
    std::vector<uint32_t> ids;
    for (uint32_t c = 0; c < A.cols; ++c) {
        if (!open[c]) continue;
        sub.col.push_back(A.col[c]);
        ++sub.cols;
        ids.push_back(c);
    }
    std::vector<SparseVec> basis = kernel_basis(F_, sub);
    for (auto& v : basis)
        for (auto& e : v.nz) e.first = ids[e.first];
    return basis;
}

HomologySummary HomologyContext::induced_summary(int i, const std::vector<uint8_t>& open,
                                                 int k) const {
    HomologySummary s;
    s.k = k;
    if (k < 0 || k > i) return s;
    s.betti = betti(i, open, k);
    // Giant rank: classes of Z_k(P) surviving modulo ambient k-boundaries.
    uint32_t image_rank = 0;
    if (k + 1 <= X_.max_dim()) {
        if (!image_front_[k + 1]) {
            const SparseMatFq& B = boundary_matrix(k + 1);
            EliminationFront front(F_, B.rows);
            for (uint32_t c = 0; c < B.cols; ++c) front.add_column(B.col[c], c);
            image_front_[k + 1] = std::move(front);
        }
        image_rank = image_front_[k + 1]->rank();
    }
    uint32_t joint = image_rank;
    if (k + 1 <= X_.max_dim()) {
        EliminationFront front = *image_front_[k + 1];
        for (const auto& z : cycle_basis(i, open, k)) front.add_column(z, 0);
        joint = front.rank();
    } else {
        EliminationFront front(F_, X_.cell_count(k));
        for (const auto& z : cycle_basis(i, open, k)) front.add_column(z, 0);
        joint = front.rank();
    }
    s.giant_cycles = static_cast<int>(joint - image_rank);
    s.local_cycles = s.betti - s.giant_cycles;
    return s;
}

bool HomologyContext::is_null_homologous(const Chain& gamma, int i,
                                         const std::vector<uint8_t>& open) const {
    if (gamma.dim != i - 1)
        throw std::invalid_argument("null-homology test expects an (i-1)-chain");
    if (gamma.dim >= 1) {
        if (!boundary_matrix(gamma.dim).mul_vec(F_, gamma.v).empty())
            throw std::invalid_argument("chain is not a cycle");
    } else {
        // A 0-chain is a cycle iff its coefficients sum to zero.
        uint32_t sum = 0;
        for (const auto& [idx, v] : gamma.v.nz) sum = F_.add(sum, v);
        if (sum != 0) throw std::invalid_argument("0-chain coefficients do not sum to zero");
    }
    const SparseMatFq& A = boundary_matrix(i);
    EliminationFront front(F_, A.rows);
    for (uint32_t c = 0; c < A.cols; ++c)
        if (open[c]) front.add_column(A.col[c], c);
    SparseVec g = gamma.v;
    front.reduce(g);
    return g.empty();
}

long HomologyContext::euler_characteristic(int i, const std::vector<uint8_t>& open) const {
    long chi = 0;
    for (int k = 0; k < i; ++k) chi += (k % 2 == 0 ? 1L : -1L) * X_.cell_count(k);
    long eta = std::count(open.begin(), open.end(), 1);
    chi += (i % 2 == 0 ? 1L : -1L) * eta;
    return chi;
}

bool HomologyContext::euler_poincare_check(int i, const std::vector<uint8_t>& open) const {
    long alt = 0;
    for (int k = 0; k <= i; ++k) alt += (k % 2 == 0 ? 1L : -1L) * betti(i, open, k);
    return alt == euler_characteristic(i, open);
}

AlexanderReport HomologyContext::alexander_check(int i, const std::vector<uint8_t>& open) const {
    if (!X_.is_torus()) throw std::invalid_argument("alexander check needs a torus");
    int d = X_.dimension();
    AlexanderReport r;
    std::vector<uint8_t> dual = dual_open_set(X_, i, open);
    r.primal = induced_summary(i, open, i);
    r.dual = induced_summary(d - i, dual, d - i);
    r.dual_lower = induced_summary(d - i, dual, d - i - 1);
    r.rank_nullity_ok = (r.primal.local_cycles + r.primal.giant_cycles == r.primal.betti) &&
                        (r.dual.local_cycles + r.dual.giant_cycles == r.dual.betti);
    long binom = 1;
    for (int j = 0; j < i; ++j) binom = binom * (d - j) / (j + 1);
    r.giant_sum_ok = (r.primal.giant_cycles + r.dual.giant_cycles == binom);
    r.local_match_ok = (r.primal.local_cycles == r.dual_lower.local_cycles);
    return r;
}

int HomologyContext::betti_eta_offset(int i) const {
    std::vector<uint8_t> empty(X_.cell_count(i), 0);
    return betti(i, empty, i) - betti(i, empty, i - 1);
}

int giant_rank_i1(const Complex& torus, const std::vector<uint8_t>& open_edges, const Fq& F) {
    if (!torus.is_torus()) throw std::invalid_argument("winding rank needs a torus");
    int d = torus.dimension();
    int N = torus.period();
    uint32_t nv = torus.cell_count(0);

    std::vector<uint32_t> parent(nv);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<uint8_t> rank_uf(nv, 0);
    std::vector<int32_t> offset(static_cast<size_t>(nv) * d, 0); // lift of v minus lift of root

    std::vector<int32_t> off_u(d), off_v(d);
    auto find = [&](uint32_t v, std::vector<int32_t>& acc) {
        std::fill(acc.begin(), acc.end(), 0);
        uint32_t root = v;
        while (parent[root] != root) {
            for (int a = 0; a < d; ++a) acc[a] += offset[static_cast<size_t>(root) * d + a];
            root = parent[root];
        }
        // Path compression with offset folding.
        uint32_t cur = v;
        std::vector<int32_t> run(d, 0);
        while (parent[cur] != root && parent[cur] != cur) {
            uint32_t next = parent[cur];
            for (int a = 0; a < d; ++a) {
                int32_t o = offset[static_cast<size_t>(cur) * d + a];
                offset[static_cast<size_t>(cur) * d + a] = acc[a] - run[a];
                run[a] += o;
            }
            parent[cur] = root;
            cur = next;
        }
        return root;
    };

    // Winding vectors reduced over F_q with a tiny elimination (at most d pivots).
    std::vector<std::vector<uint32_t>> pivots;
    std::vector<int> pivot_pos;
    int grank = 0;
    auto add_winding = [&](const std::vector<int32_t>& w) {
        std::vector<uint32_t> v(d);
        bool zero = true;
        for (int a = 0; a < d; ++a) {
            v[a] = F.from_int(w[a]);
            if (v[a]) zero = false;
        }
        if (zero) return;
        for (size_t j = 0; j < pivots.size(); ++j) {
            uint32_t c = v[pivot_pos[j]];
            if (!c) continue;
            for (int a = 0; a < d; ++a) v[a] = F.sub(v[a], F.mul(c, pivots[j][a]));
        }
        int pos = -1;
        for (int a = 0; a < d; ++a)
            if (v[a]) {
                pos = a;
                break;
            }
        if (pos < 0) return;
        uint32_t s = F.inv(v[pos]);
        for (int a = 0; a < d; ++a) v[a] = F.mul(v[a], s);
        pivots.push_back(std::move(v));
        pivot_pos.push_back(pos);
        ++grank;
    };

    CellId e;
    for (uint32_t id = 0; id < open_edges.size(); ++id) {
        if (!open_edges[id] || grank == d) continue;
        e = torus.cell(1, id);
        int axis = std::countr_zero(e.dirs);
        CellId u_cell{e.base, 0};
        CellId v_cell = u_cell;
        v_cell.base[axis] = (v_cell.base[axis] + 1) % N;
        uint32_t u = torus.index_of(u_cell);
        uint32_t v = torus.index_of(v_cell);
        uint32_t ru = find(u, off_u);
        uint32_t rv = find(v, off_v);
        if (ru == rv) {
            // Fundamental cycle: u -> v along the edge, back v -> u in the
            // tree. Its lift displacement is divisible by N per axis and the
            // quotient is the winding vector.
            std::vector<int32_t> w(d);
            for (int a = 0; a < d; ++a) {
                int32_t disp = off_u[a] - off_v[a] + (a == axis ? 1 : 0);
                w[a] = disp / N;
            }
            add_winding(w);
        } else {
            // Union: make rv's tree hang under ru with the right offset:
            // lift(v) = lift(u) + e_axis.
            if (rank_uf[ru] < rank_uf[rv]) {
                // attach ru under rv: lift(u) = lift(v) - e_axis
                for (int a = 0; a < d; ++a)
                    offset[static_cast<size_t>(ru) * d + a] =
                        off_v[a] - off_u[a] - (a == axis ? 1 : 0);
                parent[ru] = rv;
            } else {
                for (int a = 0; a < d; ++a)
                    offset[static_cast<size_t>(rv) * d + a] =
                        off_u[a] - off_v[a] + (a == axis ? 1 : 0);
                parent[rv] = ru;
                if (rank_uf[ru] == rank_uf[rv]) ++rank_uf[ru];
            }
        }
    }
    return grank;
}

} // namespace prcm

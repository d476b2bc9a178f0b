#include "prcm/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace prcm {

namespace {

// i = 1: b_0 is the number of connected components of the open edge graph.
// Opening an edge lowers it exactly when its endpoints are not already
// connected through the other open edges.
class GraphConnectivityOracle final : public BettiDeltaOracle {
public:
    GraphConnectivityOracle(const Complex& X, const std::vector<uint8_t>& open) : open_(open) {
        uint32_t nv = X.cell_count(0);
        uint32_t ne = X.cell_count(1);
        tail_.resize(ne);
        head_.resize(ne);
        adjacency_.resize(nv);
        std::vector<std::pair<uint32_t, int>> faces;
        for (uint32_t e = 0; e < ne; ++e) {
            X.boundary_indices(1, e, faces);
            // faces = {(head,+1),(tail,-1)} in construction order
            uint32_t h = faces[0].first, t = faces[1].first;
            head_[e] = h;
            tail_[e] = t;
            adjacency_[h].emplace_back(e, t);
            adjacency_[t].emplace_back(e, h);
        }
        mark_.assign(nv, 0);
        epoch_ = 0;
    }

    bool opening_reduces_betti(uint32_t cell) override {
        return !connected_avoiding(tail_[cell], head_[cell], cell);
    }

    void set_state(uint32_t cell, bool open) override { open_[cell] = open; }

    void reset(const std::vector<uint8_t>& open) override { open_ = open; }

private:
    bool connected_avoiding(uint32_t s, uint32_t t, uint32_t avoid) {
        if (s == t) return true;
        if (epoch_ > 0xFFFFFFF0u) {
            std::fill(mark_.begin(), mark_.end(), 0);
            epoch_ = 0;
        }
        epoch_ += 2;
        uint32_t m0 = epoch_, m1 = epoch_ + 1;
        frontier_[0] = {s};
        frontier_[1] = {t};
        mark_[s] = m0;
        mark_[t] = m1;
        while (!frontier_[0].empty() && !frontier_[1].empty()) {
            int side = frontier_[0].size() <= frontier_[1].size() ? 0 : 1;
            uint32_t mine = side == 0 ? m0 : m1;
            uint32_t theirs = side == 0 ? m1 : m0;
            next_.clear();
            for (uint32_t v : frontier_[side]) {
                for (const auto& [e, w] : adjacency_[v]) {
                    if (e == avoid || !open_[e]) continue;
                    if (mark_[w] == theirs) return true;
                    if (mark_[w] == mine) continue;
                    mark_[w] = mine;
                    next_.push_back(w);
                }
            }
            frontier_[side].swap(next_);
        }
        return false;
    }

    std::vector<uint8_t> open_;
    std::vector<uint32_t> tail_, head_;
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> adjacency_;
    std::vector<uint32_t> mark_;
    std::vector<uint32_t> frontier_[2], next_;
    uint32_t epoch_;
};

// i = d-1 on a box: b_{d-2}(P) is the cycle rank of the closed dual graph, so
// opening a cell lowers it exactly when the cell's dual edge lies on a cycle,
// i.e. its endpoints stay connected without it.
class DualGraphOracle final : public BettiDeltaOracle {
public:
    DualGraphOracle(const Complex& X, const std::vector<uint8_t>& open)
        : graph_(X), open_(open) {}

    bool opening_reduces_betti(uint32_t cell) override {
        return graph_.endpoints_connected(open_, cell, nullptr, nullptr, nullptr);
    }

    void set_state(uint32_t cell, bool open) override { open_[cell] = open; }
    void reset(const std::vector<uint8_t>& open) override { open_ = open; }

private:
    DualGraphCodim1 graph_;
    std::vector<uint8_t> open_;
};

// Generic oracle: the open boundary columns are kept in an elimination front.
// Visits that only add columns extend the front in place; closing a covered
// column forces a rebuild. Both paths agree with a full recompute.
class EliminationOracle final : public BettiDeltaOracle {
public:
    EliminationOracle(const Complex& X, int i, uint32_t q_field,
                      const std::vector<uint8_t>& open)
        : F_(q_field), A_(X.boundary_matrix(i, F_)), open_(open),
          front_(F_, A_.rows), covered_(A_.cols, 0) {
        dirty_ = true;
    }

    bool opening_reduces_betti(uint32_t cell) override {
        if (dirty_ || covered_[cell]) {
            rebuild_excluding(cell);
        } else {
            for (uint32_t c = 0; c < A_.cols; ++c)
                if (open_[c] && !covered_[c] && c != cell) {
                    front_.add_column(A_.col[c], c);
                    covered_[c] = 1;
                }
        }
        SparseVec v = A_.col[cell];
        front_.reduce(v);
        return !v.empty();
    }

    void set_state(uint32_t cell, bool open) override {
        if (!open && covered_[cell]) dirty_ = true;
        open_[cell] = open;
    }

    void reset(const std::vector<uint8_t>& open) override {
        open_ = open;
        dirty_ = true;
    }

private:
    void rebuild_excluding(uint32_t cell) {
        front_ = EliminationFront(F_, A_.rows);
        std::fill(covered_.begin(), covered_.end(), 0);
        for (uint32_t c = 0; c < A_.cols; ++c)
            if (open_[c] && c != cell) {
                front_.add_column(A_.col[c], c);
                covered_[c] = 1;
            }
        dirty_ = false;
    }

    Fq F_;
    SparseMatFq A_;
    std::vector<uint8_t> open_;
    EliminationFront front_;
    std::vector<uint8_t> covered_;
    bool dirty_ = true;
};

} // namespace

DualGraphCodim1::DualGraphCodim1(const Complex& X) {
    int d = X.dimension();
    if (X.is_torus() || X.max_dim() < d)
        throw std::invalid_argument("codim-1 dual graph needs a box with top cells");
    uint32_t n_top = X.cell_count(d);
    uint32_t outside = n_top;
    n_nodes_ = n_top + 1;
    uint32_t ne = X.cell_count(d - 1);
    tail_.assign(ne, outside);
    head_.assign(ne, outside);
    incident_.resize(n_nodes_);
    std::vector<std::pair<uint32_t, int>> cofaces;
    for (uint32_t e = 0; e < ne; ++e) {
        X.coboundary_indices(d - 1, e, cofaces);
        for (const auto& [top, sign] : cofaces) {
            if (sign > 0)
                head_[e] = top;
            else
                tail_[e] = top;
        }
        incident_[head_[e]].push_back(e);
        incident_[tail_[e]].push_back(e);
    }
    mark_.assign(n_nodes_, 0);
    dist_value_.assign(n_nodes_, 0);
    epoch_ = 0;
}

bool DualGraphCodim1::endpoints_connected(const std::vector<uint8_t>& open, uint32_t cell,
                                          const std::vector<uint32_t>* weight, const Fq* F,
                                          uint32_t* parity_out) const {
    uint32_t s = tail_[cell], t = head_[cell];
    bool with_parity = weight != nullptr;
    if (s == t) {
        if (parity_out) *parity_out = 0;
        return true;
    }
    if (epoch_ > 0xFFFFFFF0u) {
        std::fill(mark_.begin(), mark_.end(), 0);
        epoch_ = 0;
    }
    epoch_ += 2;
    uint32_t m[2] = {epoch_, epoch_ + 1};
    auto* frontier = frontier_;
    auto& next = next_;
    frontier[0].assign(1, s);
    frontier[1].assign(1, t);
    mark_[s] = m[0];
    mark_[t] = m[1];
    dist_value_[s] = 0;
    dist_value_[t] = 0;
    while (!frontier[0].empty() && !frontier[1].empty()) {
        int side = frontier[0].size() <= frontier[1].size() ? 0 : 1;
        next.clear();
        for (uint32_t v : frontier[side]) {
            for (uint32_t e : incident_[v]) {
                if (e == cell || open[e]) continue; // dual edges exist for closed cells
                uint32_t w = tail_[e] == v ? head_[e] : tail_[e];
                uint32_t val = 0;
                if (with_parity) {
                    // crossing tail->head adds the weight, head->tail subtracts
                    uint32_t we = (*weight)[e];
                    val = (tail_[e] == v) ? F->add(dist_value_[v], we)
                                          : F->sub(dist_value_[v], we);
                }
                if (mark_[w] == m[1 - side]) {
                    if (parity_out) {
                        // val would be the potential of w seen from this side;
                        // combine with the other side's value at w.
                        uint32_t mine = val;
                        uint32_t other = dist_value_[w];
                        // potential difference head-source minus tail-source
                        *parity_out = side == 0 ? F->sub(mine, other) : F->sub(other, mine);
                    }
                    return true;
                }
                if (mark_[w] == m[side]) continue;
                mark_[w] = m[side];
                dist_value_[w] = val;
                next.push_back(w);
            }
        }
        frontier[side].swap(next);
    }
    return false;
}

bool DualGraphCodim1::weights_consistent(const std::vector<uint8_t>& open,
                                         const std::vector<uint32_t>& weight,
                                         const Fq& F) const {
    // Potential assignment over closed dual edges; every non-tree closed edge
    // must close a zero-weight cycle. A nonzero-weight cycle necessarily
    // contains a weighted closed edge, so only components touching one need
    // to be grown.
    if (epoch_ > 0xFFFFFFF0u) {
        std::fill(mark_.begin(), mark_.end(), 0);
        epoch_ = 0;
    }
    epoch_ += 2;
    uint32_t m = epoch_;
    auto& queue = stack_;
    for (uint32_t seed = 0; seed < weight.size(); ++seed) {
        if (weight[seed] == 0 || open[seed]) continue;
        uint32_t root = tail_[seed];
        if (mark_[root] == m) continue;
        mark_[root] = m;
        dist_value_[root] = 0;
        queue.assign(1, root);
        while (!queue.empty()) {
            uint32_t v = queue.back();
            queue.pop_back();
            for (uint32_t e : incident_[v]) {
                if (open[e]) continue;
                uint32_t w = tail_[e] == v ? head_[e] : tail_[e];
                uint32_t val = (tail_[e] == v) ? F.add(dist_value_[v], weight[e])
                                               : F.sub(dist_value_[v], weight[e]);
                if (mark_[w] == m) {
                    if (dist_value_[w] != val) return false;
                } else {
                    mark_[w] = m;
                    dist_value_[w] = val;
                    queue.push_back(w);
                }
            }
        }
    }
    return true;
}

std::unique_ptr<BettiDeltaOracle> make_elimination_oracle(const Complex& X, int i,
                                                          uint32_t q_field,
                                                          const std::vector<uint8_t>& open) {
    return std::make_unique<EliminationOracle>(X, i, q_field, open);
}

std::unique_ptr<BettiDeltaOracle> make_betti_oracle(const Complex& X, int i, uint32_t q_field,
                                                    const std::vector<uint8_t>& open) {
    if (i == 1) return std::make_unique<GraphConnectivityOracle>(X, open);
    if (!X.is_torus() && i == X.dimension() - 1 && X.dimension() >= 3 &&
        X.max_dim() == X.dimension())
        return std::make_unique<DualGraphOracle>(X, open);
    return std::make_unique<EliminationOracle>(X, i, q_field, open);
}

} // namespace prcm

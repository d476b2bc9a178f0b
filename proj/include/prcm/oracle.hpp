#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "prcm/complex.hpp"
#include "prcm/fq.hpp"
#include "prcm/linalg.hpp"

namespace prcm {

// Answers the single question the heat-bath chain asks at every step: does
// opening `cell` lower b_{i-1} by one, given the states of all other cells?
// Implementations mirror the configuration; callers must report every state
// change through set_state.
class BettiDeltaOracle {
public:
    virtual ~BettiDeltaOracle() = default;
    virtual bool opening_reduces_betti(uint32_t cell) = 0;
    virtual void set_state(uint32_t cell, bool open) = 0;
    virtual void reset(const std::vector<uint8_t>& open) = 0;
};

// Picks the cheapest exact oracle for the geometry:
//  - i = 1: connectivity of the open edge graph,
//  - i = d-1 on boxes: connectivity of the closed dual graph,
//  - otherwise: sparse elimination over F_q with rebuild on column removal.
std::unique_ptr<BettiDeltaOracle> make_betti_oracle(const Complex& X, int i, uint32_t q_field,
                                                    const std::vector<uint8_t>& open);

// The elimination-based oracle is exposed for tests.
std::unique_ptr<BettiDeltaOracle> make_elimination_oracle(const Complex& X, int i,
                                                          uint32_t q_field,
                                                          const std::vector<uint8_t>& open);

// Codimension-one dual graph of a box: one node per d-cell plus a single
// outside node; each (d-1)-cell is an edge between the d-cells it bounds
// (or the outside). Closed cells carry their dual edge; b_{d-2}(P) equals the
// cycle rank of that graph. Edge orientation follows the coboundary signs so
// F_q edge weights can detect nonvanishing linking with a reference chain.
class DualGraphCodim1 {
public:
    DualGraphCodim1(const Complex& X);

    uint32_t n_nodes() const { return n_nodes_; }
    uint32_t tail(uint32_t cell) const { return tail_[cell]; }
    uint32_t head(uint32_t cell) const { return head_[cell]; }

    // Connectivity between the dual endpoints of `cell` through closed cells,
    // excluding `cell` itself. If `parity_out` is nonnull it receives the
    // F_q-weighted path sum tail->head (weights from `weight`, field F).
    bool endpoints_connected(const std::vector<uint8_t>& open, uint32_t cell,
                             const std::vector<uint32_t>* weight, const Fq* F,
                             uint32_t* parity_out) const;

    // True when every cycle of the closed dual graph has zero F_q weight sum;
    // with weights = crossing coefficients of a reference disk this is the
    // null-homology event for the disk's boundary.
    bool weights_consistent(const std::vector<uint8_t>& open, const std::vector<uint32_t>& weight,
                            const Fq& F) const;

private:
    uint32_t n_nodes_ = 0;
    std::vector<uint32_t> tail_, head_;           // per (d-1)-cell
    std::vector<std::vector<uint32_t>> incident_; // node -> incident cells
    mutable std::vector<uint32_t> mark_;
    mutable std::vector<uint32_t> dist_value_;
    mutable std::vector<uint32_t> frontier_[2], next_, stack_;
    mutable uint32_t epoch_ = 0;
};

} // namespace prcm

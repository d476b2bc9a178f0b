#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "prcm/complex.hpp"
#include "prcm/fq.hpp"
#include "prcm/linalg.hpp"

namespace prcm {

// Rank data of the inclusion-induced map on k-th homology for a plaquette
// complex P inside its ambient torus: betti = local_cycles + giant_cycles.
struct HomologySummary {
    int k = 0;
    int betti = 0;
    int local_cycles = 0; // dim ker of the induced map
    int giant_cycles = 0; // rank of the induced map
};

struct AlexanderReport {
    HomologySummary primal;      // at dimension i
    HomologySummary dual;        // at dimension d-i
    HomologySummary dual_lower;  // at dimension d-i-1
    bool rank_nullity_ok = false;
    bool giant_sum_ok = false;   // b_i + b*_{d-i} = C(d,i)
    bool local_match_ok = false; // a_i = a*_{d-i-1}
    bool all_ok() const { return rank_nullity_ok && giant_sum_ok && local_match_ok; }
};

// Hand-built chain complex given by explicit boundary matrices; d[k] maps
// k-chains to (k-1)-chains (entries d[1], d[2], ... present as needed).
struct BoundaryMatrices {
    std::vector<SparseMatFq> d; // d[0] unused
    uint32_t cells(int k) const;
    int top_dim() const { return static_cast<int>(d.size()) - 1; }
    void validate(const Fq& F) const; // shape and d.d = 0 checks
};

int betti(const Fq& F, const BoundaryMatrices& M, int k);

// Betti numbers, induced maps and cycle tests for a plaquette complex: the
// full (i-1)-skeleton of `ambient` plus the i-cells flagged in `open`.
// Caches ambient boundary matrices so repeated queries against one complex
// stay cheap.
class HomologyContext {
public:
    HomologyContext(const Complex& ambient, uint32_t q_field);

    const Complex& ambient() const { return X_; }
    const Fq& field() const { return F_; }
    const SparseMatFq& boundary_matrix(int k) const;

    int betti(int i, const std::vector<uint8_t>& open, int k) const;
    HomologySummary induced_summary(int i, const std::vector<uint8_t>& open, int k) const;

    // Betti number of the ambient complex itself (all cells up to max_dim).
    int betti_full(int k) const;

    // The event V_gamma: gamma (an (i-1)-cycle) bounds an i-chain of P.
    bool is_null_homologous(const Chain& gamma, int i, const std::vector<uint8_t>& open) const;

    long euler_characteristic(int i, const std::vector<uint8_t>& open) const;
    bool euler_poincare_check(int i, const std::vector<uint8_t>& open) const;

    AlexanderReport alexander_check(int i, const std::vector<uint8_t>& open) const;

    // The configuration-independent constant  b_i - b_{i-1} - eta  of a
    // plaquette complex in this ambient space, computed on the empty
    // configuration.
    int betti_eta_offset(int i) const;

    // Rank of the full-skeleton boundary matrix (cached).
    uint32_t skeleton_rank(int k) const;

private:
    uint32_t rank_open(int i, const std::vector<uint8_t>& open) const;
    std::vector<SparseVec> cycle_basis(int i, const std::vector<uint8_t>& open, int k) const;

    const Complex& X_;
    Fq F_;
    mutable std::vector<std::optional<SparseMatFq>> bmat_;
    mutable std::vector<std::optional<uint32_t>> bmat_rank_;
    mutable std::vector<std::optional<EliminationFront>> image_front_; // pivots of im d_{k+1}
};

// Fast giant-cycle rank for i = 1 on the torus: union-find over vertices with
// integer lift offsets; each non-tree open edge contributes the winding
// vector of its fundamental cycle, and the result is the F_q-rank of those
// vectors. Agrees with induced_summary(...).giant_cycles at k = 1.
int giant_rank_i1(const Complex& torus, const std::vector<uint8_t>& open_edges, const Fq& F);

} // namespace prcm

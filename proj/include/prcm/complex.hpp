#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "prcm/fq.hpp"
#include "prcm/linalg.hpp"

namespace prcm {

// An axis-aligned unit cube in Z^d or the N-periodic torus, identified by its
// base vertex and the set of axes it spans (bit j set = axis j). On the torus
// the base is kept reduced mod N.
struct CellId {
    std::vector<int32_t> base;
    uint32_t dirs = 0;

    int dim() const { return std::popcount(dirs); }
    bool operator==(const CellId&) const = default;
};

enum class BoundaryCondition { Free, Wired };

// A chain of cells of one dimension, stored sparsely as (cell index, F_q
// coefficient) pairs relative to a Complex.
struct Chain {
    int dim = 0;
    SparseVec v;
};

// Cell enumeration for tori T^d_N and boxes [lo, hi]^d in Z^d, with dense
// contiguous ids per dimension and O(1) id <-> CellId maps.
//
// A k-cell with direction set D has base coordinates ranging over the full
// period (torus) or over [lo_j, hi_j - 1] for j in D and [lo_j, hi_j]
// otherwise (box). Ids are ordered by direction mask, then by base in
// row-major order.
class Complex {
public:
    enum class Kind { Torus, Box };

    static Complex torus(int d, int N, int max_dim);
    static Complex box(int d, int n, int max_dim, BoundaryCondition bc);
    // Box with explicit per-axis vertex ranges, e.g. the unit square [0,1]^2.
    static Complex box_extents(std::vector<std::pair<int32_t, int32_t>> extents, int max_dim,
                               BoundaryCondition bc);

    Kind kind() const { return kind_; }
    bool is_torus() const { return kind_ == Kind::Torus; }
    int dimension() const { return d_; }
    int period() const { return N_; }
    int max_dim() const { return max_dim_; }
    BoundaryCondition boundary_condition() const { return bc_; }

    uint32_t cell_count(int k) const;
    CellId cell(int k, uint32_t id) const;
    uint32_t index_of(const CellId& c) const;

    // Signed boundary per the alternating-face formula; dimension-0 cells
    // have zero boundary. Coefficients are +-1 mapped into F_q.
    Chain boundary(const CellId& c, const Fq& F) const;
    Chain boundary(int k, uint32_t id, const Fq& F) const;

    // All (dim+1)-cells sigma such that `c` appears in the boundary of sigma,
    // with the sign it carries there.
    std::vector<std::pair<CellId, int>> coboundary_support(const CellId& c) const;

    // One column per k-cell, rows indexed by (k-1)-cells.
    SparseMatFq boundary_matrix(int k, const Fq& F) const;

    // Faces of a cell as (index, sign). Cheap accessor used by hot loops.
    void boundary_indices(int k, uint32_t id, std::vector<std::pair<uint32_t, int>>& out) const;
    // Cofaces of a k-cell as ((k+1)-cell index, sign).
    void coboundary_indices(int k, uint32_t id, std::vector<std::pair<uint32_t, int>>& out) const;

    // Torus duality: the (d-k)-cell paired with a k-cell. Involutive:
    // applying it twice is the identity.
    CellId dual_cell(const CellId& c) const;
    uint32_t dual_cell_index(int k, uint32_t id) const;

    // True when the cell has a vertex on the hull of the box (wired cells).
    bool touches_hull(const CellId& c) const;
    // Per-cell frozen mask at dimension k: wired boxes freeze hull cells open.
    std::vector<uint8_t> frozen_mask(int k) const;

    std::string describe() const;

    // {"base":[..],"dirs":[..]} with 1-based axis indices in dirs.
    static std::string cell_to_json(const CellId& c);
    static CellId cell_from_json(const std::string& text);

private:
    Complex() = default;
    void build_tables();
    int axis_extent_cells(int axis, bool spanned) const; // number of base values
    int axis_low(int axis) const;

    Kind kind_ = Kind::Torus;
    int d_ = 0;
    int N_ = 0; // torus period
    std::vector<std::pair<int32_t, int32_t>> extents_; // boxes
    int max_dim_ = 0;
    BoundaryCondition bc_ = BoundaryCondition::Free;

    // Per dimension: list of direction masks; per mask: id offset and
    // row-major strides over the base coordinates.
    struct MaskTable {
        uint32_t mask;
        uint32_t offset;
        std::vector<uint32_t> stride; // per axis
        std::vector<uint32_t> size;   // per axis
    };
    std::vector<std::vector<MaskTable>> tables_; // [k][mask rank]
    std::vector<std::vector<int32_t>> mask_slot_; // [k][mask] -> index into tables_[k]
    std::vector<uint32_t> counts_;
};

// Dual configuration on the torus: open (d-i)-cells are the duals of the
// closed i-cells. Self-inverse.
std::vector<uint8_t> dual_open_set(const Complex& ambient, int i,
                                   const std::vector<uint8_t>& open);

} // namespace prcm

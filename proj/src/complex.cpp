#include "prcm/complex.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace prcm {

namespace {
int32_t mod_reduce(int64_t v, int32_t N) {
    int64_t m = v % N;
    if (m < 0) m += N;
    return static_cast<int32_t>(m);
}
} // namespace

Complex Complex::torus(int d, int N, int max_dim) {
    if (d < 1) throw std::invalid_argument("torus dimension must be >= 1");
    if (N < 2) throw std::invalid_argument("torus period must be >= 2");
    if (max_dim < 0 || max_dim > d) throw std::invalid_argument("max_dim must be in [0, d]");
    Complex c;
    c.kind_ = Kind::Torus;
    c.d_ = d;
    c.N_ = N;
    c.max_dim_ = max_dim;
    c.build_tables();
    return c;
}

Complex Complex::box(int d, int n, int max_dim, BoundaryCondition bc) {
    if (n < 0) throw std::invalid_argument("box radius must be >= 0");
    std::vector<std::pair<int32_t, int32_t>> e(d, {-n, n});
    return box_extents(std::move(e), max_dim, bc);
}

Complex Complex::box_extents(std::vector<std::pair<int32_t, int32_t>> extents, int max_dim,
                             BoundaryCondition bc) {
    int d = static_cast<int>(extents.size());
    if (d < 1) throw std::invalid_argument("box dimension must be >= 1");
    if (max_dim < 0 || max_dim > d) throw std::invalid_argument("max_dim must be in [0, d]");
    for (auto& [lo, hi] : extents)
        if (hi < lo) throw std::invalid_argument("box extent must be nonempty");
    Complex c;
    c.kind_ = Kind::Box;
    c.d_ = d;
    c.extents_ = std::move(extents);
    c.max_dim_ = max_dim;
    c.bc_ = bc;
    c.build_tables();
    return c;
}

int Complex::axis_extent_cells(int axis, bool spanned) const {
    if (kind_ == Kind::Torus) return N_;
    auto [lo, hi] = extents_[axis];
    return spanned ? hi - lo : hi - lo + 1;
}

int Complex::axis_low(int axis) const {
    return kind_ == Kind::Torus ? 0 : extents_[axis].first;
}

void Complex::build_tables() {
    tables_.assign(max_dim_ + 1, {});
    mask_slot_.assign(max_dim_ + 1, std::vector<int32_t>(1u << d_, -1));
    counts_.assign(max_dim_ + 1, 0);
    for (uint32_t mask = 0; mask < (1u << d_); ++mask) {
        int k = std::popcount(mask);
        if (k > max_dim_) continue;
        MaskTable t;
        t.mask = mask;
        t.offset = counts_[k];
        t.stride.resize(d_);
        t.size.resize(d_);
        uint32_t s = 1;
        for (int axis = d_ - 1; axis >= 0; --axis) {
            t.size[axis] = axis_extent_cells(axis, mask & (1u << axis));
            t.stride[axis] = s;
            s *= t.size[axis];
        }
        counts_[k] += s;
        mask_slot_[k][mask] = static_cast<int32_t>(tables_[k].size());
        tables_[k].push_back(std::move(t));
    }
}

uint32_t Complex::cell_count(int k) const {
    if (k < 0 || k > max_dim_) return 0;
    return counts_[k];
}

CellId Complex::cell(int k, uint32_t id) const {
    for (const auto& t : tables_[k]) {
        uint32_t span = t.stride[0] * t.size[0];
        if (id < t.offset || id >= t.offset + span) continue;
        uint32_t rem = id - t.offset;
        CellId c;
        c.dirs = t.mask;
        c.base.resize(d_);
        for (int axis = 0; axis < d_; ++axis) {
            c.base[axis] = static_cast<int32_t>(rem / t.stride[axis]) + axis_low(axis);
            rem %= t.stride[axis];
        }
        return c;
    }
    throw std::out_of_range("cell id out of range");
}

uint32_t Complex::index_of(const CellId& c) const {
    int k = c.dim();
    int32_t slot = mask_slot_[k][c.dirs];
    if (slot < 0) throw std::out_of_range("direction mask not enumerated");
    const auto& t = tables_[k][slot];
    uint32_t id = t.offset;
    for (int axis = 0; axis < d_; ++axis) {
        int32_t v = c.base[axis];
        if (kind_ == Kind::Torus)
            v = mod_reduce(v, N_);
        else
            v -= extents_[axis].first;
        if (v < 0 || v >= static_cast<int32_t>(t.size[axis]))
            throw std::out_of_range("cell base outside complex");
        id += static_cast<uint32_t>(v) * t.stride[axis];
    }
    return id;
}

Chain Complex::boundary(const CellId& c, const Fq& F) const {
    int k = c.dim();
    Chain out;
    out.dim = k - 1;
    if (k == 0) {
        out.dim = 0;
        return out;
    }
    // The 2k faces of a k-cell are pairwise distinct for N >= 2, so they can
    // be collected and sorted without merging.
    std::vector<std::pair<uint32_t, int>> faces;
    boundary_indices(k, index_of(c), faces);
    std::sort(faces.begin(), faces.end());
    for (const auto& [idx, s] : faces) out.v.nz.emplace_back(idx, F.from_int(s));
    return out;
}

Chain Complex::boundary(int k, uint32_t id, const Fq& F) const {
    return boundary(cell(k, id), F);
}

void Complex::boundary_indices(int k, uint32_t id,
                               std::vector<std::pair<uint32_t, int>>& out) const {
    out.clear();
    CellId c = cell(k, id);
    int l = 0;
    for (int axis = 0; axis < d_; ++axis) {
        if (!(c.dirs & (1u << axis))) continue;
        ++l;
        int sign = (l % 2 == 1) ? 1 : -1;
        CellId front = c;
        front.dirs &= ~(1u << axis);
        front.base[axis] += 1;
        if (kind_ == Kind::Torus) front.base[axis] = mod_reduce(front.base[axis], N_);
        CellId back = c;
        back.dirs &= ~(1u << axis);
        out.emplace_back(index_of(front), sign);
        out.emplace_back(index_of(back), -sign);
    }
}

std::vector<std::pair<CellId, int>> Complex::coboundary_support(const CellId& c) const {
    std::vector<std::pair<CellId, int>> out;
    int k = c.dim();
    if (k >= max_dim_) return out;
    for (int axis = 0; axis < d_; ++axis) {
        if (c.dirs & (1u << axis)) continue;
        // Position of `axis` among the spanned axes of the coface (1-based).
        int l = std::popcount(static_cast<uint32_t>(c.dirs & ((1u << axis) - 1))) + 1;
        int sign = (l % 2 == 1) ? 1 : -1;
        // Coface with this cell as its back face in `axis`.
        CellId up = c;
        up.dirs |= (1u << axis);
        bool up_ok = true;
        if (kind_ == Kind::Box && up.base[axis] + 1 > extents_[axis].second) up_ok = false;
        if (up_ok) out.emplace_back(up, -sign);
        // Coface with this cell as its front face in `axis`.
        CellId down = c;
        down.dirs |= (1u << axis);
        down.base[axis] -= 1;
        bool down_ok = true;
        if (kind_ == Kind::Torus)
            down.base[axis] = mod_reduce(down.base[axis], N_);
        else if (down.base[axis] < extents_[axis].first)
            down_ok = false;
        if (down_ok) out.emplace_back(down, sign);
    }
    return out;
}

void Complex::coboundary_indices(int k, uint32_t id,
                                 std::vector<std::pair<uint32_t, int>>& out) const {
    out.clear();
    for (const auto& [coface, sign] : coboundary_support(cell(k, id)))
        out.emplace_back(index_of(coface), sign);
}

SparseMatFq Complex::boundary_matrix(int k, const Fq& F) const {
    if (k < 1 || k > max_dim_) throw std::invalid_argument("boundary_matrix: bad dimension");
    SparseMatFq A(cell_count(k - 1), cell_count(k));
    std::vector<std::pair<uint32_t, int>> faces;
    for (uint32_t id = 0; id < cell_count(k); ++id) {
        boundary_indices(k, id, faces);
        std::sort(faces.begin(), faces.end());
        for (const auto& [r, s] : faces) A.col[id].nz.emplace_back(r, F.from_int(s));
    }
    return A;
}

CellId Complex::dual_cell(const CellId& c) const {
    if (kind_ != Kind::Torus)
        throw std::invalid_argument("dual cells are defined on the torus only");
    CellId dual;
    dual.dirs = ~c.dirs & ((1u << d_) - 1);
    dual.base.resize(d_);
    for (int axis = 0; axis < d_; ++axis) dual.base[axis] = mod_reduce(-c.base[axis], N_);
    return dual;
}

uint32_t Complex::dual_cell_index(int k, uint32_t id) const {
    return index_of(dual_cell(cell(k, id)));
}

bool Complex::touches_hull(const CellId& c) const {
    if (kind_ != Kind::Box) return false;
    // A vertex of the closure has coordinate base[j] or base[j]+1 (spanned
    // axes); the cell touches the hull if any such coordinate is extremal.
    for (int axis = 0; axis < d_; ++axis) {
        auto [lo, hi] = extents_[axis];
        int32_t top = c.base[axis] + ((c.dirs >> axis) & 1u);
        if (c.base[axis] == lo || top == hi) return true;
    }
    return false;
}

std::vector<uint8_t> Complex::frozen_mask(int k) const {
    std::vector<uint8_t> mask(cell_count(k), 0);
    if (kind_ != Kind::Box || bc_ != BoundaryCondition::Wired) return mask;
    for (uint32_t id = 0; id < cell_count(k); ++id)
        if (touches_hull(cell(k, id))) mask[id] = 1;
    return mask;
}

std::string Complex::describe() const {
    std::ostringstream os;
    if (kind_ == Kind::Torus) {
        os << "torus(d=" << d_ << ",N=" << N_ << ",max_dim=" << max_dim_ << ")";
    } else {
        os << "box(d=" << d_ << ",extents=";
        for (int a = 0; a < d_; ++a)
            os << (a ? "x" : "") << "[" << extents_[a].first << "," << extents_[a].second << "]";
        os << ",max_dim=" << max_dim_
           << (bc_ == BoundaryCondition::Wired ? ",wired" : ",free") << ")";
    }
    return os.str();
}

std::string Complex::cell_to_json(const CellId& c) {
    std::ostringstream os;
    os << "{\"base\":[";
    for (size_t a = 0; a < c.base.size(); ++a) os << (a ? "," : "") << c.base[a];
    os << "],\"dirs\":[";
    bool first = true;
    for (size_t a = 0; a < c.base.size(); ++a)
        if (c.dirs & (1u << a)) {
            os << (first ? "" : ",") << (a + 1);
            first = false;
        }
    os << "]}";
    return os.str();
}

CellId Complex::cell_from_json(const std::string& text) {
    CellId c;
    auto read_list = [&](const std::string& key) {
        std::vector<int32_t> out;
        size_t k = text.find("\"" + key + "\"");
        if (k == std::string::npos) throw std::invalid_argument("cell json missing " + key);
        size_t lb = text.find('[', k);
        size_t rb = text.find(']', lb);
        std::string body = text.substr(lb + 1, rb - lb - 1);
        std::stringstream ss(body);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) out.push_back(static_cast<int32_t>(std::stol(tok)));
        return out;
    };
    c.base = read_list("base");
    for (int32_t axis : read_list("dirs")) {
        if (axis < 1 || axis > static_cast<int32_t>(c.base.size()))
            throw std::invalid_argument("cell json axis out of range");
        c.dirs |= 1u << (axis - 1);
    }
    return c;
}

std::vector<uint8_t> dual_open_set(const Complex& ambient, int i,
                                   const std::vector<uint8_t>& open) {
    int d = ambient.dimension();
    std::vector<uint8_t> dual(ambient.cell_count(d - i), 0);
    for (uint32_t id = 0; id < open.size(); ++id)
        if (!open[id]) dual[ambient.dual_cell_index(i, id)] = 1;
    return dual;
}

} // namespace prcm

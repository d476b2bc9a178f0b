#include "prcm/pltg.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace prcm {

uint32_t coboundary_value(const Complex& X, int i, const SpinCochain& f, uint32_t plaq,
                          const Fq& F) {
    std::vector<std::pair<uint32_t, int>> faces;
    X.boundary_indices(i, plaq, faces);
    uint32_t v = 0;
    for (const auto& [cell, sign] : faces) {
        uint32_t term = F.mul(F.from_int(sign), f.values[cell]);
        v = F.add(v, term);
    }
    return v;
}

long hamiltonian(const Complex& X, int i, const SpinCochain& f, const Fq& F) {
    long satisfied = 0;
    for (uint32_t p = 0; p < X.cell_count(i); ++p)
        if (coboundary_value(X, i, f, p, F) == 0) ++satisfied;
    return -satisfied;
}

ExactGibbs ExactGibbs::enumerate(const Complex& X, int i, double beta, uint32_t q) {
    ExactGibbs out;
    out.q_ = q;
    out.n_cells_ = X.cell_count(i - 1);
    double states = std::pow(static_cast<double>(q), static_cast<double>(out.n_cells_));
    if (states > kMaxStates) throw std::invalid_argument("spin space too large to enumerate");
    uint64_t n = static_cast<uint64_t>(states + 0.5);
    Fq F(q);
    out.prob_.assign(n, 0.0);
    SpinCochain f;
    f.values.assign(out.n_cells_, 0);
    std::vector<long double> acc(n);
    long double Z = 0;
    for (uint64_t s = 0; s < n; ++s) {
        uint64_t rem = s;
        for (uint32_t c = 0; c < out.n_cells_; ++c) {
            f.values[c] = static_cast<uint32_t>(rem % q);
            rem /= q;
        }
        long double w = std::exp(-static_cast<long double>(beta) *
                                 static_cast<long double>(hamiltonian(X, i, f, F)));
        acc[s] = w;
        Z += w;
    }
    for (uint64_t s = 0; s < n; ++s) out.prob_[s] = static_cast<double>(acc[s] / Z);
    out.Z_ = static_cast<double>(Z);
    return out;
}

SpinCochain ExactGibbs::decode(uint64_t state) const {
    SpinCochain f;
    f.values.assign(n_cells_, 0);
    for (uint32_t c = 0; c < n_cells_; ++c) {
        f.values[c] = static_cast<uint32_t>(state % q_);
        state /= q_;
    }
    return f;
}

uint64_t ExactGibbs::encode(const SpinCochain& f) const {
    uint64_t s = 0;
    for (uint32_t c = n_cells_; c-- > 0;) s = s * q_ + f.values[c];
    return s;
}

PlaquetteConfig couple_sample(const Complex& X, int i, const SpinCochain& f, double p,
                              const Fq& F, Rng& rng) {
    PlaquetteConfig cfg = PlaquetteConfig::initial(X, i);
    for (uint32_t pq = 0; pq < cfg.open.size(); ++pq) {
        bool satisfied = coboundary_value(X, i, f, pq, F) == 0;
        cfg.open[pq] = satisfied && rng.bernoulli(p);
    }
    cfg.enforce_frozen();
    return cfg;
}

SpinCochain couple_cocycle(const Complex& X, int i, const std::vector<uint8_t>& open,
                           const Fq& F, Rng& rng) {
    uint32_t n = X.cell_count(i - 1);
    SpinCochain f;
    f.values.assign(n, 0);
    if (i == 1) {
        // Cochains vanishing on open-edge boundaries = constant per component:
        // one uniform value per open component.
        uint32_t nv = X.cell_count(0);
        std::vector<uint32_t> parent(nv);
        std::iota(parent.begin(), parent.end(), 0);
        std::vector<uint8_t> rank(nv, 0);
        std::vector<std::pair<uint32_t, int>> faces;
        auto find = [&](uint32_t v) {
            while (parent[v] != v) {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            return v;
        };
        for (uint32_t e = 0; e < open.size(); ++e) {
            if (!open[e]) continue;
            X.boundary_indices(1, e, faces);
            uint32_t a = find(faces[0].first), b = find(faces[1].first);
            if (a == b) continue;
            if (rank[a] < rank[b]) std::swap(a, b);
            parent[b] = a;
            if (rank[a] == rank[b]) ++rank[a];
        }
        std::vector<uint32_t> value(nv, 0);
        std::vector<uint8_t> assigned(nv, 0);
        for (uint32_t v = 0; v < nv; ++v) {
            uint32_t r = find(v);
            if (!assigned[r]) {
                value[r] = static_cast<uint32_t>(rng.below(F.modulus()));
                assigned[r] = 1;
            }
            f.values[v] = value[r];
        }
        return f;
    }
    // Generic: uniform element of the kernel of the open-restricted
    // coboundary, via the deterministic kernel basis.
    SparseMatFq A(0, n);
    std::vector<std::pair<uint32_t, int>> faces;
    for (uint32_t p = 0; p < open.size(); ++p) {
        if (!open[p]) continue;
        X.boundary_indices(i, p, faces);
        uint32_t row = A.rows++;
        for (const auto& [cell, sign] : faces) A.set(row, cell, F.from_int(sign));
    }
    std::vector<SparseVec> basis = kernel_basis(F, A);
    for (const auto& g : basis) {
        uint32_t coeff = static_cast<uint32_t>(rng.below(F.modulus()));
        if (coeff == 0) continue;
        for (const auto& [cell, v] : g.nz) f.values[cell] = F.add(f.values[cell], F.mul(coeff, v));
    }
    return f;
}

SwChain::SwChain(const Complex& X, int i, double p, uint32_t q, uint64_t seed, uint64_t stream)
    : X_(X), i_(i), p_(p), F_(q), rng_(seed, stream) {
    f_.values.assign(X.cell_count(i - 1), 0);
    last_open_.assign(X.cell_count(i), 0);
    for (uint8_t fr : X.frozen_mask(i))
        if (fr) throw std::invalid_argument("cluster updates need an unfrozen complex");
}

void SwChain::step() {
    // Percolate on satisfied plaquettes, then redraw spins uniformly among
    // the cochains compatible with the opened set.
    last_open_ = couple_sample(X_, i_, f_, p_, F_, rng_).open;
    f_ = couple_cocycle(X_, i_, last_open_, F_, rng_);
}

PltgGlauberChain::PltgGlauberChain(const Complex& X, int i, double beta, uint32_t q,
                                   uint64_t seed, uint64_t stream)
    : X_(X), i_(i), beta_(beta), F_(q), rng_(seed, stream) {
    uint32_t n = X.cell_count(i - 1);
    f_.values.assign(n, 0);
    cofaces_.resize(n);
    std::vector<std::pair<uint32_t, int>> tmp;
    for (uint32_t c = 0; c < n; ++c) {
        X.coboundary_indices(i - 1, c, tmp);
        cofaces_[c] = tmp;
    }
    faces_.resize(X.cell_count(i));
    for (uint32_t p = 0; p < faces_.size(); ++p) {
        X.boundary_indices(i, p, tmp);
        faces_[p] = tmp;
    }
}

void PltgGlauberChain::sweep() {
    uint32_t q = F_.modulus();
    std::vector<double> w(q);
    for (uint32_t c = 0; c < f_.values.size(); ++c) {
        // Conditional of the spin at c: weight e^{beta * #satisfied cofaces}
        // for each candidate value. Only the cofaces of c change.
        for (uint32_t v = 0; v < q; ++v) w[v] = 0;
        for (const auto& [plaq, sign] : cofaces_[c]) {
            // delta f(plaq) = s * f(c) + rest
            uint32_t rest = 0;
            for (const auto& [cell, fs] : faces_[plaq])
                if (cell != c) rest = F_.add(rest, F_.mul(F_.from_int(fs), f_.values[cell]));
            uint32_t s = F_.from_int(sign);
            // satisfied iff f(c) = -rest / s
            uint32_t sat_value = F_.mul(F_.neg(rest), F_.inv(s));
            w[sat_value] += 1.0;
        }
        double total = 0;
        for (uint32_t v = 0; v < q; ++v) {
            w[v] = std::exp(beta_ * w[v]);
            total += w[v];
        }
        double u = rng_.uniform() * total;
        uint32_t pick = q - 1;
        for (uint32_t v = 0; v < q; ++v) {
            if (u < w[v]) {
                pick = v;
                break;
            }
            u -= w[v];
        }
        f_.values[c] = pick;
    }
}

uint32_t wilson_value(const SpinCochain& f, const Chain& gamma, const Fq& F) {
    uint32_t v = 0;
    for (const auto& [cell, coeff] : gamma.v.nz) v = F.add(v, F.mul(coeff, f.values[cell]));
    return v;
}

std::complex<double> root_of_unity(uint32_t value, uint32_t q) {
    double angle = 2.0 * M_PI * static_cast<double>(value) / static_cast<double>(q);
    return {std::cos(angle), std::sin(angle)};
}

std::vector<uint32_t> loop_disk_cells(const Complex& X, int i, const LoopSpec& loop) {
    if (static_cast<int>(loop.axes.size()) != i || static_cast<int>(loop.dims.size()) != i)
        throw std::invalid_argument("loop spec needs i axes and i dims");
    uint32_t dirs = 0;
    for (int a : loop.axes) dirs |= 1u << a;
    std::vector<uint32_t> cells;
    std::vector<int> idx(i, 0);
    while (true) {
        CellId c;
        c.dirs = dirs;
        c.base.assign(loop.corner.begin(), loop.corner.end());
        for (int j = 0; j < i; ++j) c.base[loop.axes[j]] += idx[j];
        cells.push_back(X.index_of(c));
        int j = i - 1;
        while (j >= 0 && ++idx[j] >= loop.dims[j]) idx[j--] = 0;
        if (j < 0) break;
    }
    return cells;
}

Chain loop_boundary_cycle(const Complex& X, int i, const LoopSpec& loop, const Fq& F) {
    SparseVec disk;
    for (uint32_t id : loop_disk_cells(X, i, loop)) disk.nz.emplace_back(id, 1);
    std::sort(disk.nz.begin(), disk.nz.end());
    Chain gamma;
    gamma.dim = i - 1;
    gamma.v = X.boundary_matrix(i, F).mul_vec(F, disk);
    return gamma;
}

uint64_t loop_area(const LoopSpec& loop) {
    uint64_t a = 1;
    for (int n : loop.dims) a *= static_cast<uint64_t>(n);
    return a;
}

uint64_t loop_perimeter(const Complex& X, int i, const LoopSpec& loop) {
    // Support size over F_3 so the +-1 coefficients cannot cancel mod 2.
    Fq F3(3);
    return loop_boundary_cycle(X, i, loop, F3).v.nz.size();
}

Chain axis_cycle(const Complex& torus, const std::vector<int>& axes,
                 const std::vector<int32_t>& through, const Fq&) {
    if (!torus.is_torus()) throw std::invalid_argument("axis cycles live on the torus");
    int N = torus.period();
    int k = static_cast<int>(axes.size());
    uint32_t dirs = 0;
    for (int a : axes) dirs |= 1u << a;
    SparseVec cells;
    std::vector<int> idx(k, 0);
    while (true) {
        CellId c;
        c.dirs = dirs;
        c.base.assign(through.begin(), through.end());
        for (int j = 0; j < k; ++j) c.base[axes[j]] = idx[j];
        cells.nz.emplace_back(torus.index_of(c), 1);
        int j = k - 1;
        while (j >= 0 && ++idx[j] >= N) idx[j--] = 0;
        if (j < 0) break;
    }
    std::sort(cells.nz.begin(), cells.nz.end());
    Chain gamma;
    gamma.dim = k;
    gamma.v = cells;
    return gamma;
}

namespace {

// Iterate all spin states of a tiny complex in ExactGibbs order.
template <typename Fn>
void for_each_spin_state(uint32_t n_cells, uint32_t q, Fn&& fn) {
    double states = std::pow(static_cast<double>(q), static_cast<double>(n_cells));
    if (states > ExactGibbs::kMaxStates)
        throw std::invalid_argument("spin space too large to enumerate");
    uint64_t n = static_cast<uint64_t>(states + 0.5);
    SpinCochain f;
    f.values.assign(n_cells, 0);
    for (uint64_t s = 0; s < n; ++s) {
        uint64_t rem = s;
        for (uint32_t c = 0; c < n_cells; ++c) {
            f.values[c] = static_cast<uint32_t>(rem % q);
            rem /= q;
        }
        fn(s, f);
    }
}

} // namespace

CouplingTables enumerate_coupling(const Complex& X, int i, uint32_t q, double beta) {
    Fq F(q);
    double p = 1.0 - std::exp(-beta);
    uint32_t n_spins = X.cell_count(i - 1);
    uint32_t n_plaq = X.cell_count(i);
    if (n_plaq > 20) throw std::invalid_argument("plaquette space too large to enumerate");

    CouplingTables out;
    double spin_states = std::pow(static_cast<double>(q), static_cast<double>(n_spins));
    uint64_t n_spin_states = static_cast<uint64_t>(spin_states + 0.5);
    std::vector<long double> spin_acc(n_spin_states, 0.0L);
    std::vector<long double> plaq_acc(1ull << n_plaq, 0.0L);

    // kappa(f, omega) = prod_sigma [(1-p) closed + p open * satisfied]:
    // nonzero only for omega within the satisfied set of f, with weight
    // p^eta (1-p)^(M-eta).
    std::vector<long double> open_w(n_plaq + 1);
    for (uint32_t k = 0; k <= n_plaq; ++k)
        open_w[k] = std::pow(static_cast<long double>(p), k) *
                    std::pow(1.0L - static_cast<long double>(p), n_plaq - k);
    long double total = 0;
    for_each_spin_state(n_spins, q, [&](uint64_t s, const SpinCochain& f) {
        uint32_t sat = 0;
        for (uint32_t pq = 0; pq < n_plaq; ++pq)
            if (coboundary_value(X, i, f, pq, F) == 0) sat |= 1u << pq;
        // every omega that is a subset of the satisfied plaquettes
        uint32_t omega = sat;
        while (true) {
            long double w = open_w[std::popcount(omega)];
            spin_acc[s] += w;
            plaq_acc[omega] += w;
            total += w;
            if (omega == 0) break;
            omega = (omega - 1) & sat;
        }
    });
    out.spin_marginal.resize(spin_acc.size());
    out.plaquette_marginal.resize(plaq_acc.size());
    for (size_t j = 0; j < spin_acc.size(); ++j)
        out.spin_marginal[j] = static_cast<double>(spin_acc[j] / total);
    for (size_t j = 0; j < plaq_acc.size(); ++j)
        out.plaquette_marginal[j] = static_cast<double>(plaq_acc[j] / total);

    ExactGibbs gibbs = ExactGibbs::enumerate(X, i, beta, q);
    for (uint64_t s = 0; s < gibbs.size(); ++s)
        out.tv_spin_vs_gibbs += std::abs(out.spin_marginal[s] - gibbs.prob(s));
    out.tv_spin_vs_gibbs /= 2;

    HomologyContext H(X, q);
    RcmParams params;
    params.p = p;
    params.q = static_cast<double>(q);
    params.q_field = q;
    params.i = i;
    std::vector<uint8_t> no_frozen(n_plaq, 0);
    ExactRcm rcm = ExactRcm::enumerate(H, params, no_frozen);
    for (uint64_t m = 0; m < rcm.size(); ++m)
        out.tv_plaquette_vs_rcm += std::abs(out.plaquette_marginal[m] - rcm.prob(m));
    out.tv_plaquette_vs_rcm /= 2;
    return out;
}

WilsonExact wilson_exact(const Complex& X, int i, uint32_t q, double beta, const Chain& gamma) {
    Fq F(q);
    double p = 1.0 - std::exp(-beta);
    uint32_t n_spins = X.cell_count(i - 1);
    uint32_t n_plaq = X.cell_count(i);
    if (n_plaq > 20) throw std::invalid_argument("plaquette space too large to enumerate");

    // Null-homology of gamma per plaquette configuration.
    HomologyContext H(X, q);
    std::vector<uint8_t> v_holds(1ull << n_plaq, 0);
    std::vector<uint8_t> open(n_plaq, 0);
    for (uint64_t m = 0; m < v_holds.size(); ++m) {
        for (uint32_t b = 0; b < n_plaq; ++b) open[b] = static_cast<uint8_t>((m >> b) & 1ull);
        v_holds[m] = H.is_null_homologous(gamma, i, open);
    }

    std::vector<long double> open_w(n_plaq + 1);
    for (uint32_t k = 0; k <= n_plaq; ++k)
        open_w[k] = std::pow(static_cast<long double>(p), k) *
                    std::pow(1.0L - static_cast<long double>(p), n_plaq - k);

    WilsonExact out;
    long double total = 0, p_v = 0;
    std::complex<long double> ew = 0, ew_given_v = 0;
    std::vector<long double> w_dist_given_not_v(q, 0.0L);
    long double w_equals_one = 0;
    for_each_spin_state(n_spins, q, [&](uint64_t, const SpinCochain& f) {
        uint32_t sat = 0;
        for (uint32_t pq = 0; pq < n_plaq; ++pq)
            if (coboundary_value(X, i, f, pq, F) == 0) sat |= 1u << pq;
        uint32_t wval = wilson_value(f, gamma, F);
        std::complex<double> zd = root_of_unity(wval, q);
        std::complex<long double> wphase(zd.real(), zd.imag());
        uint32_t omega = sat;
        while (true) {
            long double w = open_w[std::popcount(omega)];
            total += w;
            ew += w * wphase;
            if (wval == 0) w_equals_one += w;
            if (v_holds[omega]) {
                p_v += w;
                ew_given_v += w * wphase;
            } else {
                w_dist_given_not_v[wval] += w;
            }
            if (omega == 0) break;
            omega = (omega - 1) & sat;
        }
    });
    out.expectation = {static_cast<double>((ew / total).real()),
                       static_cast<double>((ew / total).imag())};
    out.v_probability = static_cast<double>(p_v / total);
    out.conditional_given_v =
        (p_v > 0) ? static_cast<double>((ew_given_v / p_v).real()) : 1.0;
    long double not_v = total - p_v;
    out.max_conditional_dev = 0;
    if (not_v > 0)
        for (uint32_t v = 0; v < q; ++v)
            out.max_conditional_dev =
                std::max(out.max_conditional_dev,
                         static_cast<double>(std::abs(w_dist_given_not_v[v] / not_v -
                                                      1.0L / static_cast<long double>(q))));
    out.two_point = static_cast<double>(w_equals_one / total - 1.0L / q);
    return out;
}

} // namespace prcm

#include "prcm/verify.hpp"

#include <cmath>
#include <sstream>

#include "prcm/duality.hpp"
#include "prcm/pltg.hpp"
#include "prcm/rng.hpp"
#include "prcm/sampler.hpp"

namespace prcm {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

void push(std::vector<CheckResult>& out, const std::string& name, double value, double tol,
          const std::string& detail = "") {
    out.push_back({name, value <= tol, value, tol, detail});
}

void push_flag(std::vector<CheckResult>& out, const std::string& name, bool ok,
               const std::string& detail = "") {
    out.push_back({name, ok, ok ? 0.0 : 1.0, 0.5, detail});
}

Complex unit_square() {
    return Complex::box_extents({{0, 1}, {0, 1}}, 2, BoundaryCondition::Free);
}

void duality_checks(const VerifyOptions& opt, std::vector<CheckResult>& out, bool partition) {
    for (double q : {1.0, 2.0, 3.0}) {
        for (double p : {0.3, self_dual_p(q), 0.7}) {
            uint32_t q_field = q == 1.0 ? 2 : static_cast<uint32_t>(q);
            DualityReport rep =
                verify_duality(2, 2, 1, q, p, q_field, opt.inject_weight_error);
            std::string inst = "q=" + fmt(q) + ",p=" + fmt(p);
            if (!partition)
                push(out, "duality-tv(" + inst + ")", rep.total_variation, 1e-12);
            else
                push(out, "partition-identity(" + inst + ")", rep.partition_rel_err, 1e-10,
                     "c=" + std::to_string(rep.eta_offset));
        }
    }
}

void balanced_density_checks(std::vector<CheckResult>& out) {
    // Balanced and unbalanced measures must have density ratios within
    // [q^{-C(d,i)/2}, q^{C(d,i)/2}].
    Complex T = Complex::torus(2, 2, 2);
    HomologyContext H(T, 2);
    RcmParams a;
    a.p = 0.4;
    a.q = 2.0;
    a.q_field = 2;
    a.i = 1;
    RcmParams b = a;
    b.balanced = true;
    ExactRcm ua = ExactRcm::enumerate(H, a);
    ExactRcm ub = ExactRcm::enumerate(H, b);
    double bound = std::pow(a.q, binomial(2, 1) / 2.0);
    double worst = 0;
    for (uint64_t m = 0; m < ua.size(); ++m) {
        double ratio = ua.prob(m) / ub.prob(m);
        worst = std::max({worst, ratio / bound, 1.0 / (ratio * bound)});
    }
    push(out, "balanced-density-bounds", worst, 1.0 + 1e-12);
}

void alexander_checks(const VerifyOptions& opt, std::vector<CheckResult>& out) {
    Rng rng(opt.seed, 17);
    for (uint32_t q : {2u, 3u}) {
        struct Inst {
            int d, N, i;
        };
        for (Inst inst : {Inst{2, 4, 1}, Inst{4, 2, 2}}) {
            Complex T = Complex::torus(inst.d, inst.N, inst.d);
            HomologyContext H(T, q);
            int c_ref = H.betti_eta_offset(inst.i);
            bool ok = true;
            for (int t = 0; t < opt.alexander_configs && ok; ++t) {
                std::vector<uint8_t> open(T.cell_count(inst.i));
                double density = rng.uniform();
                int eta = 0;
                for (auto& bit : open) {
                    bit = rng.bernoulli(density);
                    eta += bit;
                }
                ok = ok && H.alexander_check(inst.i, open).all_ok();
                ok = ok && H.euler_poincare_check(inst.i, open);
                ok = ok &&
                     (H.betti(inst.i, open, inst.i) - H.betti(inst.i, open, inst.i - 1) - eta ==
                      c_ref);
            }
            push_flag(out,
                      "alexander-euler(d=" + std::to_string(inst.d) +
                          ",i=" + std::to_string(inst.i) + ",q=" + std::to_string(q) + ")",
                      ok, std::to_string(opt.alexander_configs) + " configs");
        }
    }
}

void coupling_checks(const VerifyOptions&, std::vector<CheckResult>& out) {
    for (uint32_t q : {2u, 3u}) {
        for (double beta : {0.5, 1.0}) {
            std::string inst = "q=" + std::to_string(q) + ",beta=" + fmt(beta);
            CouplingTables sq = enumerate_coupling(unit_square(), 2, q, beta);
            push(out, "coupling-spin-marginal(square," + inst + ")", sq.tv_spin_vs_gibbs,
                 1e-12);
            push(out, "coupling-plaquette-marginal(square," + inst + ")",
                 sq.tv_plaquette_vs_rcm, 1e-12);

            Complex box = Complex::box(2, 1, 2, BoundaryCondition::Free);
            CouplingTables bx = enumerate_coupling(box, 1, q, beta);
            push(out, "coupling-spin-marginal(box," + inst + ")", bx.tv_spin_vs_gibbs, 1e-12);
            push(out, "coupling-plaquette-marginal(box," + inst + ")", bx.tv_plaquette_vs_rcm,
                 1e-12);
        }
    }
}

void sw_checks(const VerifyOptions&, std::vector<CheckResult>& out) {
    for (uint32_t q : {2u, 3u}) {
        StationarityReport rep = sw_stationarity_check(unit_square(), 2, q, 1.0);
        push(out, "sw-stationarity(q=" + std::to_string(q) + ")", rep.stationarity_residual,
             1e-10);
        push(out, "sw-detailed-balance(q=" + std::to_string(q) + ")",
             rep.detailed_balance_residual, 1e-10);
    }
}

void glauber_checks_fn(const VerifyOptions& opt, std::vector<CheckResult>& out) {
    RcmParams params;
    params.p = 0.4;
    params.q = 2.0;
    params.q_field = 2;
    params.i = 1;
    StationarityReport rep = glauber_stationarity_check(unit_square(), params);
    push(out, "glauber-stationarity", rep.stationarity_residual, 1e-10);
    push(out, "glauber-detailed-balance", rep.detailed_balance_residual, 1e-10);

    // Exact conditionals against enumeration on the 2-torus.
    Complex T = Complex::torus(2, 2, 2);
    HomologyContext H(T, 2);
    ExactRcm model = ExactRcm::enumerate(H, params);
    Rng rng(opt.seed, 23);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        uint64_t mask = rng.next() & (model.size() - 1);
        uint32_t bit = static_cast<uint32_t>(rng.below(model.n_free()));
        PlaquetteConfig cfg = model.config_of(mask);
        double exact = model.conditional_open(mask, bit);
        double formula =
            conditional_open_probability(H, cfg, model.free_cell(bit), params);
        worst = std::max(worst, std::abs(exact - formula));
    }
    push(out, "conditional-open-probability", worst, 1e-12);
}

void homology_oracle_checks(const VerifyOptions& opt, std::vector<CheckResult>& out) {
    // Klein bottle torsion.
    Fq F2(2), F3(3);
    BoundaryMatrices K;
    K.d.resize(3);
    K.d[1] = SparseMatFq(1, 2);
    K.d[2] = SparseMatFq(2, 1);
    K.d[2].set(0, 0, 2 % 2);
    bool klein = betti(F2, K, 2) == 1 && betti(F2, K, 1) == 2;
    K.d[2] = SparseMatFq(2, 1);
    K.d[2].set(0, 0, 2 % 3);
    klein = klein && betti(F3, K, 2) == 0 && betti(F3, K, 1) == 1;
    push_flag(out, "klein-bottle-torsion", klein);

    // Sparse rank against dense elimination on random plaquette complexes.
    Rng rng(opt.seed, 29);
    bool ok = true;
    int done = 0;
    while (done < opt.homology_trials && ok) {
        for (uint32_t q : {2u, 3u, 5u}) {
            Fq F(q);
            int d = 2 + static_cast<int>(rng.below(2));
            int N = 2 + static_cast<int>(rng.below(2));
            int i = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(d - 1)));
            Complex T = Complex::torus(d, N, i);
            if (T.cell_count(i) + T.cell_count(i - 1) > 200) continue;
            SparseMatFq A = T.boundary_matrix(i, F);
            SparseMatFq sub(A.rows, 0);
            double density = rng.uniform();
            for (uint32_t c = 0; c < A.cols; ++c)
                if (rng.bernoulli(density)) {
                    sub.col.push_back(A.col[c]);
                    ++sub.cols;
                }
            ok = ok && (rank(F, sub) == dense_rank(F, sub));
            ++done;
        }
    }
    push_flag(out, "rank-vs-dense-oracle", ok, std::to_string(done) + " complexes");
}

void fkg_checks(const VerifyOptions& opt, std::vector<CheckResult>& out) {
    Complex T = Complex::torus(2, 2, 2);
    HomologyContext H(T, 2);
    for (double p : {0.3, 0.7}) {
        RcmParams params;
        params.p = p;
        params.q = 2.0;
        params.q_field = 2;
        params.i = 1;
        FkgReport rep = fkg_probe(H, params, 200, opt.seed);
        push(out, "fkg-pairs(p=" + fmt(p) + ")", -rep.min_pair_slack, 1e-12);
        push(out, "fkg-lattice(p=" + fmt(p) + ")", -rep.min_lattice_slack, 1e-12);
    }
    // q = 1 is the independent case: single-plaquette events are exactly
    // uncorrelated.
    RcmParams ind;
    ind.p = 0.35;
    ind.q = 1.0;
    ind.q_field = 2;
    ind.i = 1;
    FkgReport rep = fkg_probe(H, ind, 50, opt.seed);
    push(out, "fkg-independent-q1", std::abs(rep.min_pair_slack), 1e-12);

    QMonotonicityReport mono = q_monotonicity_probe(H, 0.5, 0.25, {1.0, 2.0, 4.0}, 1, 2);
    push_flag(out, "mean-eta-decreasing-in-q", mono.fixed_p_nonincreasing);
    push_flag(out, "mean-eta-increasing-at-fixed-phat", mono.fixed_phat_nondecreasing);
}

void wilson_checks(const VerifyOptions&, std::vector<CheckResult>& out) {
    for (uint32_t q : {2u, 3u}) {
        Fq F(q);
        Complex sq = unit_square();
        Chain gamma = sq.boundary(2, 0, F);
        WilsonExact w = wilson_exact(sq, 2, q, 1.0, gamma);
        std::string inst = "q=" + std::to_string(q);
        push(out, "wilson-expectation-identity(" + inst + ")",
             std::abs(w.expectation.real() - w.v_probability) + std::abs(w.expectation.imag()),
             1e-12);
        push(out, "wilson-conditional-on-v(" + inst + ")",
             std::abs(w.conditional_given_v - 1.0), 1e-12);
        push(out, "wilson-uniform-off-v(" + inst + ")", w.max_conditional_dev, 1e-12);
        push(out, "two-point-identity(" + inst + ")",
             std::abs(w.two_point - (1.0 - 1.0 / q) * w.v_probability), 1e-12);

        // Same identities on a 2x2 free box at i = 1 with a two-vertex cycle.
        Complex box = Complex::box(2, 1, 2, BoundaryCondition::Free);
        Chain pair;
        pair.dim = 0;
        uint32_t va = box.index_of(CellId{{-1, 0}, 0u});
        uint32_t vb = box.index_of(CellId{{1, 0}, 0u});
        pair.v.nz.emplace_back(std::min(va, vb), 1);
        pair.v.nz.emplace_back(std::max(va, vb), F.from_int(-1));
        WilsonExact wb = wilson_exact(box, 1, q, 0.7, pair);
        push(out, "wilson-two-point-box(" + inst + ")",
             std::abs(wb.expectation.real() - wb.v_probability) +
                 std::abs(wb.expectation.imag()) +
                 std::abs(wb.two_point - (1.0 - 1.0 / q) * wb.v_probability),
             1e-12);
    }
}

} // namespace

StationarityReport sw_stationarity_check(const Complex& X, int i, uint32_t q, double beta) {
    Fq F(q);
    double p = 1.0 - std::exp(-beta);
    ExactGibbs gibbs = ExactGibbs::enumerate(X, i, beta, q);
    uint64_t n = gibbs.size();
    uint32_t n_plaq = X.cell_count(i);
    if (n_plaq > 20) throw std::invalid_argument("plaquette space too large");

    // Cocycle sets per plaquette configuration.
    std::vector<std::vector<uint64_t>> cocycles(1ull << n_plaq);
    for (uint64_t s = 0; s < n; ++s) {
        SpinCochain f = gibbs.decode(s);
        uint32_t sat = 0;
        for (uint32_t pq = 0; pq < n_plaq; ++pq)
            if (coboundary_value(X, i, f, pq, F) == 0) sat |= 1u << pq;
        for (uint64_t m = 0; m < cocycles.size(); ++m)
            if ((m & ~static_cast<uint64_t>(sat)) == 0) cocycles[m].push_back(s);
    }

    std::vector<std::vector<double>> T(n, std::vector<double>(n, 0.0));
    for (uint64_t s = 0; s < n; ++s) {
        SpinCochain f = gibbs.decode(s);
        uint32_t sat = 0;
        for (uint32_t pq = 0; pq < n_plaq; ++pq)
            if (coboundary_value(X, i, f, pq, F) == 0) sat |= 1u << pq;
        uint64_t m = sat;
        while (true) {
            double pw = std::pow(p, std::popcount(m)) *
                        std::pow(1.0 - p, std::popcount(static_cast<uint64_t>(sat)) -
                                              std::popcount(m));
            for (uint64_t t : cocycles[m]) T[s][t] += pw / cocycles[m].size();
            if (m == 0) break;
            m = (m - 1) & sat;
        }
    }

    StationarityReport rep;
    for (uint64_t t = 0; t < n; ++t) {
        double acc = 0;
        for (uint64_t s = 0; s < n; ++s) acc += gibbs.prob(s) * T[s][t];
        rep.stationarity_residual =
            std::max(rep.stationarity_residual, std::abs(acc - gibbs.prob(t)));
    }
    for (uint64_t s = 0; s < n; ++s)
        for (uint64_t t = 0; t < n; ++t)
            rep.detailed_balance_residual =
                std::max(rep.detailed_balance_residual,
                         std::abs(gibbs.prob(s) * T[s][t] - gibbs.prob(t) * T[t][s]));
    return rep;
}

StationarityReport glauber_stationarity_check(const Complex& X, const RcmParams& params) {
    HomologyContext H(X, params.q_field);
    ExactRcm model = ExactRcm::enumerate(H, params);
    uint64_t n = model.size();
    uint32_t nf = model.n_free();

    // Single-site heat-bath kernels; the sweep is their product.
    std::vector<std::vector<double>> sweep(n, std::vector<double>(n, 0.0));
    for (uint64_t s = 0; s < n; ++s) sweep[s][s] = 1.0;
    StationarityReport rep;
    for (uint32_t bit = 0; bit < nf; ++bit) {
        std::vector<std::vector<double>> K(n, std::vector<double>(n, 0.0));
        for (uint64_t s = 0; s < n; ++s) {
            PlaquetteConfig cfg = model.config_of(s);
            double p_open =
                conditional_open_probability(H, cfg, model.free_cell(bit), params);
            K[s][s | (1ull << bit)] += p_open;
            K[s][s & ~(1ull << bit)] += 1.0 - p_open;
        }
        // each single-site kernel is reversible for the exact measure
        for (uint64_t s = 0; s < n; ++s)
            for (uint64_t t = 0; t < n; ++t)
                rep.detailed_balance_residual = std::max(
                    rep.detailed_balance_residual,
                    std::abs(model.prob(s) * K[s][t] - model.prob(t) * K[t][s]));
        std::vector<std::vector<double>> next(n, std::vector<double>(n, 0.0));
        for (uint64_t s = 0; s < n; ++s)
            for (uint64_t m = 0; m < n; ++m) {
                if (sweep[s][m] == 0) continue;
                for (uint64_t t = 0; t < n; ++t) next[s][t] += sweep[s][m] * K[m][t];
            }
        sweep.swap(next);
    }
    for (uint64_t t = 0; t < n; ++t) {
        double acc = 0;
        for (uint64_t s = 0; s < n; ++s) acc += model.prob(s) * sweep[s][t];
        rep.stationarity_residual =
            std::max(rep.stationarity_residual, std::abs(acc - model.prob(t)));
    }
    return rep;
}

std::vector<CheckResult> run_verify_suite(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    if (opt.inject_weight_error) {
        // Negative control: run the duality group against a corrupted weight;
        // the suite must fail loudly.
        duality_checks(opt, out, /*partition=*/false);
        return out;
    }
    if (opt.duality) {
        duality_checks(opt, out, /*partition=*/false);
        balanced_density_checks(out);
        TermwiseReport tw = termwise_duality_check(2, 4, 2, 3.0, self_dual_p(3.0), 3, 200,
                                                   opt.seed);
        push(out, "termwise-duality(d=4,i=2,q=3)", tw.max_log_ratio_dev, 1e-10,
             std::to_string(tw.n_configs) + " configs");
    }
    if (opt.partition) duality_checks(opt, out, /*partition=*/true);
    if (opt.alexander) alexander_checks(opt, out);
    if (opt.coupling) coupling_checks(opt, out);
    if (opt.sw_stationarity) sw_checks(opt, out);
    if (opt.glauber_checks) glauber_checks_fn(opt, out);
    if (opt.homology_oracle) homology_oracle_checks(opt, out);
    if (opt.fkg) fkg_checks(opt, out);
    if (opt.wilson) wilson_checks(opt, out);
    return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

} // namespace prcm

#include "prcm/loop_scan.hpp"

#include <cmath>
#include <stdexcept>

#include "prcm/oracle.hpp"
#include "prcm/rng.hpp"

namespace prcm {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }
double expit(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
// the Legendre polynomial.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double t = std::cos(M_PI * (k + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = t;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[k] = -t;
        x[n - 1 - k] = t;
        w[k] = w[n - 1 - k] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

// Heat-bath chain for the codimension-one model in a box, fused with the
// dual-graph bookkeeping needed for V_gamma: the chain can run either
// unconditioned or conditioned on V (closures that would break V are
// forbidden, which matches the conditional measure since V is increasing).
class CodimOneLoopChain {
public:
    CodimOneLoopChain(const Complex& X, const RcmParams& params, const LoopSpec& loop,
                      bool conditional)
        : X_(X), params_(params), F_(params.q_field), graph_(X), conditional_(conditional) {
        cfg_ = PlaquetteConfig::initial(X, params.i, /*start_open=*/true);
        weight_.assign(X.cell_count(params.i), 0);
        for (uint32_t cell : loop_disk_cells(X, params.i, loop)) weight_[cell] = 1;
    }

    void sweep(double p, double phat, Rng& rng) {
        uint32_t M = static_cast<uint32_t>(cfg_.open.size());
        for (uint32_t c = 0; c < M; ++c) {
            double u = rng.uniform(); // drawn unconditionally to keep paired
                                      // chains on common random numbers
            if (cfg_.frozen[c]) continue;
            // The conditional probability is phat or p (phat <= p); a draw
            // outside [phat, p) fixes the outcome without the connectivity
            // query, which only runs when it can change the result.
            if (u < phat) {
                cfg_.open[c] = 1; // opening never leaves V
                continue;
            }
            uint32_t parity = 0;
            bool queried = false, connected = false;
            if (u < p) {
                // Outcome depends on the Betti delta: open iff no cycle.
                connected = graph_.endpoints_connected(cfg_.open, c, &weight_, &F_, &parity);
                queried = true;
                if (!connected) {
                    cfg_.open[c] = 1;
                    continue;
                }
            }
            // Candidate outcome is "closed"; the conditioned chain must veto
            // closures that would create a nonzero-weight cycle.
            if (conditional_) {
                if (!queried)
                    connected =
                        graph_.endpoints_connected(cfg_.open, c, &weight_, &F_, &parity);
                if (connected && parity != weight_[c]) {
                    cfg_.open[c] = 1;
                    continue;
                }
            }
            cfg_.open[c] = 0;
        }
    }

    bool v_holds() const { return graph_.weights_consistent(cfg_.open, weight_, F_); }
    uint32_t eta() const { return cfg_.eta(); }
    const PlaquetteConfig& config() const { return cfg_; }

private:
    const Complex& X_;
    RcmParams params_;
    Fq F_;
    DualGraphCodim1 graph_;
    bool conditional_;
    PlaquetteConfig cfg_;
    std::vector<uint32_t> weight_;
};

} // namespace

Complex scan_box(int d, int i, int n) {
    // Margin n on every side of the loop's bounding box.
    std::vector<std::pair<int32_t, int32_t>> extents(d, {-n, n});
    for (int a = 0; a < i; ++a) extents[a] = {-n, 2 * n};
    return Complex::box_extents(std::move(extents), d, BoundaryCondition::Free);
}

LoopSpec scan_loop(int d, int i, int n) {
    LoopSpec loop;
    loop.corner.assign(d, 0);
    for (int a = 0; a < i; ++a) loop.axes.push_back(a);
    loop.dims.assign(i, n);
    return loop;
}

VGammaResult estimate_v_gamma(const Complex& X, const RcmParams& params, const LoopSpec& loop,
                              const LoopScanSettings& settings) {
    bool codim1 = !X.is_torus() && params.i == X.dimension() - 1 && X.dimension() >= 3;
    std::string mode = settings.mode;
    if (mode == "auto") {
        // Direct sampling needs enough expected hits of the rarer outcome; a
        // crude minimal-disk product estimate of mu(V) decides the side.
        double log_guess = static_cast<double>(loop_area(loop)) * std::log(params.p);
        bool direct_ok =
            log_guess > std::log(3000.0 / static_cast<double>(settings.direct_max_samples));
        mode = (direct_ok || !codim1) ? "direct" : "ti";
    }

    if (mode == "ti" && !codim1)
        throw std::invalid_argument("integration estimator needs the codim-1 box chain");

    VGammaResult out;
    if (mode == "direct") {
        if (codim1) {
            CodimOneLoopChain chain(X, params, loop, /*conditional=*/false);
            Rng rng(settings.seed, 0);
            double phat = params.phat();
            for (uint64_t s = 0; s < settings.burnin_sweeps; ++s)
                chain.sweep(params.p, phat, rng);
            uint64_t n = 0, hits = 0;
            std::vector<std::vector<double>> vals(1);
            while (n < settings.direct_max_samples) {
                for (uint64_t t = 0; t < settings.direct_thinning; ++t)
                    chain.sweep(params.p, phat, rng);
                bool v = chain.v_holds();
                vals[0].push_back(v ? 1.0 : 0.0);
                hits += v;
                ++n;
                uint64_t rare = std::min(hits, n - hits);
                if (n >= 2000 && rare >= settings.direct_min_rare) break;
            }
            Estimate est = pool_samples(vals);
            out.method = "direct";
            out.n_samples = est.n;
            out.log_mu = std::log(est.value);
            out.se_log = est.value > 0 ? est.se / est.value : 0;
            return out;
        }
        // Generic fallback: heat-bath sampler plus the homology test.
        EventSpec event;
        event.kind = EventKind::NullHomologous;
        Fq F(params.q_field);
        event.gamma = loop_boundary_cycle(X, params.i, loop, F);
        ChainSettings cs;
        cs.n_samples = settings.direct_max_samples;
        cs.burnin_sweeps = settings.burnin_sweeps;
        cs.thinning = settings.direct_thinning;
        cs.seed = settings.seed;
        Estimate est = estimate_event(X, params, event, cs);
        out.method = "direct";
        out.n_samples = est.n;
        out.log_mu = std::log(est.value);
        out.se_log = est.value > 0 ? est.se / est.value : 0;
        return out;
    }

    // Thermodynamic integration from p_hi (where V is essentially sure) down
    // to the requested p, with the conditional and unconditional chains on
    // common random numbers so their eta difference has small variance.
    double theta_lo = logit(params.p);
    double theta_hi = logit(settings.ti_p_upper);
    std::vector<double> nodes, weights;
    gauss_legendre(settings.ti_nodes, nodes, weights);

    CodimOneLoopChain cond(X, params, loop, /*conditional=*/true);
    CodimOneLoopChain free_chain(X, params, loop, /*conditional=*/false);
    Rng rng_cond(settings.seed, 1);
    Rng rng_free(settings.seed, 1); // identical stream: common random numbers

    double integral = 0, var = 0;
    uint64_t total_samples = 0;
    // Walk nodes from high p to low p so each node warm-starts the next.
    std::vector<size_t> order(nodes.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return nodes[a] > nodes[b]; });
    for (size_t k : order) {
        double theta = 0.5 * (theta_hi + theta_lo) + 0.5 * (theta_hi - theta_lo) * nodes[k];
        double p = expit(theta);
        RcmParams node_params = params;
        node_params.p = p;
        double phat = node_params.phat();
        for (uint64_t s = 0; s < settings.ti_burnin_per_node; ++s) {
            cond.sweep(p, phat, rng_cond);
            free_chain.sweep(p, phat, rng_free);
        }
        std::vector<std::vector<double>> diff(1);
        for (uint64_t s = 0; s < settings.ti_sweeps_per_node; ++s) {
            cond.sweep(p, phat, rng_cond);
            free_chain.sweep(p, phat, rng_free);
            diff[0].push_back(static_cast<double>(cond.eta()) -
                              static_cast<double>(free_chain.eta()));
        }
        Estimate g = pool_samples(diff);
        double scale = 0.5 * (theta_hi - theta_lo) * weights[k];
        integral += scale * g.value;
        var += scale * scale * g.se * g.se;
        total_samples += g.n;
    }
    out.method = "ti";
    out.n_samples = total_samples;
    out.log_mu = -integral; // log mu(V at p_hi) is within machine noise of 0
    out.se_log = std::sqrt(var);
    return out;
}

WilsonEstimate estimate_wilson(const Complex& X, int i, uint32_t q, double beta,
                               const Chain& gamma, uint64_t n_samples, uint64_t burnin,
                               uint64_t thinning, uint64_t seed) {
    PltgGlauberChain chain(X, i, beta, q, seed, 2);
    Fq F(q);
    for (uint64_t s = 0; s < burnin; ++s) chain.sweep();
    std::vector<std::vector<double>> re(1);
    double im_sum = 0;
    for (uint64_t s = 0; s < n_samples; ++s) {
        for (uint64_t t = 0; t < std::max<uint64_t>(1, thinning); ++t) chain.sweep();
        auto z = root_of_unity(wilson_value(chain.spins(), gamma, F), q);
        re[0].push_back(z.real());
        im_sum += z.imag();
    }
    Estimate est = pool_samples(re);
    WilsonEstimate out;
    out.re = est.value;
    out.im = im_sum / static_cast<double>(n_samples);
    out.se = est.se;
    out.n_samples = est.n;
    return out;
}

std::vector<LoopScanRow> area_perimeter_scan(int d, int i, double q, uint32_t q_field, double p,
                                             const std::vector<int>& sizes, bool with_wilson,
                                             const LoopScanSettings& settings) {
    std::vector<LoopScanRow> rows;
    for (int n : sizes) {
        Complex X = scan_box(d, i, n);
        LoopSpec loop = scan_loop(d, i, n);
        RcmParams params;
        params.p = p;
        params.q = q;
        params.q_field = q_field;
        params.i = i;

        LoopScanRow row;
        row.p = p;
        row.beta = -std::log1p(-p);
        row.n = n;
        row.per = loop_perimeter(X, i, loop);
        row.area = loop_area(loop);
        row.v = estimate_v_gamma(X, params, loop, settings);
        if (with_wilson) {
            Fq F(q_field);
            Chain gamma = loop_boundary_cycle(X, i, loop, F);
            row.w = estimate_wilson(X, i, q_field, row.beta, gamma,
                                    std::min<uint64_t>(settings.direct_max_samples, 20000),
                                    settings.burnin_sweeps, 1, settings.seed);
            row.wilson_present = true;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace prcm

#include "prcm/rcm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "prcm/rng.hpp"

namespace prcm {

void RcmParams::validate(const Complex& X) const {
    if (p < 0 || p > 1) throw std::invalid_argument("p must lie in [0,1]");
    if (q < 1) throw std::invalid_argument("cluster weight q must be >= 1");
    if (!Fq::is_prime(q_field)) throw std::invalid_argument("q_field must be prime");
    if (i < 1 || i > X.max_dim())
        throw std::invalid_argument("plaquette dimension i out of range for this complex");
}

PlaquetteConfig PlaquetteConfig::initial(const Complex& X, int i, bool start_open) {
    PlaquetteConfig cfg;
    cfg.open.assign(X.cell_count(i), start_open ? 1 : 0);
    cfg.frozen = X.frozen_mask(i);
    cfg.enforce_frozen();
    return cfg;
}

uint32_t PlaquetteConfig::eta() const {
    uint32_t n = 0;
    for (uint8_t b : open) n += b;
    return n;
}

void PlaquetteConfig::enforce_frozen() {
    for (size_t c = 0; c < open.size(); ++c)
        if (frozen[c]) open[c] = 1;
}

double log_weight(const HomologyContext& H, const PlaquetteConfig& cfg,
                  const RcmParams& params) {
    const double inf = std::numeric_limits<double>::infinity();
    uint32_t M = static_cast<uint32_t>(cfg.open.size());
    uint32_t eta = cfg.eta();
    double lw = 0;
    if (params.p == 0.0) {
        if (eta > 0) return -inf;
    } else {
        lw += eta * std::log(params.p);
    }
    if (params.p == 1.0) {
        if (eta < M) return -inf;
    } else {
        lw += (M - eta) * std::log1p(-params.p);
    }
    int b = H.betti(params.i, cfg.open, params.i - 1);
    if (params.corrupt_weight_for_tests) b *= 2; // test hook: breaks the measure
    lw += b * std::log(params.q);
    if (params.balanced) {
        int giant = H.induced_summary(params.i, cfg.open, params.i).giant_cycles;
        lw -= giant * 0.5 * std::log(params.q);
    }
    return lw;
}

double conditional_open_probability(const HomologyContext& H, const PlaquetteConfig& cfg,
                                    uint32_t cell, const RcmParams& params) {
    if (cfg.frozen[cell]) return 1.0;
    const SparseMatFq& A = H.boundary_matrix(params.i);
    EliminationFront front(H.field(), A.rows);
    for (uint32_t c = 0; c < A.cols; ++c)
        if (cfg.open[c] && c != cell) front.add_column(A.col[c], c);
    SparseVec v = A.col[cell];
    front.reduce(v);
    bool reduces_betti = !v.empty();
    return reduces_betti ? params.phat() : params.p;
}

ExactRcm ExactRcm::enumerate(const HomologyContext& H, const RcmParams& params,
                             std::vector<uint8_t> frozen) {
    const Complex& X = H.ambient();
    params.validate(X);
    ExactRcm out;
    out.X_ = &X;
    out.params_ = params;
    uint32_t M = X.cell_count(params.i);
    out.frozen_ = frozen.empty() ? X.frozen_mask(params.i) : std::move(frozen);
    for (uint32_t c = 0; c < M; ++c)
        if (!out.frozen_[c]) out.free_cells_.push_back(c);
    if (out.free_cells_.size() > kMaxFreeCells)
        throw std::invalid_argument("complex too large for exhaustive enumeration");

    uint64_t n_cfg = 1ull << out.free_cells_.size();
    std::vector<double> logw(n_cfg);
    std::vector<double> log_giant_term(n_cfg, 0.0);
    PlaquetteConfig cfg;
    cfg.frozen = out.frozen_;
    cfg.open.assign(M, 0);
    for (uint64_t mask = 0; mask < n_cfg; ++mask) {
        for (uint32_t b = 0; b < out.free_cells_.size(); ++b)
            cfg.open[out.free_cells_[b]] = static_cast<uint8_t>((mask >> b) & 1ull);
        cfg.enforce_frozen();
        RcmParams unbalanced = params;
        unbalanced.balanced = false;
        logw[mask] = log_weight(H, cfg, unbalanced);
        if (params.q != 1.0) { // at q = 1 the balancing factor is identically 1
            int giant = H.induced_summary(params.i, cfg.open, params.i).giant_cycles;
            log_giant_term[mask] = -giant * 0.5 * std::log(params.q);
        }
    }
    out.prob_.assign(n_cfg, 0.0);
    std::vector<long double> acc(n_cfg);
    long double Z = 0, Zb = 0, norm = 0;
    for (uint64_t mask = 0; mask < n_cfg; ++mask) {
        long double w = std::exp(static_cast<long double>(logw[mask]));
        long double wb =
            std::exp(static_cast<long double>(logw[mask] + log_giant_term[mask]));
        Z += w;
        Zb += wb;
        long double used = params.balanced ? wb : w;
        acc[mask] = used;
        norm += used;
    }
    for (uint64_t mask = 0; mask < n_cfg; ++mask)
        out.prob_[mask] = static_cast<double>(acc[mask] / norm);
    out.Z_ = static_cast<double>(Z);
    out.Zb_ = static_cast<double>(Zb);
    return out;
}

PlaquetteConfig ExactRcm::config_of(uint64_t mask) const {
    PlaquetteConfig cfg;
    cfg.frozen = frozen_;
    cfg.open.assign(X_->cell_count(params_.i), 0);
    for (uint32_t b = 0; b < free_cells_.size(); ++b)
        cfg.open[free_cells_[b]] = static_cast<uint8_t>((mask >> b) & 1ull);
    cfg.enforce_frozen();
    return cfg;
}

uint64_t ExactRcm::mask_of(const PlaquetteConfig& cfg) const {
    uint64_t mask = 0;
    for (uint32_t b = 0; b < free_cells_.size(); ++b)
        if (cfg.open[free_cells_[b]]) mask |= 1ull << b;
    return mask;
}

double ExactRcm::marginal_open(uint32_t cell) const {
    if (frozen_[cell]) return 1.0;
    uint32_t bit = 0;
    while (free_cells_[bit] != cell) ++bit;
    double s = 0;
    for (uint64_t mask = 0; mask < prob_.size(); ++mask)
        if ((mask >> bit) & 1ull) s += prob_[mask];
    return s;
}

double ExactRcm::conditional_open(uint64_t mask, uint32_t bit) const {
    double p1 = prob_[mask | (1ull << bit)];
    double p0 = prob_[mask & ~(1ull << bit)];
    return p1 / (p0 + p1);
}

double ExactRcm::expected_eta() const {
    double s = 0;
    uint32_t base = 0;
    for (uint8_t f : frozen_) base += f;
    for (uint64_t mask = 0; mask < prob_.size(); ++mask)
        s += prob_[mask] * (std::popcount(mask) + base);
    return s;
}

double ExactRcm::prob_of(const std::function<bool(uint64_t)>& event) const {
    double s = 0;
    for (uint64_t mask = 0; mask < prob_.size(); ++mask)
        if (event(mask)) s += prob_[mask];
    return s;
}

double ExactRcm::total_variation(const ExactRcm& other) const {
    if (prob_.size() != other.prob_.size())
        throw std::invalid_argument("total variation needs equal state spaces");
    double tv = 0;
    for (uint64_t mask = 0; mask < prob_.size(); ++mask)
        tv += std::abs(prob_[mask] - other.prob_[mask]);
    return tv / 2;
}

FkgReport fkg_probe(const HomologyContext& H, const RcmParams& params, int n_lattice_pairs,
                    uint64_t seed) {
    ExactRcm model = ExactRcm::enumerate(H, params);
    uint32_t n = model.n_free();
    FkgReport rep;
    rep.min_pair_slack = std::numeric_limits<double>::infinity();
    rep.min_lattice_slack = std::numeric_limits<double>::infinity();

    std::vector<double> open_prob(n, 0.0);
    std::vector<std::vector<double>> joint(n, std::vector<double>(n, 0.0));
    for (uint64_t mask = 0; mask < model.size(); ++mask) {
        double p = model.prob(mask);
        for (uint32_t a = 0; a < n; ++a) {
            if (!((mask >> a) & 1ull)) continue;
            open_prob[a] += p;
            for (uint32_t b = a; b < n; ++b)
                if ((mask >> b) & 1ull) joint[a][b] += p;
        }
    }
    for (uint32_t a = 0; a < n; ++a)
        for (uint32_t b = a; b < n; ++b) {
            double slack = joint[a][b] - open_prob[a] * open_prob[b];
            rep.min_pair_slack = std::min(rep.min_pair_slack, slack);
        }

    Rng rng(seed, 0);
    for (int t = 0; t < n_lattice_pairs; ++t) {
        uint64_t m1 = rng.next() & (model.size() - 1);
        uint64_t m2 = rng.next() & (model.size() - 1);
        double lhs = model.prob(m1 | m2) * model.prob(m1 & m2);
        double rhs = model.prob(m1) * model.prob(m2);
        rep.min_lattice_slack = std::min(rep.min_lattice_slack, lhs - rhs);
    }
    return rep;
}

QMonotonicityReport q_monotonicity_probe(const HomologyContext& H, double p, double phat,
                                         const std::vector<double>& qs, int i,
                                         uint32_t q_field) {
    QMonotonicityReport rep;
    rep.qs = qs;
    for (double qv : qs) {
        RcmParams fixed_p;
        fixed_p.p = p;
        fixed_p.q = qv;
        fixed_p.q_field = q_field;
        fixed_p.i = i;
        rep.mean_eta_fixed_p.push_back(ExactRcm::enumerate(H, fixed_p).expected_eta());

        // p giving the requested phat at this q: p = q phat / (1 + (q-1) phat).
        RcmParams fixed_phat = fixed_p;
        fixed_phat.p = qv * phat / (1.0 + (qv - 1.0) * phat);
        rep.mean_eta_fixed_phat.push_back(ExactRcm::enumerate(H, fixed_phat).expected_eta());
    }
    rep.fixed_p_nonincreasing = true;
    rep.fixed_phat_nondecreasing = true;
    for (size_t j = 1; j < qs.size(); ++j) {
        if (rep.mean_eta_fixed_p[j] > rep.mean_eta_fixed_p[j - 1] + 1e-12)
            rep.fixed_p_nonincreasing = false;
        if (rep.mean_eta_fixed_phat[j] < rep.mean_eta_fixed_phat[j - 1] - 1e-12)
            rep.fixed_phat_nondecreasing = false;
    }
    return rep;
}

} // namespace prcm

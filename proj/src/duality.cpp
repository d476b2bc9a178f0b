#include "prcm/duality.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "prcm/rng.hpp"
#include "prcm/sampler.hpp"

namespace prcm {

double dual_p(double p, double q) {
    if (p < 0 || p > 1) throw std::invalid_argument("p must lie in [0,1]");
    if (q < 1) throw std::invalid_argument("q must be >= 1");
    return ((1.0 - p) * q) / ((1.0 - p) * q + p);
}

double self_dual_p(double q) { return std::sqrt(q) / (1.0 + std::sqrt(q)); }

double dual_beta(double beta, double q) {
    if (beta < 0) throw std::invalid_argument("beta must be >= 0");
    if (beta == 0) return std::numeric_limits<double>::infinity();
    return std::log((std::exp(beta) + q - 1.0) / (std::exp(beta) - 1.0));
}

double self_dual_beta(double q) { return std::log(1.0 + std::sqrt(q)); }

DualityReport verify_duality(int N, int d, int i, double q, double p, uint32_t q_field,
                             bool corrupt_weights_for_tests) {
    if (i < 1 || i >= d) throw std::invalid_argument("duality needs 0 < i < d");
    Complex T = Complex::torus(d, N, d);
    HomologyContext H(T, q_field);

    RcmParams primal;
    primal.p = p;
    primal.q = q;
    primal.q_field = q_field;
    primal.i = i;
    primal.balanced = true;
    primal.corrupt_weight_for_tests = corrupt_weights_for_tests;
    ExactRcm model = ExactRcm::enumerate(H, primal);

    RcmParams dual = primal;
    dual.p = dual_p(p, q);
    dual.i = d - i;
    ExactRcm dual_model = ExactRcm::enumerate(H, dual);

    if (model.n_free() != dual_model.n_free())
        throw std::logic_error("plaquette and dual plaquette counts differ");

    // Push the primal distribution through duality. Free-cell bit b of the
    // i-model maps to the dual cell of cell b; the dual model's masks use
    // (d-i)-cell ids as bits, so translate through the pairing.
    uint32_t n = model.n_free();
    std::vector<uint32_t> dual_bit(n);
    for (uint32_t b = 0; b < n; ++b) dual_bit[b] = T.dual_cell_index(i, model.free_cell(b));
    std::vector<double> pushed(dual_model.size(), 0.0);
    for (uint64_t mask = 0; mask < model.size(); ++mask) {
        uint64_t dual_mask = 0;
        for (uint32_t b = 0; b < n; ++b)
            if (!((mask >> b) & 1ull)) dual_mask |= 1ull << dual_bit[b];
        pushed[dual_mask] += model.prob(mask);
    }

    DualityReport rep;
    for (uint64_t mask = 0; mask < pushed.size(); ++mask)
        rep.total_variation += std::abs(pushed[mask] - dual_model.prob(mask));
    rep.total_variation /= 2;

    // Balanced partition identity.
    rep.eta_offset = H.betti_eta_offset(i);
    double M = static_cast<double>(T.cell_count(i));
    double log_factor = (rep.eta_offset - binomial(d, i) / 2.0 + binomial(d, d - i - 1)) *
                            std::log(q) +
                        M * std::log(dual.p) - M * std::log1p(-p);
    double lhs = std::log(dual_model.balanced_partition_sum());
    double rhs = log_factor + std::log(model.balanced_partition_sum());
    rep.partition_rel_err = std::abs(std::exp(lhs - rhs) - 1.0);
    rep.z_balanced = model.balanced_partition_sum();
    rep.z_balanced_dual = dual_model.balanced_partition_sum();
    return rep;
}

TermwiseReport termwise_duality_check(int N, int d, int i, double q, double p, uint32_t q_field,
                                      int n_configs, uint64_t seed) {
    Complex T = Complex::torus(d, N, d);
    HomologyContext H(T, q_field);
    double pstar = dual_p(p, q);

    RcmParams primal;
    primal.p = p;
    primal.q = q;
    primal.q_field = q_field;
    primal.i = i;
    primal.balanced = true;
    RcmParams dual = primal;
    dual.p = pstar;
    dual.i = d - i;

    Rng rng(seed, 0);
    TermwiseReport rep;
    rep.n_configs = n_configs;
    double mean = 0;
    std::vector<double> ratios;
    PlaquetteConfig cfg, dual_cfg;
    cfg.frozen.assign(T.cell_count(i), 0);
    dual_cfg.frozen.assign(T.cell_count(d - i), 0);
    for (int t = 0; t < n_configs; ++t) {
        cfg.open.assign(T.cell_count(i), 0);
        double density = rng.uniform();
        for (auto& b : cfg.open) b = rng.bernoulli(density);
        dual_cfg.open = dual_open_set(T, i, cfg.open);
        double lr = log_weight(H, cfg, primal) - log_weight(H, dual_cfg, dual);
        ratios.push_back(lr);
        mean += lr;
    }
    mean /= n_configs;
    for (double lr : ratios)
        rep.max_log_ratio_dev = std::max(rep.max_log_ratio_dev, std::abs(lr - mean));
    return rep;
}

} // namespace prcm

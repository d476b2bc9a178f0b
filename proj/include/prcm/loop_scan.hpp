#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prcm/pltg.hpp"
#include "prcm/rcm.hpp"
#include "prcm/sampler.hpp"

namespace prcm {

struct LoopScanSettings {
    uint64_t seed = 1;
    // Direct estimation: sample until the rarer outcome of V has been seen
    // this many times (or the sample cap is hit).
    uint64_t direct_min_rare = 150;
    uint64_t direct_max_samples = 200000;
    uint64_t direct_thinning = 1;
    uint64_t burnin_sweeps = 200;
    // Thermodynamic integration over logit(p), for probabilities far beyond
    // direct reach: log mu_p(V) = -int_p^{p_hi} (E[eta|V] - E[eta]) dtheta.
    int ti_nodes = 20;
    uint64_t ti_sweeps_per_node = 400;
    uint64_t ti_burnin_per_node = 100;
    double ti_p_upper = 0.999;
    std::string mode = "auto"; // auto | direct | ti
};

struct VGammaResult {
    double log_mu = 0; // log mu(V_gamma)
    double se_log = 0;
    std::string method;
    uint64_t n_samples = 0;
};

// Estimates mu(V_gamma) for a hyperrectangular loop in a box, with the
// codimension-one dual-graph chain when available (i = d-1) and generic
// heat-bath sampling otherwise. `auto` picks direct sampling when the chain
// can resolve the probability and integration otherwise.
VGammaResult estimate_v_gamma(const Complex& X, const RcmParams& params, const LoopSpec& loop,
                              const LoopScanSettings& settings);

// Wilson variable estimate from local spin dynamics at beta = -log(1-p).
struct WilsonEstimate {
    double re = 0, im = 0, se = 0;
    uint64_t n_samples = 0;
};
WilsonEstimate estimate_wilson(const Complex& X, int i, uint32_t q, double beta,
                               const Chain& gamma, uint64_t n_samples, uint64_t burnin,
                               uint64_t thinning, uint64_t seed);

struct LoopScanRow {
    double p = 0, beta = 0;
    int n = 0;
    uint64_t per = 0, area = 0;
    VGammaResult v;
    WilsonEstimate w;
    bool wilson_present = false;
};

// Square loops n x n (axes 0,1) centred in a box with margin >= n on every
// side, scanned over loop sizes at fixed parameters.
std::vector<LoopScanRow> area_perimeter_scan(int d, int i, double q, uint32_t q_field, double p,
                                             const std::vector<int>& sizes, bool with_wilson,
                                             const LoopScanSettings& settings);

// The box and loop geometry used by the scan, exposed for tests.
Complex scan_box(int d, int i, int n);
LoopSpec scan_loop(int d, int i, int n);

} // namespace prcm

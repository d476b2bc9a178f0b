#pragma once

#include <cstdint>

#include "prcm/rcm.hpp"

namespace prcm {

// Dual edge weight: p p* / ((1-p)(1-p*)) = q, a decreasing involution with
// fixed point p_sd = sqrt(q)/(1+sqrt(q)).
double dual_p(double p, double q);
double self_dual_p(double q);

// Inverse-temperature form: beta* = log((e^beta + q - 1)/(e^beta - 1)),
// consistent with dual_p through p = 1 - e^{-beta}. beta = 0 maps to +inf.
double dual_beta(double beta, double q);
double self_dual_beta(double q);

struct DualityReport {
    double total_variation = 0; // dualised balanced model vs balanced dual model
    double partition_rel_err = 0;
    int eta_offset = 0;         // the constant c used in the partition identity
    double z_balanced = 0;      // balanced partition sum of the primal model
    double z_balanced_dual = 0; // balanced partition sum of the dual model
};

// Exhaustively verifies, on an enumerable torus, that pushing the balanced
// i-dimensional measure through plaquette duality gives the balanced
// (d-i)-dimensional measure at p*, and that the balanced partition sums obey
//   Z~(p*, q, d-i) = q^(c - C(d,i)/2 + C(d,d-i-1)) (p*)^M (1-p)^-M Z~(p, q, i)
// with M = |F^i| and c the configuration-independent offset of
// b_i - b_{i-1} - eta.
DualityReport verify_duality(int N, int d, int i, double q, double p, uint32_t q_field,
                             bool corrupt_weights_for_tests = false);

// Per-configuration weight-ratio check for tori too large to enumerate: the
// balanced weight of P at (p, i) divided by the balanced weight of its dual
// at (p*, d-i) must be the same constant for every configuration.
struct TermwiseReport {
    double max_log_ratio_dev = 0; // max deviation of the log ratio from its mean
    int n_configs = 0;
};
TermwiseReport termwise_duality_check(int N, int d, int i, double q, double p, uint32_t q_field,
                                      int n_configs, uint64_t seed);

} // namespace prcm

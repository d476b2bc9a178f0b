#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "prcm/complex.hpp"
#include "prcm/homology.hpp"

namespace prcm {

// Parameters of the i-dimensional plaquette random-cluster measure
//   mu(P) ~ p^eta (1-p)^(|X^i|-eta) q^{b_{i-1}(P; F_qfield)},
// optionally reweighted by (sqrt q)^{-b_i(P)} (the balanced variant used for
// torus duality). The cluster weight q is a real >= 1; homology is always
// computed over the prime field q_field.
struct RcmParams {
    double p = 0.5;
    double q = 1.0;
    uint32_t q_field = 2;
    int i = 1;
    bool balanced = false;
    // Test hook: deliberately corrupts the weight so negative controls can
    // prove the verification suite actually bites.
    bool corrupt_weight_for_tests = false;

    void validate(const Complex& X) const;
    double phat() const { return (p / q) / (1.0 - p + p / q); }
};

struct PlaquetteConfig {
    std::vector<uint8_t> open;
    std::vector<uint8_t> frozen; // frozen cells stay open forever (wired boxes)

    static PlaquetteConfig initial(const Complex& X, int i, bool start_open = false);
    uint32_t eta() const;
    void enforce_frozen();
};

// Log of the unnormalized weight of a configuration. Impossible
// configurations at p in {0,1} get -infinity.
double log_weight(const HomologyContext& H, const PlaquetteConfig& cfg, const RcmParams& params);

// Conditional probability that `cell` is open given the rest of the
// configuration: p when opening leaves b_{i-1} unchanged, and
// (p/q)/(1-p+p/q) when opening lowers it by one.
double conditional_open_probability(const HomologyContext& H, const PlaquetteConfig& cfg,
                                    uint32_t cell, const RcmParams& params);

// Exhaustive enumeration of the measure on complexes with few free
// plaquettes. Configurations are indexed by bit masks over the free cells
// (frozen cells are implicitly open).
class ExactRcm {
public:
    static constexpr uint32_t kMaxFreeCells = 20;

    static ExactRcm enumerate(const HomologyContext& H, const RcmParams& params,
                              std::vector<uint8_t> frozen = {});

    const RcmParams& params() const { return params_; }
    uint64_t size() const { return prob_.size(); }
    double prob(uint64_t mask) const { return prob_[mask]; }
    const std::vector<double>& table() const { return prob_; }
    double partition_sum() const { return Z_; }            // unbalanced Z
    double balanced_partition_sum() const { return Zb_; }  // Z with (sqrt q)^{-b_i}

    uint32_t free_cell(uint32_t bit) const { return free_cells_[bit]; }
    uint32_t n_free() const { return static_cast<uint32_t>(free_cells_.size()); }
    PlaquetteConfig config_of(uint64_t mask) const;
    uint64_t mask_of(const PlaquetteConfig& cfg) const;

    double marginal_open(uint32_t cell) const;
    // P(cell open | all other cells as in `mask`).
    double conditional_open(uint64_t mask, uint32_t bit) const;
    double expected_eta() const;
    double prob_of(const std::function<bool(uint64_t)>& event) const;
    double total_variation(const ExactRcm& other) const;

private:
    ExactRcm() = default;
    const Complex* X_ = nullptr;
    RcmParams params_;
    std::vector<uint8_t> frozen_;
    std::vector<uint32_t> free_cells_;
    std::vector<double> prob_;
    double Z_ = 0, Zb_ = 0;
};

// Exact positive-association probe on an enumerable complex: minimum slack of
// single-plaquette event pairs and of the lattice condition on sampled
// configuration pairs. Exact measures, so slacks below -1e-12 mean failure.
struct FkgReport {
    double min_pair_slack = 0;
    double min_lattice_slack = 0;
    bool ok(double tol = 1e-12) const {
        return min_pair_slack >= -tol && min_lattice_slack >= -tol;
    }
};
FkgReport fkg_probe(const HomologyContext& H, const RcmParams& params, int n_lattice_pairs,
                    uint64_t seed);

// Exact E[eta] as q varies, at fixed p and at fixed phat.
struct QMonotonicityReport {
    std::vector<double> qs;
    std::vector<double> mean_eta_fixed_p;
    std::vector<double> mean_eta_fixed_phat;
    bool fixed_p_nonincreasing = false;
    bool fixed_phat_nondecreasing = false;
};
QMonotonicityReport q_monotonicity_probe(const HomologyContext& H, double p, double phat,
                                         const std::vector<double>& qs, int i,
                                         uint32_t q_field);

} // namespace prcm

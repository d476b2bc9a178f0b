#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prcm/complex.hpp"
#include "prcm/rcm.hpp"

namespace prcm {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0;     // the measured discrepancy / statistic
    double tolerance = 0; // the bound it must satisfy
    std::string detail;
};

struct VerifyOptions {
    bool duality = true;
    bool partition = true;
    bool alexander = true;
    bool coupling = true;
    bool sw_stationarity = true;
    bool glauber_checks = true;
    bool homology_oracle = true;
    bool fkg = true;
    bool wilson = true;
    bool inject_weight_error = false; // negative control
    uint64_t seed = 12345;
    int alexander_configs = 500;
    int homology_trials = 500;
};

std::vector<CheckResult> run_verify_suite(const VerifyOptions& opt);
bool all_passed(const std::vector<CheckResult>& results);

// Exact single-step transition checks on enumerable complexes.
struct StationarityReport {
    double stationarity_residual = 0;
    double detailed_balance_residual = 0;
};
// Cluster dynamics on spins: stationary for the Gibbs measure, reversible.
StationarityReport sw_stationarity_check(const Complex& X, int i, uint32_t q, double beta);
// Heat-bath dynamics on plaquettes: a full sweep fixes the exact measure and
// every single-site kernel is reversible.
StationarityReport glauber_stationarity_check(const Complex& X, const RcmParams& params);

} // namespace prcm

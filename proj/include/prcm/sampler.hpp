#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "prcm/complex.hpp"
#include "prcm/homology.hpp"
#include "prcm/rcm.hpp"

namespace prcm {

long binomial(int n, int k);

// The homological percolation events, plus the bounded-cycle event for a
// fixed (i-1)-cycle gamma.
enum class EventKind { GiantNontrivial, GiantSurjective, NullHomologous };
struct EventSpec {
    EventKind kind = EventKind::GiantNontrivial;
    Chain gamma;
};

struct ChainSettings {
    uint64_t n_samples = 1000;
    uint64_t burnin_sweeps = 1000;
    uint64_t thinning = 10;
    int n_chains = 1;
    uint64_t seed = 0;
    std::string algorithm = "auto"; // auto | bernoulli | glauber | sw
};

struct Estimate {
    double value = 0;
    double se = 0;
    uint64_t n = 0;
};

// A Markov (or independent) sampler targeting the random-cluster measure.
class RcmSampler {
public:
    virtual ~RcmSampler() = default;
    virtual void sweep() = 0;
    virtual const PlaquetteConfig& config() const = 0;
    virtual std::string name() const = 0;
};

// auto picks: independent sampling at q = 1, the cluster chain for prime
// integer q on unfrozen complexes with a small spin layer, single-plaquette
// heat-bath otherwise. Balanced measures have no sampler (enumeration only).
std::unique_ptr<RcmSampler> make_rcm_sampler(const Complex& X, const RcmParams& params,
                                             uint64_t seed, uint64_t stream,
                                             const std::string& algorithm = "auto");

bool evaluate_event(const HomologyContext& H, const RcmParams& params, const EventSpec& event,
                    const std::vector<uint8_t>& open);

// Runs n_chains independent chains (parallelised up to PLAQUETTE_RCM_THREADS)
// and pools per-sample indicators with batch-mean errors. Deterministic for a
// fixed seed: chain c uses substream c and results reduce in chain order.
Estimate estimate_event(const Complex& X, const RcmParams& params, const EventSpec& event,
                        const ChainSettings& settings);

// Batch-mean pooling used by every estimator; exposed for the scan code.
Estimate pool_samples(const std::vector<std::vector<double>>& per_chain_values);

int max_parallel_threads();

} // namespace prcm

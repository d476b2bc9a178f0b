#include "prcm/sampler.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "prcm/oracle.hpp"
#include "prcm/pltg.hpp"
#include "prcm/rng.hpp"

namespace prcm {

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long b = 1;
    for (int j = 0; j < k; ++j) b = b * (n - j) / (j + 1);
    return b;
}

namespace {

class BernoulliSampler final : public RcmSampler {
public:
    BernoulliSampler(const Complex& X, const RcmParams& params, uint64_t seed, uint64_t stream)
        : params_(params), rng_(seed, stream) {
        cfg_ = PlaquetteConfig::initial(X, params.i);
    }
    void sweep() override {
        for (size_t c = 0; c < cfg_.open.size(); ++c)
            if (!cfg_.frozen[c]) cfg_.open[c] = rng_.bernoulli(params_.p);
    }
    const PlaquetteConfig& config() const override { return cfg_; }
    std::string name() const override { return "bernoulli"; }

private:
    RcmParams params_;
    Rng rng_;
    PlaquetteConfig cfg_;
};

class GlauberSampler final : public RcmSampler {
public:
    GlauberSampler(const Complex& X, const RcmParams& params, uint64_t seed, uint64_t stream)
        : params_(params), rng_(seed, stream) {
        cfg_ = PlaquetteConfig::initial(X, params.i);
        oracle_ = make_betti_oracle(X, params.i, params.q_field, cfg_.open);
        phat_ = params.phat();
    }

    void sweep() override {
        // The conditional is phat or p with phat <= p, so a uniform draw
        // outside [phat, p) settles the cell without the rank query.
        for (uint32_t c = 0; c < cfg_.open.size(); ++c) {
            double u = rng_.uniform();
            if (cfg_.frozen[c]) continue;
            bool open;
            if (u < phat_)
                open = true;
            else if (u >= params_.p)
                open = false;
            else
                open = !oracle_->opening_reduces_betti(c);
            cfg_.open[c] = open;
            oracle_->set_state(c, open);
        }
    }
    const PlaquetteConfig& config() const override { return cfg_; }
    std::string name() const override { return "glauber"; }

private:
    RcmParams params_;
    Rng rng_;
    PlaquetteConfig cfg_;
    std::unique_ptr<BettiDeltaOracle> oracle_;
    double phat_ = 0;
};

class SwRcmSampler final : public RcmSampler {
public:
    SwRcmSampler(const Complex& X, const RcmParams& params, uint64_t seed, uint64_t stream)
        : chain_(X, params.i, params.p, params.q_field, seed, stream) {
        cfg_ = PlaquetteConfig::initial(X, params.i);
    }
    void sweep() override {
        chain_.step();
        cfg_.open = chain_.last_plaquettes();
    }
    const PlaquetteConfig& config() const override { return cfg_; }
    std::string name() const override { return "sw"; }

private:
    SwChain chain_;
    PlaquetteConfig cfg_;
};

} // namespace

std::unique_ptr<RcmSampler> make_rcm_sampler(const Complex& X, const RcmParams& params,
                                             uint64_t seed, uint64_t stream,
                                             const std::string& algorithm) {
    params.validate(X);
    if (params.balanced)
        throw std::invalid_argument("the balanced measure is enumeration-only");
    bool q_integral = params.q == std::floor(params.q);
    bool coupled = q_integral && params.q >= 2 &&
                   Fq::is_prime(static_cast<uint32_t>(params.q)) &&
                   static_cast<uint32_t>(params.q) == params.q_field;
    bool frozen = false;
    for (uint8_t f : X.frozen_mask(params.i)) frozen |= (f != 0);

    std::string algo = algorithm;
    if (algo == "auto") {
        if (params.q == 1.0)
            algo = "bernoulli";
        else if (coupled && !frozen &&
                 (params.i == 1 || X.cell_count(params.i - 1) <= 2048))
            algo = "sw";
        else
            algo = "glauber";
    }
    if (algo == "bernoulli") {
        if (params.q != 1.0)
            throw std::invalid_argument("independent sampling requires q = 1");
        return std::make_unique<BernoulliSampler>(X, params, seed, stream);
    }
    if (algo == "sw") {
        if (!coupled) throw std::invalid_argument("cluster chain requires prime integer q");
        if (frozen) throw std::invalid_argument("cluster chain requires an unfrozen complex");
        return std::make_unique<SwRcmSampler>(X, params, seed, stream);
    }
    if (algo == "glauber") return std::make_unique<GlauberSampler>(X, params, seed, stream);
    throw std::invalid_argument("unknown sampler algorithm: " + algo);
}

bool evaluate_event(const HomologyContext& H, const RcmParams& params, const EventSpec& event,
                    const std::vector<uint8_t>& open) {
    const Complex& X = H.ambient();
    switch (event.kind) {
    case EventKind::GiantNontrivial:
    case EventKind::GiantSurjective: {
        int target = event.kind == EventKind::GiantNontrivial
                         ? 1
                         : static_cast<int>(binomial(X.dimension(), params.i));
        if (!X.is_torus()) return false;
        int giant;
        if (params.i == 1) {
            giant = giant_rank_i1(X, open, H.field());
        } else {
            giant = H.induced_summary(params.i, open, params.i).giant_cycles;
        }
        return event.kind == EventKind::GiantNontrivial ? giant >= 1 : giant == target;
    }
    case EventKind::NullHomologous:
        return H.is_null_homologous(event.gamma, params.i, open);
    }
    return false;
}

int max_parallel_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("PLAQUETTE_RCM_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
}

Estimate pool_samples(const std::vector<std::vector<double>>& per_chain_values) {
    Estimate est;
    double sum = 0;
    uint64_t n = 0;
    std::vector<double> batch_means;
    for (const auto& chain : per_chain_values) {
        for (double v : chain) sum += v;
        n += chain.size();
        // Up to 32 equal batches per chain.
        size_t nb = std::min<size_t>(32, std::max<size_t>(1, chain.size() / 4));
        if (chain.empty()) continue;
        size_t bs = chain.size() / nb;
        if (bs == 0) {
            nb = chain.size();
            bs = 1;
        }
        for (size_t b = 0; b < nb; ++b) {
            double m = 0;
            for (size_t j = b * bs; j < (b + 1) * bs; ++j) m += chain[j];
            batch_means.push_back(m / static_cast<double>(bs));
        }
    }
    if (n == 0) return est;
    est.n = n;
    est.value = sum / static_cast<double>(n);
    if (batch_means.size() >= 2) {
        double mean = 0;
        for (double m : batch_means) mean += m;
        mean /= static_cast<double>(batch_means.size());
        double var = 0;
        for (double m : batch_means) var += (m - mean) * (m - mean);
        var /= static_cast<double>(batch_means.size() - 1);
        est.se = std::sqrt(var / static_cast<double>(batch_means.size()));
    }
    return est;
}

Estimate estimate_event(const Complex& X, const RcmParams& params, const EventSpec& event,
                        const ChainSettings& settings) {
    int n_chains = std::max(1, settings.n_chains);
    std::vector<std::vector<double>> values(n_chains);

    auto run_chain = [&](int c) {
        auto sampler = make_rcm_sampler(X, params, settings.seed, static_cast<uint64_t>(c),
                                        settings.algorithm);
        HomologyContext H(X, params.q_field);
        for (uint64_t s = 0; s < settings.burnin_sweeps; ++s) sampler->sweep();
        values[c].reserve(settings.n_samples);
        for (uint64_t s = 0; s < settings.n_samples; ++s) {
            for (uint64_t t = 0; t < std::max<uint64_t>(1, settings.thinning); ++t)
                sampler->sweep();
            values[c].push_back(
                evaluate_event(H, params, event, sampler->config().open) ? 1.0 : 0.0);
        }
    };

    int workers = std::min(n_chains, max_parallel_threads());
    if (workers <= 1) {
        for (int c = 0; c < n_chains; ++c) run_chain(c);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                int c;
                while ((c = next.fetch_add(1)) < n_chains) run_chain(c);
            });
        for (auto& t : pool) t.join();
    }
    return pool_samples(values);
}

} // namespace prcm

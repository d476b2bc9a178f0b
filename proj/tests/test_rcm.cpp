#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "prcm/rcm.hpp"
#include "prcm/rng.hpp"
#include "prcm/sampler.hpp"
#include "prcm/verify.hpp"

using namespace prcm;

namespace {

RcmParams params_for(double p, double q, uint32_t q_field, int i) {
    RcmParams out;
    out.p = p;
    out.q = q;
    out.q_field = q_field;
    out.i = i;
    return out;
}

} // namespace

TEST_CASE("log weight values on the 2-torus") {
    Complex T = Complex::torus(2, 2, 2);
    HomologyContext H(T, 2);

    PlaquetteConfig empty = PlaquetteConfig::initial(T, 1);
    RcmParams p = params_for(0.5, 2.0, 2, 1);
    // Empty configuration: four isolated vertices.
    CHECK(log_weight(H, empty, p) ==
          doctest::Approx(8 * std::log(0.5) + 4 * std::log(2.0)).epsilon(1e-14));

    PlaquetteConfig full = PlaquetteConfig::initial(T, 1, true);
    CHECK(log_weight(H, full, p) ==
          doctest::Approx(8 * std::log(0.5) + std::log(2.0)).epsilon(1e-14));

    // q = 1: the weight is the Bernoulli product mass.
    RcmParams q1 = params_for(0.3, 1.0, 2, 1);
    PlaquetteConfig cfg = empty;
    cfg.open[3] = cfg.open[5] = 1;
    CHECK(log_weight(H, cfg, q1) ==
          doctest::Approx(2 * std::log(0.3) + 6 * std::log(0.7)).epsilon(1e-14));
}

TEST_CASE("exact distribution normalises and reduces to Bernoulli at q=1") {
    Complex T = Complex::torus(2, 2, 2);
    HomologyContext H(T, 2);
    for (double q : {1.0, 2.0, 3.5}) {
        for (double p : {0.0, 0.25, 0.6, 1.0}) {
            ExactRcm model = ExactRcm::enumerate(H, params_for(p, q, 2, 1));
            double sum = 0;
            for (uint64_t m = 0; m < model.size(); ++m) sum += model.prob(m);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    ExactRcm bern = ExactRcm::enumerate(H, params_for(0.37, 1.0, 2, 1));
    for (uint64_t m = 0; m < bern.size(); ++m) {
        int k = std::popcount(m);
        CHECK(bern.prob(m) ==
              doctest::Approx(std::pow(0.37, k) * std::pow(0.63, 8 - k)).epsilon(1e-12));
    }
}

TEST_CASE("edge marginals are symmetric on the torus") {
    Complex T = Complex::torus(2, 2, 2);
    HomologyContext H(T, 2);
    ExactRcm model = ExactRcm::enumerate(H, params_for(0.4, 2.0, 2, 1));
    double first = model.marginal_open(0);
    for (uint32_t e = 1; e < 8; ++e)
        CHECK(model.marginal_open(e) == doctest::Approx(first).epsilon(1e-12));
}

TEST_CASE("conditional open probability") {
    Complex T = Complex::torus(2, 2, 2);
    HomologyContext H(T, 2);

    // q = 1: always p.
    PlaquetteConfig cfg = PlaquetteConfig::initial(T, 1);
    CHECK(conditional_open_probability(H, cfg, 0, params_for(0.42, 1.0, 2, 1)) ==
          doctest::Approx(0.42).epsilon(1e-15));

    // Opening into an empty configuration always lowers b_0: (p/q)/(1-p+p/q).
    CHECK(conditional_open_probability(H, cfg, 0, params_for(0.5, 2.0, 2, 1)) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    // Against enumeration conditionals, all cells and random rests.
    RcmParams params = params_for(0.4, 2.0, 2, 1);
    ExactRcm model = ExactRcm::enumerate(H, params);
    Rng rng(7, 0);
    for (int t = 0; t < 100; ++t) {
        uint64_t mask = rng.next() & (model.size() - 1);
        for (uint32_t bit = 0; bit < model.n_free(); ++bit) {
            PlaquetteConfig c = model.config_of(mask);
            double exact = model.conditional_open(mask, bit);
            double formula = conditional_open_probability(H, c, model.free_cell(bit), params);
            CHECK(exact == doctest::Approx(formula).epsilon(1e-12));
        }
    }
}

TEST_CASE("a heat-bath sweep at q=1 is an independent sample") {
    Complex T = Complex::torus(2, 3, 2);
    RcmParams params = params_for(0.3, 1.0, 2, 1);
    auto sampler = make_rcm_sampler(T, params, 99, 0, "glauber");
    uint64_t n = 4000, opens = 0;
    for (uint64_t s = 0; s < n; ++s) {
        sampler->sweep();
        opens += sampler->config().open[0];
    }
    double est = static_cast<double>(opens) / n;
    double se = std::sqrt(0.3 * 0.7 / n);
    CHECK(std::abs(est - 0.3) < 4 * se);
}

TEST_CASE("heat-bath marginal matches enumeration on the 2-torus") {
    Complex T = Complex::torus(2, 2, 2);
    HomologyContext H(T, 2);
    RcmParams params = params_for(0.4, 2.0, 2, 1);
    ExactRcm model = ExactRcm::enumerate(H, params);
    double exact = model.marginal_open(0);

    auto sampler = make_rcm_sampler(T, params, 4242, 0, "glauber");
    for (int burn = 0; burn < 200; ++burn) sampler->sweep();
    uint64_t n = 60000, opens = 0;
    for (uint64_t s = 0; s < n; ++s) {
        sampler->sweep();
        opens += sampler->config().open[0];
    }
    double est = static_cast<double>(opens) / n;
    // generous allowance for autocorrelation
    double se = 3 * std::sqrt(exact * (1 - exact) / n);
    CHECK(std::abs(est - exact) < 3 * se);
}

TEST_CASE("heat-bath transition matrix fixes the exact measure") {
    Complex sq = Complex::box_extents({{0, 1}, {0, 1}}, 2, BoundaryCondition::Free);
    RcmParams params = params_for(0.4, 2.0, 2, 1);
    StationarityReport rep = glauber_stationarity_check(sq, params);
    CHECK(rep.stationarity_residual < 1e-10);
    CHECK(rep.detailed_balance_residual < 1e-10);
}

TEST_CASE("wired boxes keep hull plaquettes open") {
    Complex B = Complex::box(2, 1, 2, BoundaryCondition::Wired);
    RcmParams params = params_for(0.2, 1.5, 2, 1);
    auto sampler = make_rcm_sampler(B, params, 5, 0, "glauber");
    auto frozen = B.frozen_mask(1);
    for (int s = 0; s < 50; ++s) {
        sampler->sweep();
        for (uint32_t c = 0; c < frozen.size(); ++c)
            if (frozen[c]) CHECK(sampler->config().open[c] == 1);
    }

    // Enumeration respects the frozen mask too.
    HomologyContext H(B, 2);
    ExactRcm model = ExactRcm::enumerate(H, params);
    CHECK(model.n_free() == 0); // every edge of the n=1 box touches the hull
}

TEST_CASE("positive association probe") {
    Complex T = Complex::torus(2, 2, 2);
    HomologyContext H(T, 2);
    for (double p : {0.3, 0.7}) {
        FkgReport rep = fkg_probe(H, params_for(p, 2.0, 2, 1), 200, 11);
        CHECK(rep.ok());
    }
    // Independence at q = 1: zero correlation exactly.
    FkgReport ind = fkg_probe(H, params_for(0.45, 1.0, 2, 1), 100, 11);
    CHECK(std::abs(ind.min_pair_slack) < 1e-12);
}

TEST_CASE("mean open count is monotone in q") {
    Complex T = Complex::torus(2, 2, 2);
    HomologyContext H(T, 2);
    QMonotonicityReport rep = q_monotonicity_probe(H, 0.5, 0.25, {1.0, 2.0, 4.0}, 1, 2);
    CHECK(rep.fixed_p_nonincreasing);
    CHECK(rep.fixed_phat_nondecreasing);
    CHECK(rep.mean_eta_fixed_p[0] > rep.mean_eta_fixed_p[1]); // strictly fewer at q=2

    QMonotonicityReport same = q_monotonicity_probe(H, 0.5, 0.25, {2.0, 2.0}, 1, 2);
    CHECK(same.mean_eta_fixed_p[0] == doctest::Approx(same.mean_eta_fixed_p[1]));
}

TEST_CASE("event estimates are exact at the endpoints") {
    Complex T = Complex::torus(2, 3, 2);
    ChainSettings settings;
    settings.n_samples = 50;
    settings.burnin_sweeps = 10;
    settings.thinning = 1;
    settings.seed = 3;

    EventSpec surjective;
    surjective.kind = EventKind::GiantSurjective;
    Estimate s1 = estimate_event(T, params_for(1.0, 2.0, 2, 1), surjective, settings);
    CHECK(s1.value == 1.0);

    EventSpec nontrivial;
    nontrivial.kind = EventKind::GiantNontrivial;
    Estimate a0 = estimate_event(T, params_for(0.0, 2.0, 2, 1), nontrivial, settings);
    CHECK(a0.value == 0.0);
}

TEST_CASE("event estimate increases with p") {
    Complex T = Complex::torus(2, 4, 2);
    ChainSettings settings;
    settings.n_samples = 400;
    settings.burnin_sweeps = 100;
    settings.thinning = 2;
    settings.seed = 21;
    EventSpec a;
    a.kind = EventKind::GiantNontrivial;
    Estimate lo = estimate_event(T, params_for(0.3, 2.0, 2, 1), a, settings);
    Estimate hi = estimate_event(T, params_for(0.8, 2.0, 2, 1), a, settings);
    CHECK(hi.value - lo.value > 0.3);
}

TEST_CASE("balanced and unbalanced measures stay within the density bounds") {
    Complex T = Complex::torus(2, 2, 2);
    HomologyContext H(T, 2);
    RcmParams ub = params_for(0.4, 3.0, 3, 1);
    RcmParams bal = ub;
    bal.balanced = true;
    ExactRcm a = ExactRcm::enumerate(H, ub);
    ExactRcm b = ExactRcm::enumerate(H, bal);
    double bound = std::pow(3.0, binomial(2, 1) / 2.0);
    for (uint64_t m = 0; m < a.size(); ++m) {
        double ratio = a.prob(m) / b.prob(m);
        CHECK(ratio <= bound * (1 + 1e-12));
        CHECK(ratio >= 1.0 / bound * (1 - 1e-12));
    }
}

TEST_CASE("independent case: heat-bath kernel fixes the product measure exactly") {
    Complex sq = Complex::box_extents({{0, 1}, {0, 1}}, 2, BoundaryCondition::Free);
    RcmParams params = params_for(0.3, 1.0, 2, 1);
    StationarityReport rep = glauber_stationarity_check(sq, params);
    CHECK(rep.stationarity_residual < 1e-12);
    CHECK(rep.detailed_balance_residual < 1e-12);
}

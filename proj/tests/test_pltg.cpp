#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "prcm/pltg.hpp"
#include "prcm/verify.hpp"

using namespace prcm;

namespace {

Complex unit_square() {
    return Complex::box_extents({{0, 1}, {0, 1}}, 2, BoundaryCondition::Free);
}

SpinCochain random_cochain(const Complex& X, int k, const Fq& F, Rng& rng) {
    SpinCochain f;
    f.values.resize(X.cell_count(k));
    for (auto& v : f.values) v = static_cast<uint32_t>(rng.below(F.modulus()));
    return f;
}

SpinCochain add_coboundary(const Complex& X, int k, const SpinCochain& f, const SpinCochain& g,
                           const Fq& F) {
    // f + delta g, where g lives one dimension below.
    SpinCochain out = f;
    std::vector<std::pair<uint32_t, int>> faces;
    for (uint32_t c = 0; c < out.values.size(); ++c) {
        X.boundary_indices(k, c, faces);
        for (const auto& [cell, sign] : faces)
            out.values[c] = F.add(out.values[c], F.mul(F.from_int(sign), g.values[cell]));
    }
    return out;
}

} // namespace

TEST_CASE("hamiltonian counts satisfied plaquettes") {
    Fq F2(2);
    Complex sq = unit_square();
    SpinCochain zero;
    zero.values.assign(4, 0);
    CHECK(hamiltonian(sq, 2, zero, F2) == -1);

    // One edge flipped: the single plaquette is unsatisfied.
    SpinCochain one = zero;
    one.values[0] = 1;
    CHECK(hamiltonian(sq, 2, one, F2) == 0);

    Complex T = Complex::torus(2, 3, 2);
    SpinCochain z;
    z.values.assign(T.cell_count(1), 0);
    CHECK(hamiltonian(T, 2, z, F2) == -static_cast<long>(T.cell_count(2)));
}

TEST_CASE("gauge invariance: adding a coboundary preserves the energy") {
    Rng rng(1, 0);
    for (uint32_t q : {2u, 3u, 5u}) {
        Fq F(q);
        Complex T = Complex::torus(2, 2, 2);
        for (int t = 0; t < 40; ++t) {
            SpinCochain f = random_cochain(T, 1, F, rng);
            SpinCochain g = random_cochain(T, 0, F, rng);
            SpinCochain fg = add_coboundary(T, 1, f, g, F);
            CHECK(hamiltonian(T, 2, f, F) == hamiltonian(T, 2, fg, F));
        }
    }
}

TEST_CASE("exact Gibbs table") {
    Complex sq = unit_square();

    // beta = 0: uniform.
    ExactGibbs uniform = ExactGibbs::enumerate(sq, 2, 0.0, 2);
    for (uint64_t s = 0; s < uniform.size(); ++s)
        CHECK(uniform.prob(s) == doctest::Approx(1.0 / 16).epsilon(1e-12));

    // beta = 1, q = 2: 8 of the 16 edge states satisfy the plaquette, so
    // P(satisfied) = 8 e / (8 e + 8).
    ExactGibbs gibbs = ExactGibbs::enumerate(sq, 2, 1.0, 2);
    Fq F2(2);
    int satisfied_states = 0;
    double p_sat = 0;
    for (uint64_t s = 0; s < gibbs.size(); ++s) {
        SpinCochain f = gibbs.decode(s);
        if (coboundary_value(sq, 2, f, 0, F2) == 0) {
            ++satisfied_states;
            p_sat += gibbs.prob(s);
        }
    }
    CHECK(satisfied_states == 8);
    CHECK(p_sat == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + 1.0)).epsilon(1e-12));

    // Gauge multiplicity: states differing by a coboundary have equal mass.
    Rng rng(3, 0);
    Fq F3(3);
    ExactGibbs g3 = ExactGibbs::enumerate(sq, 2, 0.7, 3);
    for (int t = 0; t < 30; ++t) {
        SpinCochain f = g3.decode(rng.below(g3.size()));
        SpinCochain g = random_cochain(sq, 0, F3, rng);
        SpinCochain fg = add_coboundary(sq, 1, f, g, F3);
        CHECK(g3.prob(g3.encode(f)) == doctest::Approx(g3.prob(g3.encode(fg))).epsilon(1e-12));
    }
}

TEST_CASE("coupling halves") {
    Rng rng(17, 0);
    Fq F3(3);
    Complex T = Complex::torus(2, 3, 2);

    // Zero spins: every plaquette satisfied, so the sample is Bernoulli(p).
    SpinCochain zero;
    zero.values.assign(T.cell_count(1), 0);
    uint64_t n = 3000, opens = 0;
    for (uint64_t t = 0; t < n; ++t)
        opens += couple_sample(T, 2, zero, 0.35, F3, rng).eta();
    double est = static_cast<double>(opens) / (n * T.cell_count(2));
    CHECK(std::abs(est - 0.35) < 4 * std::sqrt(0.35 * 0.65 / (n * T.cell_count(2))));

    // couple_sample never opens an unsatisfied plaquette.
    for (int t = 0; t < 20; ++t) {
        SpinCochain f = random_cochain(T, 1, F3, rng);
        PlaquetteConfig cfg = couple_sample(T, 2, f, 0.8, F3, rng);
        for (uint32_t p = 0; p < cfg.open.size(); ++p)
            if (cfg.open[p]) CHECK(coboundary_value(T, 2, f, p, F3) == 0);
    }

    // couple_cocycle output vanishes on every open plaquette.
    for (uint32_t q : {2u, 3u}) {
        Fq F(q);
        for (int t = 0; t < 20; ++t) {
            std::vector<uint8_t> open(T.cell_count(2));
            for (auto& b : open) b = rng.bernoulli(0.5);
            SpinCochain f = couple_cocycle(T, 2, open, F, rng);
            for (uint32_t p = 0; p < open.size(); ++p)
                if (open[p]) CHECK(coboundary_value(T, 2, f, p, F) == 0);
        }
        // i = 1 specialisation too.
        for (int t = 0; t < 20; ++t) {
            std::vector<uint8_t> open(T.cell_count(1));
            for (auto& b : open) b = rng.bernoulli(0.5);
            SpinCochain f = couple_cocycle(T, 1, open, F, rng);
            for (uint32_t e = 0; e < open.size(); ++e)
                if (open[e]) CHECK(coboundary_value(T, 1, f, e, F) == 0);
        }
    }
}

TEST_CASE("joint enumeration reproduces both marginals") {
    for (uint32_t q : {2u, 3u}) {
        for (double beta : {0.5, 1.0}) {
            CouplingTables sq = enumerate_coupling(unit_square(), 2, q, beta);
            CHECK(sq.tv_spin_vs_gibbs < 1e-12);
            CHECK(sq.tv_plaquette_vs_rcm < 1e-12);

            Complex box = Complex::box(2, 1, 2, BoundaryCondition::Free);
            CouplingTables bx = enumerate_coupling(box, 1, q, beta);
            CHECK(bx.tv_spin_vs_gibbs < 1e-12);
            CHECK(bx.tv_plaquette_vs_rcm < 1e-12);
        }
    }
}

TEST_CASE("cluster chain fixes the Gibbs measure and is reversible") {
    for (uint32_t q : {2u, 3u}) {
        StationarityReport rep = sw_stationarity_check(unit_square(), 2, q, 1.0);
        CHECK(rep.stationarity_residual < 1e-10);
        CHECK(rep.detailed_balance_residual < 1e-10);
    }
}

TEST_CASE("at beta=0 the cluster chain draws uniform spins") {
    Complex sq = unit_square();
    SwChain chain(sq, 2, 0.0, 2, 7, 0);
    std::vector<uint64_t> counts(16, 0);
    uint64_t n = 32000;
    ExactGibbs codec = ExactGibbs::enumerate(sq, 2, 0.0, 2);
    for (uint64_t t = 0; t < n; ++t) {
        chain.step();
        counts[codec.encode(chain.spins())]++;
    }
    for (uint64_t c : counts) {
        double est = static_cast<double>(c) / n;
        CHECK(std::abs(est - 1.0 / 16) < 5 * std::sqrt((1.0 / 16) * (15.0 / 16) / n));
    }
}

TEST_CASE("wilson variables") {
    Fq F3(3);
    Complex T = Complex::torus(2, 4, 2);
    Rng rng(23, 0);

    LoopSpec loop;
    loop.corner = {1, 1};
    loop.axes = {0, 1};
    loop.dims = {2, 2};
    Chain gamma = loop_boundary_cycle(T, 2, loop, F3);
    CHECK(loop_area(loop) == 4);
    CHECK(loop_perimeter(T, 2, loop) == 8);
    // gamma is a cycle
    CHECK(T.boundary_matrix(1, F3).mul_vec(F3, gamma.v).empty());

    SpinCochain zero;
    zero.values.assign(T.cell_count(1), 0);
    CHECK(wilson_value(zero, gamma, F3) == 0);
    CHECK(root_of_unity(0, 3) == std::complex<double>(1, 0));

    // Cohomology invariance: f and f + delta g agree on every cycle.
    for (int t = 0; t < 40; ++t) {
        SpinCochain f;
        f.values.resize(T.cell_count(1));
        for (auto& v : f.values) v = static_cast<uint32_t>(rng.below(3));
        SpinCochain g;
        g.values.resize(T.cell_count(0));
        for (auto& v : g.values) v = static_cast<uint32_t>(rng.below(3));
        std::vector<std::pair<uint32_t, int>> faces;
        SpinCochain fg = f;
        for (uint32_t c = 0; c < fg.values.size(); ++c) {
            T.boundary_indices(1, c, faces);
            for (const auto& [cell, sign] : faces)
                fg.values[c] = F3.add(fg.values[c], F3.mul(F3.from_int(sign), g.values[cell]));
        }
        CHECK(wilson_value(f, gamma, F3) == wilson_value(fg, gamma, F3));
    }

    // Homology invariance: for a cocycle of P, homologous loops in P agree.
    std::vector<uint8_t> all_open(T.cell_count(2), 1);
    for (int t = 0; t < 20; ++t) {
        SpinCochain f = couple_cocycle(T, 2, all_open, F3, rng);
        LoopSpec shifted = loop;
        shifted.corner = {0, 0};
        Chain gamma2 = loop_boundary_cycle(T, 2, shifted, F3);
        CHECK(wilson_value(f, gamma, F3) == wilson_value(f, gamma2, F3));
    }
}

TEST_CASE("exact wilson identities on tiny complexes") {
    for (uint32_t q : {2u, 3u}) {
        Fq F(q);
        Complex sq = unit_square();
        Chain gamma = sq.boundary(2, 0, F);
        WilsonExact w = wilson_exact(sq, 2, q, 1.0, gamma);
        CHECK(std::abs(w.expectation.real() - w.v_probability) < 1e-12);
        CHECK(std::abs(w.expectation.imag()) < 1e-12);
        CHECK(std::abs(w.conditional_given_v - 1.0) < 1e-12);
        CHECK(w.max_conditional_dev < 1e-12);
        CHECK(std::abs(w.two_point - (1.0 - 1.0 / q) * w.v_probability) < 1e-12);

        // beta large: every plaquette satisfied and open, E[W] -> 1.
        WilsonExact cold = wilson_exact(sq, 2, q, 12.0, gamma);
        CHECK(cold.expectation.real() > 0.999);
    }
}

TEST_CASE("spin heat-bath chain agrees with the exact Gibbs measure") {
    Complex sq = unit_square();
    ExactGibbs gibbs = ExactGibbs::enumerate(sq, 2, 1.0, 2);
    Fq F2(2);
    double exact_sat = 0;
    for (uint64_t s = 0; s < gibbs.size(); ++s)
        if (coboundary_value(sq, 2, gibbs.decode(s), 0, F2) == 0) exact_sat += gibbs.prob(s);

    PltgGlauberChain chain(sq, 2, 1.0, 2, 5, 0);
    for (int b = 0; b < 200; ++b) chain.sweep();
    uint64_t n = 40000, sat = 0;
    for (uint64_t t = 0; t < n; ++t) {
        chain.sweep();
        sat += coboundary_value(sq, 2, chain.spins(), 0, F2) == 0;
    }
    double est = static_cast<double>(sat) / n;
    CHECK(std::abs(est - exact_sat) < 5 * std::sqrt(exact_sat * (1 - exact_sat) / n));
}

TEST_CASE("nonlocal cluster moves dominate above the self-dual point") {
    // d = 2i = 4 torus, q = 3, p above the self-dual point: most redrawn
    // cochains are cohomologically nontrivial. Loose trend check.
    Complex T = Complex::torus(4, 3, 3);
    Fq F3(3);
    SwChain chain(T, 2, 0.85, 3, 11, 0);
    SparseMatFq delta = T.boundary_matrix(1, F3).transpose();
    for (int b = 0; b < 50; ++b) chain.step();
    int n = 150, nontrivial = 0;
    for (int t = 0; t < n; ++t) {
        chain.step();
        SparseVec fv;
        const auto& f = chain.spins();
        for (uint32_t c = 0; c < f.values.size(); ++c)
            if (f.values[c]) fv.nz.emplace_back(c, f.values[c]);
        if (!solve(F3, delta, fv).has_value()) ++nontrivial;
    }
    CHECK(static_cast<double>(nontrivial) / n > 0.8);
}

TEST_CASE("cell serialization round trip") {
    CellId c{{2, -1, 0}, 0b101u};
    std::string js = Complex::cell_to_json(c);
    CHECK(js == "{\"base\":[2,-1,0],\"dirs\":[1,3]}");
    CHECK(Complex::cell_from_json(js) == c);
    CHECK_THROWS(Complex::cell_from_json("{\"base\":[0,0],\"dirs\":[5]}"));
}

TEST_CASE("straight torus cycles wrap the requested axes") {
    Fq F3(3);
    Complex T = Complex::torus(2, 3, 2);
    Chain wrap = axis_cycle(T, {0}, {0, 1}, F3);
    CHECK(wrap.v.nz.size() == 3);
    // A cycle: zero boundary.
    CHECK(T.boundary_matrix(1, F3).mul_vec(F3, wrap.v).empty());

    // A cocycle on the full torus takes the same value on parallel wraps
    // (they are homologous), and homologically independent wraps can differ.
    Rng rng(3, 1);
    std::vector<uint8_t> all_open(T.cell_count(1), 1);
    Chain wrap_shifted = axis_cycle(T, {0}, {0, 2}, F3);
    for (int t = 0; t < 20; ++t) {
        SpinCochain f = couple_cocycle(T, 1, all_open, F3, rng);
        CHECK(wilson_value(f, wrap, F3) == wilson_value(f, wrap_shifted, F3));
    }

    Complex T3 = Complex::torus(3, 2, 3);
    Chain sheet = axis_cycle(T3, {0, 1}, {0, 0, 0}, F3);
    CHECK(sheet.v.nz.size() == 4);
    CHECK(T3.boundary_matrix(2, F3).mul_vec(F3, sheet.v).empty());
}

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "prcm/complex.hpp"
#include "prcm/homology.hpp"
#include "prcm/rcm.hpp"
#include "prcm/rng.hpp"

namespace prcm {

// Spin state of q-state lattice gauge theory: one F_q value per (i-1)-cell
// in its canonical orientation.
struct SpinCochain {
    std::vector<uint32_t> values;
};

// delta f evaluated on one i-plaquette: f applied to its signed boundary.
uint32_t coboundary_value(const Complex& X, int i, const SpinCochain& f, uint32_t plaq,
                          const Fq& F);

// H(f) = -#{plaquettes with delta f = 0}; the Gibbs weight is e^{-beta H}.
long hamiltonian(const Complex& X, int i, const SpinCochain& f, const Fq& F);

// Exhaustive Gibbs table over all q^{#(i-1)-cells} spin states. States are
// indexed by base-q digit strings over the (i-1)-cells.
class ExactGibbs {
public:
    static constexpr double kMaxStates = 1 << 20;
    static ExactGibbs enumerate(const Complex& X, int i, double beta, uint32_t q);

    uint64_t size() const { return prob_.size(); }
    double prob(uint64_t state) const { return prob_[state]; }
    const std::vector<double>& table() const { return prob_; }
    double partition_sum() const { return Z_; }
    SpinCochain decode(uint64_t state) const;
    uint64_t encode(const SpinCochain& f) const;

private:
    uint32_t q_ = 2;
    uint32_t n_cells_ = 0;
    std::vector<double> prob_;
    double Z_ = 0;
};

// One half of the joint update: open each satisfied plaquette independently
// with probability p; unsatisfied plaquettes stay closed.
PlaquetteConfig couple_sample(const Complex& X, int i, const SpinCochain& f, double p,
                              const Fq& F, Rng& rng);

// The other half: a uniformly random cochain among those vanishing on the
// boundary of every open plaquette, drawn as a random combination of the
// deterministic kernel basis. For i = 1 this specializes to independent
// uniform spins per connected component of the open graph.
SpinCochain couple_cocycle(const Complex& X, int i, const std::vector<uint8_t>& open,
                           const Fq& F, Rng& rng);

// Plaquette Swendsen-Wang dynamics: alternate couple_sample / couple_cocycle.
// The spin marginal is the lattice gauge Gibbs measure at beta = -log(1-p);
// the plaquette half is the matching random-cluster measure.
class SwChain {
public:
    SwChain(const Complex& X, int i, double p, uint32_t q, uint64_t seed, uint64_t stream);

    void step();
    const SpinCochain& spins() const { return f_; }
    const std::vector<uint8_t>& last_plaquettes() const { return last_open_; }
    const Complex& complex() const { return X_; }

private:
    const Complex& X_;
    int i_;
    double p_;
    Fq F_;
    Rng rng_;
    SpinCochain f_;
    std::vector<uint8_t> last_open_;
};

// Local heat-bath dynamics on spins: resamples one (i-1)-cell from its exact
// conditional. Cheap per step on large complexes where the cluster update's
// kernel computation would dominate.
class PltgGlauberChain {
public:
    PltgGlauberChain(const Complex& X, int i, double beta, uint32_t q, uint64_t seed,
                     uint64_t stream);

    void sweep();
    const SpinCochain& spins() const { return f_; }

private:
    const Complex& X_;
    int i_;
    double beta_;
    Fq F_;
    Rng rng_;
    SpinCochain f_;
    std::vector<std::vector<std::pair<uint32_t, int>>> cofaces_; // per (i-1)-cell
    std::vector<std::vector<std::pair<uint32_t, int>>> faces_;   // per i-cell
};

// Wilson variable: f evaluated on a cycle, as an F_q value and as the
// corresponding complex root of unity.
uint32_t wilson_value(const SpinCochain& f, const Chain& gamma, const Fq& F);
std::complex<double> root_of_unity(uint32_t value, uint32_t q);

// Axis-aligned hyperrectangle loop: the boundary of [0,n1]x...x[0,ni] spanned
// by `axes`, translated to `corner`. Area is the plaquette count of the flat
// spanning disk, perimeter the support size of the boundary cycle.
struct LoopSpec {
    std::vector<int32_t> corner;
    std::vector<int> axes;
    std::vector<int> dims;
};

std::vector<uint32_t> loop_disk_cells(const Complex& X, int i, const LoopSpec& loop);
Chain loop_boundary_cycle(const Complex& X, int i, const LoopSpec& loop, const Fq& F);
uint64_t loop_area(const LoopSpec& loop);
uint64_t loop_perimeter(const Complex& X, int i, const LoopSpec& loop);

// A straight giant (i-1)-cycle of the torus wrapping the given axes through
// `through`: the cellwise product of full circles along those axes.
Chain axis_cycle(const Complex& torus, const std::vector<int>& axes,
                 const std::vector<int32_t>& through, const Fq& F);

// Exact joint enumeration of the coupled measure on tiny complexes, with the
// observables needed by the identity checks.
struct CouplingTables {
    std::vector<double> spin_marginal;      // indexed like ExactGibbs
    std::vector<double> plaquette_marginal; // indexed by open-set mask
    double tv_spin_vs_gibbs = 0;
    double tv_plaquette_vs_rcm = 0;
};
CouplingTables enumerate_coupling(const Complex& X, int i, uint32_t q, double beta);

// Exact Wilson observables on tiny complexes by joint enumeration.
struct WilsonExact {
    std::complex<double> expectation;     // E[W_gamma]
    double v_probability = 0;             // mu(V_gamma)
    double conditional_given_v = 0;       // E[W | V] (real part; should be 1)
    double max_conditional_dev = 0;       // sup-norm gap of (W | not V) from uniform
    double two_point = 0;                 // nu(W=1) - 1/q
};
WilsonExact wilson_exact(const Complex& X, int i, uint32_t q, double beta, const Chain& gamma);

} // namespace prcm

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "prcm/complex.hpp"
#include "prcm/linalg.hpp"
#include "prcm/rng.hpp"

using namespace prcm;

namespace {

SparseMatFq random_matrix(Rng& rng, const Fq& F, uint32_t rows, uint32_t cols, double density) {
    SparseMatFq A(rows, cols);
    for (uint32_t c = 0; c < cols; ++c)
        for (uint32_t r = 0; r < rows; ++r)
            if (rng.uniform() < density)
                A.set(r, c, 1 + static_cast<uint32_t>(rng.below(F.modulus() - 1)));
    return A;
}

SparseVec random_vec(Rng& rng, const Fq& F, uint32_t n, double density) {
    SparseVec v;
    for (uint32_t i = 0; i < n; ++i)
        if (rng.uniform() < density)
            v.nz.emplace_back(i, 1 + static_cast<uint32_t>(rng.below(F.modulus() - 1)));
    return v;
}

} // namespace

TEST_CASE("field arithmetic") {
    Fq F(5);
    CHECK(F.add(3, 4) == 2);
    CHECK(F.sub(1, 3) == 3);
    CHECK(F.mul(3, 4) == 2);
    for (uint32_t a = 1; a < 5; ++a) CHECK(F.mul(a, F.inv(a)) == 1);
    CHECK(F.from_int(-1) == 4);
    CHECK_THROWS(Fq(4));
    CHECK_THROWS(Fq(1));
    CHECK(Fq::is_prime(2));
    CHECK(Fq::is_prime(101));
    CHECK(!Fq::is_prime(91));
}

TEST_CASE("rank of simple matrices") {
    Fq F3(3);
    SparseMatFq I(2, 2);
    I.set(0, 0, 1);
    I.set(1, 1, 1);
    CHECK(rank(F3, I) == 2);

    SparseMatFq Z(4, 3);
    CHECK(rank(F3, Z) == 0);
}

TEST_CASE("rank of a torus edge boundary matrix matches the dense oracle") {
    Fq F2(2);
    Complex T = Complex::torus(2, 2, 2);
    SparseMatFq A = T.boundary_matrix(1, F2);
    CHECK(A.rows == 4);
    CHECK(A.cols == 8);
    CHECK(dense_rank(F2, A) == 3); // brute-force oracle
    CHECK(rank(F2, A) == 3);
}

TEST_CASE("kernel basis") {
    Fq F2(2);
    SparseMatFq I(3, 3);
    for (uint32_t i = 0; i < 3; ++i) I.set(i, i, 1);
    CHECK(kernel_basis(F2, I).empty());

    SparseMatFq A(1, 2);
    A.set(0, 0, 1);
    A.set(0, 1, 1);
    auto basis = kernel_basis(F2, A);
    REQUIRE(basis.size() == 1);
    CHECK(basis[0].at(0) == 1);
    CHECK(basis[0].at(1) == 1);

    Complex T = Complex::torus(2, 2, 2);
    SparseMatFq B = T.boundary_matrix(1, F2);
    CHECK(kernel_basis(F2, B).size() == 8 - 3); // rank-nullity with brute-forced rank
}

TEST_CASE("kernel vectors are kernel vectors and deterministic") {
    Rng rng(20240601, 0);
    for (uint32_t qv : {2u, 3u, 5u}) {
        Fq F(qv);
        for (int t = 0; t < 30; ++t) {
            SparseMatFq A = random_matrix(rng, F, 6 + t % 5, 8 + t % 7, 0.3);
            auto basis = kernel_basis(F, A);
            CHECK(rank(F, A) + basis.size() == A.cols); // rank-nullity
            for (const auto& v : basis) CHECK(A.mul_vec(F, v).empty());
            auto again = kernel_basis(F, A);
            REQUIRE(again.size() == basis.size());
            for (size_t i = 0; i < basis.size(); ++i) CHECK(again[i].nz == basis[i].nz);
        }
    }
}

TEST_CASE("solve") {
    Fq F5(5);
    SparseMatFq I(4, 4);
    for (uint32_t i = 0; i < 4; ++i) I.set(i, i, 1);
    SparseVec b;
    b.nz = {{1, 2}, {3, 4}};
    auto x = solve(F5, I, b);
    REQUIRE(x.has_value());
    CHECK(x->nz == b.nz);

    auto zero = solve(F5, I, SparseVec{});
    REQUIRE(zero.has_value());
    CHECK(zero->empty());
}

TEST_CASE("solve on random consistent systems, inconsistency detection") {
    Rng rng(7, 1);
    Fq F5(5);
    int inconsistent_seen = 0;
    for (int t = 0; t < 100; ++t) {
        SparseMatFq A = random_matrix(rng, F5, 7, 9, 0.25);
        SparseVec x0 = random_vec(rng, F5, 9, 0.4);
        SparseVec b = A.mul_vec(F5, x0);
        auto x = solve(F5, A, b);
        REQUIRE(x.has_value());
        CHECK(A.mul_vec(F5, *x).nz == b.nz);

        // Inconsistent iff the augmented matrix has larger rank.
        SparseVec r = random_vec(rng, F5, 7, 0.4);
        SparseMatFq Aug = A;
        Aug.cols += 1;
        Aug.col.push_back(r);
        bool solvable = solve(F5, A, r).has_value();
        CHECK(solvable == (rank(F5, Aug) == rank(F5, A)));
        if (!solvable) ++inconsistent_seen;
    }
    CHECK(inconsistent_seen > 0);
}

TEST_CASE("sparse rank agrees with dense oracle on random matrices") {
    Rng rng(99, 3);
    for (uint32_t qv : {2u, 3u, 5u}) {
        Fq F(qv);
        for (int t = 0; t < 40; ++t) {
            SparseMatFq A = random_matrix(rng, F, 10, 12, 0.2 + 0.05 * (t % 5));
            CHECK(rank(F, A) == dense_rank(F, A));
        }
    }
}

TEST_CASE("incremental rank tracker") {
    Fq F3(3);
    RankTracker tr(F3, 5);

    SparseVec v;
    v.nz = {{2, 1}};
    CHECK(tr.rank_with(v) == 1); // nonzero column into empty state
    tr.add(0, v);
    CHECK(tr.rank() == 1);
    CHECK(tr.rank_with(v) == 1); // duplicate column adds nothing

    SUBCASE("random add/remove sequences match full recompute") {
        Complex T = Complex::torus(2, 3, 2);
        SparseMatFq A = T.boundary_matrix(1, F3);
        Rng rng(4242, 0);
        RankTracker tracker(F3, A.rows);
        std::vector<uint32_t> present;
        for (int step = 0; step < 1000; ++step) {
            if (present.empty() || (present.size() < A.cols && rng.uniform() < 0.55)) {
                uint32_t c;
                do {
                    c = static_cast<uint32_t>(rng.below(A.cols));
                } while (std::find(present.begin(), present.end(), c) != present.end());
                tracker.add(c, A.col[c]);
                present.push_back(c);
            } else {
                size_t k = rng.below(present.size());
                tracker.remove(present[k]);
                present.erase(present.begin() + k);
            }
            CHECK(tracker.rank() == rank_of_columns(F3, A, present));
        }
    }
}

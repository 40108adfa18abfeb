#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ramconn/localdata.hpp"

#include <random>

using namespace ramconn;

namespace {

Scalar rand_scalar(const FieldPtr& f, std::mt19937_64& rng, int nb = 5, int db = 3) {
    std::uniform_int_distribution<int> num(-nb, nb);
    std::uniform_int_distribution<int> den(1, db);
    std::vector<Rat> c(f->dim());
    for (auto& q : c) q = Rat(num(rng), den(rng));
    return Scalar(f, c);
}

Exponent random_generic_exponent(const FieldPtr& f, unsigned r, unsigned m, std::mt19937_64& rng) {
    std::vector<Scalar> c;
    for (unsigned l = 0; l < m * r - r + 1; ++l) c.push_back(rand_scalar(f, rng));
    if (r >= 2 && c[1].is_zero()) c[1] = f->one();
    return Exponent(r, m, std::move(c));
}

SeriesMat random_data_gauge(const FieldPtr& f, unsigned r, unsigned m, std::mt19937_64& rng) {
    SeriesMat g(r, SeriesVec(r, TruncSeries(f, RingParams{1, m})));
    for (unsigned i = 0; i < r; ++i)
        for (unsigned j = 0; j < r; ++j)
            for (unsigned t = 0; t < m; ++t) {
                if (i < j && t == 0) continue; // filtration pattern
                g[i][j].set_coeff(t, rand_scalar(f, rng, 3, 2));
            }
    // lower-triangular constant part: nonzero diagonal keeps it invertible
    for (unsigned i = 0; i < r; ++i) g[i][i].set_coeff(0, rand_scalar(f, rng, 2, 2) + f->from_int(3));
    return g;
}

std::vector<TruncSeries> random_units(const FieldPtr& f, unsigned r, unsigned W, std::mt19937_64& rng) {
    std::vector<TruncSeries> us;
    RingParams p{r, W};
    for (unsigned k = 0; k < r; ++k) {
        TruncSeries u(f, p);
        for (unsigned t = 0; t < W; ++t) u.set_coeff(t, rand_scalar(f, rng, 2, 2));
        u.set_coeff(0, rand_scalar(f, rng, 2, 2) + f->from_int(3)); // nonzero constant term
        us.push_back(u);
    }
    return us;
}

} // namespace

TEST_CASE("model data verifies for several (r, m)") {
    std::mt19937_64 rng(2024);
    for (unsigned r : {1u, 2u, 3u}) {
        auto f = Field::cyclotomic(r == 3 ? 3 : 1);
        for (unsigned m : {2u, 3u}) {
            Exponent nu = random_generic_exponent(f, r, m, rng);
            LocalRamifiedData d = model_local_data(nu);
            VerifyReport rep = verify(d);
            INFO("r=", r, " m=", m);
            for (const auto& c : rep.checks) {
                INFO(c.name, " ", c.witness);
                CHECK(c.status == CheckStatus::Pass);
            }
            CHECK(same_orbit_exact(d.exponents[0], nu));
        }
    }
}

TEST_CASE("gauged data still verifies") {
    std::mt19937_64 rng(77);
    for (unsigned r : {2u, 3u}) {
        auto f = Field::cyclotomic(r == 3 ? 3 : 1);
        unsigned m = 2;
        for (int it = 0; it < 4; ++it) {
            Exponent nu = random_generic_exponent(f, r, m, rng);
            LocalRamifiedData d = model_local_data(nu);
            SeriesMat g = random_data_gauge(f, r, m, rng);
            auto us = random_units(f, r, d.window(), rng);
            LocalRamifiedData gd = data_gauge(d, g, us);
            VerifyReport rep = verify(gd);
            for (const auto& c : rep.checks) {
                INFO(c.name, " ", c.witness);
                CHECK(c.status == CheckStatus::Pass);
            }
        }
    }
}

TEST_CASE("build_from_formal in a transformed chart") {
    std::mt19937_64 rng(99);
    auto q = Field::rationals();
    Exponent nu = random_generic_exponent(q, 2, 3, rng);
    FormalConnection conn = pushforward_ramified(nu, nu.m + 1);
    // change basis by a constant invertible matrix and push the chart along
    SeriesMat g(2, SeriesVec(2, TruncSeries(q, RingParams{1, conn.M})));
    g[0][0].set_coeff(0, q->from_int(2));
    g[0][1].set_coeff(0, q->from_int(1));
    g[1][0].set_coeff(0, q->from_int(1));
    g[1][1].set_coeff(0, q->from_int(1));
    FormalConnection conj = gauge_transform(conn, g);
    // new chart: psi'_l = pi(g e_l) = sum_j g_{jl} w^j
    RingParams wp{2, 2 * nu.m};
    SeriesVec chart(2, TruncSeries(q, wp));
    for (unsigned l = 0; l < 2; ++l)
        for (unsigned j = 0; j < 2; ++j)
            for (unsigned t = 0; t < conn.M && 2 * t + j < wp.trunc; ++t)
                chart[l].set_coeff(2 * t + j, g[j][l].coeff(t));
    LocalRamifiedData d = build_from_formal(conj, chart);
    VerifyReport rep = verify(d);
    for (const auto& c : rep.checks) {
        INFO(c.name, " ", c.witness);
        CHECK(c.status == CheckStatus::Pass);
    }
    CHECK(same_orbit_exact(d.exponents[0], nu));
    // NotIso on a degenerate chart
    SeriesVec bad(2, TruncSeries(q, wp));
    bad[0] = TruncSeries::monomial(q, wp, 0, q->one());
    bad[1] = TruncSeries::monomial(q, wp, 0, q->from_int(2)); // both land on w^0
    CHECK_THROWS_WITH_AS((void)build_from_formal(conj, bad), doctest::Contains("NotIso"), Error);
}

TEST_CASE("verify flags exactly the broken check") {
    std::mt19937_64 rng(3);
    auto q = Field::rationals();
    Exponent nu = random_generic_exponent(q, 3, 2, rng);
    LocalRamifiedData base = model_local_data(nu);

    auto expect_single = [&](LocalRamifiedData d, const std::string& name) {
        VerifyReport rep = verify(d);
        auto failed = rep.failed_names();
        INFO("expected ", name);
        REQUIRE(failed.size() == 1);
        CHECK(failed[0] == name);
    };

    SUBCASE("exponent chain drop") {
        LocalRamifiedData d = base;
        d.exponents[1] = d.exponents[0]; // missing + dw/w
        expect_single(d, "exponent_chain");
    }
    SUBCASE("phi order two") {
        LocalRamifiedData d = base;
        d.phi[1] = d.phi[1].shift_w(1); // w -> w^2
        expect_single(d, "phi_image");
    }
    SUBCASE("phi order zero") {
        LocalRamifiedData d = base;
        d.phi[0] = TruncSeries::monomial(q, RingParams{d.r, d.window()}, 0, q->one());
        expect_single(d, "phi_image");
    }
    SUBCASE("phi unit perturbation breaks its diagram only") {
        LocalRamifiedData d = base;
        TruncSeries one_plus_w(q, RingParams{d.r, d.window()});
        one_plus_w.set_coeff(0, q->one());
        one_plus_w.set_coeff(1, q->one());
        d.phi[1] = d.phi[1] * one_plus_w;
        expect_single(d, "diagram_phi");
    }
    SUBCASE("connection entry perturbation breaks the nabla diagram") {
        LocalRamifiedData d = base;
        d.A[1][0].set_coeff(0, d.A[1][0].coeff(0) + q->one());
        expect_single(d, "diagram_nabla");
    }
    SUBCASE("off-pattern connection entry breaks filtration invariance") {
        LocalRamifiedData d = base;
        d.A[0][2].set_coeff(0, q->one());
        expect_single(d, "filtration_invariance");
    }
    SUBCASE("torsion violation") {
        LocalRamifiedData d = base;
        d.pi[2][0].set_coeff(0, q->one());
        expect_single(d, "pi_torsion");
    }
    SUBCASE("surjectivity violation") {
        LocalRamifiedData d = base;
        for (unsigned l = 0; l < d.r; ++l) d.pi[1][l] = d.pi[1][l].shift_w(1);
        expect_single(d, "pi_surjectivity");
    }
}

TEST_CASE("kernel_Pi length is r(r-1)/2") {
    std::mt19937_64 rng(55);
    for (unsigned r : {1u, 2u, 3u, 4u}) {
        auto f = Field::cyclotomic(r <= 2 ? std::max(r, 1u) : r);
        for (unsigned m : {2u, 3u}) {
            Exponent nu = random_generic_exponent(f, r, m, rng);
            LocalRamifiedData d = model_local_data(nu);
            KernelPi k = kernel_Pi(d);
            INFO("r=", r, " m=", m);
            CHECK(k.length == r * (r - 1) / 2);
            CHECK(k.basis.size() == k.length);
        }
    }
}

TEST_CASE("reconstruct_check on models and gauged data") {
    std::mt19937_64 rng(202);
    for (unsigned r : {2u, 3u}) {
        auto f = Field::cyclotomic(r == 3 ? 3 : 1);
        for (unsigned m : {2u, 3u}) {
            if (r == 3 && m == 3) continue;
            Exponent nu = random_generic_exponent(f, r, m, rng);
            LocalRamifiedData d = model_local_data(nu);
            ReconstructOutcome out = reconstruct_check(d);
            INFO("r=", r, " m=", m, " detail: ", out.detail);
            CHECK(out.ok);
            CHECK(same_orbit_mod_int_shift(out.recovered, d.exponents[0]));
            // gauge-randomized instance
            SeriesMat g = random_data_gauge(f, r, m, rng);
            auto us = random_units(f, r, d.window(), rng);
            LocalRamifiedData gd = data_gauge(d, g, us);
            ReconstructOutcome gout = reconstruct_check(gd);
            INFO("gauged detail: ", gout.detail);
            CHECK(gout.ok);
            CHECK(same_orbit_mod_int_shift(gout.recovered, nu));
        }
    }
}

TEST_CASE("reconstruct_check rejects c1 = 0") {
    auto q = Field::rationals();
    Exponent nu(2, 2, {q->one(), q->one(), q->zero()});
    LocalRamifiedData d = model_local_data(nu);
    d.exponents[0].c[1] = q->zero();
    d.exponents[1].c[1] = q->zero();
    CHECK_THROWS_WITH_AS((void)reconstruct_check(d), doctest::Contains("C1Zero"), Error);
}

TEST_CASE("inconsistent quotient data is a legal reconstruct outcome") {
    auto q = Field::rationals();
    Exponent nu(2, 2, {q->one(), q->one(), q->from_rat(Rat(-1, 4))});
    LocalRamifiedData d = model_local_data(nu);
    // killing pi_0(f_1) leaves no connection compatible with the diagrams:
    // the odd w-part of nu cannot be produced by even series alone
    LocalRamifiedData empty = d;
    empty.pi[0][1] = TruncSeries(q, empty.pi[0][1].params());
    CHECK_THROWS_WITH_AS((void)reconstruct_check(empty), doctest::Contains("EmptySolutionSet"), Error);
    // a compatible-but-wrong quotient solves, then fails the exponent match
    LocalRamifiedData off = d;
    off.pi[0][1].set_coeff(2, off.pi[0][1].coeff(2) + q->one());
    ReconstructOutcome out = reconstruct_check(off);
    CHECK(!out.ok);
}

TEST_CASE("rank-1 data is trivial and verifies") {
    auto q = Field::rationals();
    Exponent nu(1, 3, {q->from_int(2), q->from_int(-1), q->from_rat(Rat(1, 2))});
    LocalRamifiedData d = model_local_data(nu);
    CHECK(verify(d).all_pass());
    CHECK(kernel_Pi(d).length == 0);
    ReconstructOutcome out = reconstruct_check(d);
    CHECK(out.ok);
}

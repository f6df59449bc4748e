#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "msr/params.hpp"

using msr::CodeParams;
using msr::derive_params;
using msr::Field;
using msr::gf_elem;
using msr::select_field;
using msr::ThetaTable;

TEST_CASE("derive_params on known instances") {
    const CodeParams a = derive_params(6, 3, 4);
    CHECK(a.q == 2);
    CHECK(a.t == 3);
    CHECK(a.delta == 0);
    CHECK(a.alpha == 8);
    CHECK(a.beta == 4);
    CHECK(a.r == 3);

    const CodeParams b = derive_params(5, 2, 3); // shortened
    CHECK(b.q == 2);
    CHECK(b.t == 3);
    CHECK(b.delta == 1);
    CHECK(b.n_base == 6);

    const CodeParams c = derive_params(8, 4, 7);
    CHECK(c.q == 4);
    CHECK(c.t == 2);
    CHECK(c.delta == 0);
    CHECK(c.alpha == 16);
    CHECK(c.beta == 4);
    CHECK(c.w == 3);

    CHECK(derive_params(4, 2, 3).w == 1);
}

TEST_CASE("derive_params rejects unsupported shapes") {
    CHECK_THROWS_AS(derive_params(10, 5, 9), msr::param_error);  // d = k+5
    CHECK_THROWS_AS(derive_params(6, 5, 6), msr::param_error);   // d > n-1
    CHECK_THROWS_AS(derive_params(6, 6, 7), msr::param_error);   // k = n
    CHECK_THROWS_AS(derive_params(6, 0, 1), msr::param_error);   // k < 1

    // the smallest shortened shape is fine: t = ceil(3/2) = 2
    const CodeParams tiny = derive_params(3, 1, 2);
    CHECK(tiny.t == 2);
    CHECK(tiny.delta == 1);
}

TEST_CASE("derived identities hold across a parameter sweep") {
    for (int n = 4; n <= 14; ++n)
        for (int k = 1; k < n; ++k)
            for (int d = k + 1; d <= std::min(n - 1, k + 3); ++d) {
                CodeParams p;
                try {
                    p = derive_params(n, k, d);
                } catch (const msr::param_error&) {
                    continue; // t < 2 shapes
                }
                // alpha = q^ceil(n/q), the sub-packetization the bound demands
                std::uint64_t expect = 1;
                for (int i = 0; i < (n + p.q - 1) / p.q; ++i) expect *= p.q;
                CHECK(p.alpha == expect);
                CHECK(p.alpha == p.beta * p.q); // MSR point: alpha = (d-k+1) beta
                CHECK(p.k + p.r + p.delta == p.n_base);
                CHECK(p.r >= p.q);
            }
}

TEST_CASE("select_field follows the size recipe") {
    CHECK(select_field(2, 2) == 4);  // 16 >= 14 and |G|=5 > 2
    CHECK(select_field(3, 2) == 6);  // 64 >= 38 and |G|=21 > 6
    CHECK(select_field(2, 3) == 6);  // 16 < 20, odd m=5 skipped, so 64

    CHECK_THROWS_AS(select_field(2, 20000), msr::param_error); // beyond GF(2^16)
    CHECK_THROWS_AS(derive_params(60, 57, 58), msr::param_error); // alpha = 2^30 too large

    for (int q = 2; q <= 4; ++q)
        for (int t = 2; t <= 6; ++t) {
            const int m = select_field(q, t);
            const std::uint64_t Q = 1ull << m;
            const int w = q == 2 ? 1 : 3;
            CHECK(m % 2 == 0);
            CHECK(Q >= (q == 2 ? 6ull * t + 2 : 18ull * t + 2));
            CHECK((Q - 1) / 3 > static_cast<std::uint64_t>(w) * t);
        }
}

TEST_CASE("theta assignment realizes the per-section matrices") {
    SECTION("q=2") {
        const CodeParams p = derive_params(6, 3, 4);
        Field f(p.m);
        const ThetaTable tt = assign_thetas(p, f);
        for (int y = 0; y < p.t; ++y) {
            // column x of row z_y: theta(1, y, 0) = gamma * theta_{1,y}
            CHECK(tt.theta(1, y, 0) == f.mul(tt.gamma(), tt.theta_base(1, y)));
            CHECK(tt.theta(0, y, 1) == tt.theta_base(1, y));
        }
    }
    SECTION("q=4") {
        const CodeParams p = derive_params(8, 4, 7);
        Field f(p.m);
        const ThetaTable tt = assign_thetas(p, f);
        for (int y = 0; y < p.t; ++y) {
            CHECK(tt.theta(3, y, 2) == f.mul(tt.gamma(), tt.theta_base(1, y)));
            CHECK(tt.theta(2, y, 3) == tt.theta_base(1, y));
        }
    }
    SECTION("diagonal is constant per section") {
        for (auto [n, k, d] : {std::array{6, 3, 4}, {6, 3, 5}, {8, 4, 7}}) {
            const CodeParams p = derive_params(n, k, d);
            Field f(p.m);
            const ThetaTable tt = assign_thetas(p, f);
            for (int y = 0; y < p.t; ++y)
                for (int x = 0; x < p.q; ++x)
                    CHECK(tt.theta(x, y, x) == tt.theta_base(0, y));
        }
    }
}

TEST_CASE("all four table invariants hold for every supported (q, t)") {
    for (int q = 2; q <= 4; ++q)
        for (int t = 2; t <= 6; ++t) {
            const int n = q * t;
            const int k = n - q;        // r = q, the smallest supported
            const int d = k + q - 1;
            const CodeParams p = derive_params(n, k, d);
            REQUIRE(p.q == q);
            REQUIRE(p.t == t);
            Field f(p.m);
            const ThetaTable tt = assign_thetas(p, f);
            CHECK_FALSE(tt.check_diagonal());
            CHECK_FALSE(tt.check_reciprocity());
            CHECK_FALSE(tt.check_per_node_distinct());
            CHECK_FALSE(tt.check_global_distinct());
        }
}

TEST_CASE("gamma coefficient rule") {
    const CodeParams p = derive_params(8, 4, 7);
    Field f(p.m);
    const ThetaTable tt = assign_thetas(p, f);
    CHECK(tt.gamma_coeff(1, 2) == tt.gamma());
    CHECK(tt.gamma_coeff(2, 2) == 0);
    CHECK(tt.gamma_coeff(3, 1) == 1);
    CHECK(tt.gamma() != 0);
    CHECK(tt.gamma() != 1);
}

TEST_CASE("corrupted tables fail their invariant checks") {
    const CodeParams p = derive_params(6, 3, 5); // q=3
    Field f(p.m);
    ThetaTable tt = assign_thetas(p, f);

    ThetaTable dup = tt;
    dup.corrupt_base(2, 0, dup.theta_base(1, 0)); // duplicate theta within a section
    CHECK(dup.check_invariants().has_value());

    ThetaTable diag = tt;
    diag.corrupt_entry(1, 0, 1, f.add(diag.theta(1, 0, 1), 1));
    CHECK(diag.check_diagonal().has_value());

    // theta_0 forced into G (index 0 of the subgroup is 1 = lambda^0)
    ThetaTable coset = tt;
    coset.corrupt_base(0, 0, coset.theta_base(1, 0));
    CHECK(coset.check_invariants().has_value());
}

TEST_CASE("field mismatch is rejected") {
    const CodeParams p = derive_params(6, 3, 4); // m = 6
    Field wrong(4);
    CHECK_THROWS_AS(assign_thetas(p, wrong), msr::param_error);
}

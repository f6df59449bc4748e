#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "msr/codec.hpp"
#include "msr/verify.hpp"

using msr::CodeParams;
using msr::Codeword;
using msr::derive_params;
using msr::ErasureState;
using msr::Field;
using msr::gf_elem;
using msr::plane_t;
using msr::RepairResult;
using msr::ThetaTable;

namespace {

struct Instance {
    CodeParams p;
    Field f;
    ThetaTable tt;
    explicit Instance(int n, int k, int d)
        : p(derive_params(n, k, d)), f(p.m), tt(assign_thetas(p, f)) {}
};

std::vector<gf_elem> random_message(const Instance& in, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint32_t> dist(0, in.f.order());
    std::vector<gf_elem> msg(static_cast<std::size_t>(in.p.k) * in.p.alpha);
    for (auto& v : msg) v = static_cast<gf_elem>(dist(rng));
    return msg;
}

// all size-k subsets of [0, n)
std::vector<std::vector<int>> subsets(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

} // namespace

TEST_CASE("MSR identities on derived parameters") {
    for (auto [n, k, d] : {std::array{4, 2, 3}, {6, 3, 4}, {5, 2, 3}, {6, 2, 3}, {6, 3, 5},
                           {8, 4, 7}, {8, 3, 6}}) {
        const CodeParams p = derive_params(n, k, d);
        CHECK(p.alpha == static_cast<std::uint64_t>(p.d - p.k + 1) * p.beta);
        if (p.k >= 2)
            CHECK(static_cast<std::uint64_t>(p.d) * p.beta <
                  static_cast<std::uint64_t>(p.k) * p.alpha);
    }
}

TEST_CASE("encode basics") {
    Instance in(6, 3, 4);
    std::mt19937_64 rng(1);

    const std::vector<gf_elem> zeros(static_cast<std::size_t>(in.p.k) * in.p.alpha, 0);
    CHECK(msr::encode(in.p, in.tt, zeros) == Codeword(in.p));

    const Codeword cw = msr::encode(in.p, in.tt, random_message(in, rng));
    CHECK(msr::check_parity(in.tt, in.p.r, cw));

    CHECK_THROWS_AS(msr::encode(in.p, in.tt, std::vector<gf_elem>(5)), msr::param_error);
}

TEST_CASE("systematic layout and virtual nodes") {
    Instance in(5, 2, 3); // shortened: delta = 1, base node 5 is virtual
    std::mt19937_64 rng(2);
    const std::vector<gf_elem> msg = random_message(in, rng);
    const Codeword cw = msr::encode(in.p, in.tt, msg);
    for (int node = 0; node < in.p.k; ++node)
        for (plane_t z = 0; z < in.p.alpha; ++z)
            CHECK(cw.at(node, z) == msg[static_cast<std::size_t>(node) * in.p.alpha + z]);
    for (int node = in.p.n; node < in.p.n_base; ++node)
        for (plane_t z = 0; z < in.p.alpha; ++z) CHECK(cw.at(node, z) == 0);
    CHECK(msr::check_parity(in.tt, in.p.r, cw));
}

TEST_CASE("decode with no erasures returns the input") {
    Instance in(4, 2, 3);
    std::mt19937_64 rng(3);
    const Codeword cw = msr::encode(in.p, in.tt, random_message(in, rng));
    CHECK(msr::decode(in.p, in.tt, ErasureState::from_codeword(in.p, cw, {})) == cw);
}

TEST_CASE("every r-erasure pattern decodes back exactly") {
    std::mt19937_64 rng(4);
    for (auto [n, k, d] : {std::array{4, 2, 3}, {6, 3, 4}, {5, 2, 3}, {8, 3, 6}}) {
        Instance in(n, k, d);
        const Codeword cw = msr::encode(in.p, in.tt, random_message(in, rng));
        for (const auto& pattern : subsets(in.p.n, in.p.r)) {
            const Codeword got = msr::decode(in.p, in.tt,
                                             ErasureState::from_codeword(in.p, cw, pattern));
            CHECK(got == cw);
        }
    }
}

TEST_CASE("erasure shapes of the q=2, r=3 instance") {
    Instance in(6, 3, 4); // q=2, t=3, r=3
    std::mt19937_64 rng(5);
    const Codeword cw = msr::encode(in.p, in.tt, random_message(in, rng));

    SECTION("three erasures in three different sections") {
        const std::vector<int> e = {0, 3, 4}; // (0,0), (1,1), (0,2)
        CHECK(msr::decode(in.p, in.tt, ErasureState::from_codeword(in.p, cw, e)) == cw);
    }
    SECTION("two erasures sharing a section force joint plane solving") {
        const std::vector<int> e = {0, 1, 4}; // (0,0), (1,0), (0,2)
        CHECK(msr::decode(in.p, in.tt, ErasureState::from_codeword(in.p, cw, e)) == cw);
    }
}

TEST_CASE("unit message round trip") {
    Instance in(4, 2, 3);
    std::vector<gf_elem> msg(static_cast<std::size_t>(in.p.k) * in.p.alpha, 0);
    msg[0] = 1;
    const Codeword cw = msr::encode(in.p, in.tt, msg);
    for (const auto& pattern : subsets(in.p.n, in.p.r))
        CHECK(msr::decode(in.p, in.tt, ErasureState::from_codeword(in.p, cw, pattern)) == cw);
}

TEST_CASE("too many erasures are refused") {
    Instance in(6, 3, 4);
    std::mt19937_64 rng(6);
    const Codeword cw = msr::encode(in.p, in.tt, random_message(in, rng));
    const std::vector<int> four = {0, 1, 2, 3};
    CHECK_THROWS_AS(msr::decode(in.p, in.tt, ErasureState::from_codeword(in.p, cw, four)),
                    msr::unrecoverable_error);
    CHECK_THROWS_AS(msr::decode_naive(in.p, in.tt, ErasureState::from_codeword(in.p, cw, four)),
                    msr::unrecoverable_error);
}

TEST_CASE("sequential decoder agrees with the one-shot oracle") {
    std::mt19937_64 rng(7);
    const std::array<std::array<int, 3>, 5> shapes = {
        std::array{4, 2, 3}, {6, 3, 4}, {5, 2, 3}, {6, 3, 5}, {8, 4, 7}};
    int instances = 0;
    while (instances < 120) {
        const auto& s = shapes[instances % shapes.size()];
        Instance in(s[0], s[1], s[2]);
        const Codeword cw = msr::encode(in.p, in.tt, random_message(in, rng));
        std::uniform_int_distribution<int> esize(0, in.p.r);
        std::vector<int> ids(in.p.n);
        for (int i = 0; i < in.p.n; ++i) ids[i] = i;
        std::shuffle(ids.begin(), ids.end(), rng);
        ids.resize(esize(rng));
        const ErasureState st = ErasureState::from_codeword(in.p, cw, ids);
        CHECK(msr::decode(in.p, in.tt, st) == msr::decode_naive(in.p, in.tt, st));
        CHECK(msr::decode_naive(in.p, in.tt, st) == cw);
        ++instances;
    }
}

TEST_CASE("erased-column submatrix has full rank for every pattern") {
    Instance in(4, 2, 3);
    for (const auto& pattern : subsets(in.p.n, in.p.r)) {
        const msr::GfMatrix cols = msr::h_columns(in.p, in.tt, pattern);
        CHECK(msr::rank(in.f, cols) == static_cast<std::uint64_t>(pattern.size()) * in.p.alpha);
    }
}

TEST_CASE("repair rebuilds the failed node with beta symbols per helper") {
    Instance in(6, 3, 4); // d = 4: one aloof node
    std::mt19937_64 rng(8);
    const Codeword cw = msr::encode(in.p, in.tt, random_message(in, rng));

    const int failed = 2;
    std::vector<int> helpers = {0, 1, 3, 4}; // node 5 stays aloof
    const RepairResult res = msr::repair(in.p, in.tt, cw, failed, helpers);

    for (plane_t z = 0; z < in.p.alpha; ++z) CHECK(res.symbols[z] == cw.at(failed, z));
    CHECK(res.trace.aloof == std::vector<int>{5});
    CHECK(res.trace.payload.size() == helpers.size());
    const auto r_planes = msr::repair_planes(in.p, failed);
    CHECK(r_planes.size() == in.p.beta);
    for (std::size_t h = 0; h < helpers.size(); ++h) {
        REQUIRE(res.trace.payload[h].size() == in.p.beta);
        for (std::size_t i = 0; i < in.p.beta; ++i) {
            CHECK(res.trace.payload[h][i].first == r_planes[i]);
            CHECK(res.trace.payload[h][i].second == cw.at(res.trace.helpers[h], r_planes[i]));
        }
    }
}

TEST_CASE("repair never touches aloof or failed data") {
    Instance in(6, 2, 3); // r = 4, two aloof nodes
    std::mt19937_64 rng(9);
    const Codeword cw = msr::encode(in.p, in.tt, random_message(in, rng));

    const int failed = 0;
    const std::vector<int> helpers = {1, 4, 5}; // aloof = {2, 3}: both in section y=1
    Codeword withheld = cw;
    for (plane_t z = 0; z < in.p.alpha; ++z) {
        withheld.set(failed, z, 0);
        withheld.set(2, z, 0);
        withheld.set(3, z, 0);
    }
    const RepairResult res = msr::repair(in.p, in.tt, withheld, failed, helpers);
    for (plane_t z = 0; z < in.p.alpha; ++z) CHECK(res.symbols[z] == cw.at(failed, z));
    CHECK(res.trace.aloof == std::vector<int>{2, 3});
}

TEST_CASE("exhaustive repair over small instances") {
    std::mt19937_64 rng(10);
    for (auto [n, k, d] : {std::array{4, 2, 3}, {6, 2, 3}, {5, 2, 3}, {8, 3, 6}}) {
        Instance in(n, k, d);
        const Codeword cw = msr::encode(in.p, in.tt, random_message(in, rng));
        for (int failed = 0; failed < in.p.n; ++failed) {
            std::vector<int> others;
            for (int id = 0; id < in.p.n; ++id)
                if (id != failed) others.push_back(id);
            for (const auto& pick : subsets(static_cast<int>(others.size()), in.p.d)) {
                std::vector<int> helpers;
                for (int i : pick) helpers.push_back(others[i]);
                const RepairResult res = msr::repair(in.p, in.tt, cw, failed, helpers);
                CHECK(static_cast<int>(res.trace.aloof.size()) == in.p.n - in.p.d - 1);
                bool exact = true;
                for (plane_t z = 0; z < in.p.alpha; ++z)
                    exact = exact && res.symbols[z] == cw.at(failed, z);
                CHECK(exact);
            }
        }
    }
}

TEST_CASE("repair with d = n-1 helpers has no aloof nodes") {
    Instance in(4, 2, 3);
    std::mt19937_64 rng(11);
    const Codeword cw = msr::encode(in.p, in.tt, random_message(in, rng));
    for (int failed = 0; failed < in.p.n; ++failed) {
        std::vector<int> helpers;
        for (int id = 0; id < in.p.n; ++id)
            if (id != failed) helpers.push_back(id);
        const RepairResult res = msr::repair(in.p, in.tt, cw, failed, helpers);
        CHECK(res.trace.aloof.empty());
        for (plane_t z = 0; z < in.p.alpha; ++z) CHECK(res.symbols[z] == cw.at(failed, z));
    }
}

TEST_CASE("a wide instance exercises the GF(256) field and deep plane lattice") {
    Instance in(22, 19, 20); // q=2, t=11, alpha=2048, m=8
    REQUIRE(in.p.m == 8);
    std::mt19937_64 rng(13);
    const Codeword cw = msr::encode(in.p, in.tt, random_message(in, rng));
    CHECK(msr::check_parity(in.tt, in.p.r, cw));

    const std::vector<int> erased = {0, 7, 21};
    CHECK(msr::decode(in.p, in.tt, ErasureState::from_codeword(in.p, cw, erased)) == cw);

    std::vector<int> helpers;
    for (int id = 1; id <= in.p.d; ++id) helpers.push_back(id);
    const RepairResult res = msr::repair(in.p, in.tt, cw, 0, helpers);
    CHECK(res.trace.payload[0].size() == in.p.beta);
    bool exact = true;
    for (plane_t z = 0; z < in.p.alpha; ++z) exact = exact && res.symbols[z] == cw.at(0, z);
    CHECK(exact);
}

TEST_CASE("repair argument validation") {
    Instance in(5, 2, 3); // real nodes 0..4; base node 5 is virtual
    std::mt19937_64 rng(12);
    const Codeword cw = msr::encode(in.p, in.tt, random_message(in, rng));

    CHECK_THROWS_AS(msr::repair(in.p, in.tt, cw, 0, {1, 2}), msr::param_error);        // too few
    CHECK_THROWS_AS(msr::repair(in.p, in.tt, cw, 0, {1, 2, 3, 4}), msr::param_error);  // too many
    CHECK_THROWS_AS(msr::repair(in.p, in.tt, cw, 0, {0, 1, 2}), msr::param_error);     // failed helps
    CHECK_THROWS_AS(msr::repair(in.p, in.tt, cw, 0, {1, 2, 5}), msr::param_error);     // virtual helper
    CHECK_THROWS_AS(msr::repair(in.p, in.tt, cw, 5, {1, 2, 3}), msr::param_error);     // virtual failed
    CHECK_THROWS_AS(msr::repair(in.p, in.tt, cw, 0, {1, 1, 2}), msr::param_error);     // duplicate
}

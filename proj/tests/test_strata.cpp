#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "totstrat/strata.hpp"

using namespace totstrat;

namespace {

void compare_with_brute(u64 x) {
    CAPTURE(x);
    const auto res = compute_strata(x);
    const auto want = oracle::brute_strata(x);
    REQUIRE(res.v_total == want.v_total);
    REQUIRE(res.s_total == want.s_total);
    for (const auto& st : res.strata) {
        const auto it = want.strata.find(st.ell);
        if (it == want.strata.end()) {
            REQUIRE(st.v_count == 0);
            REQUIRE(st.s_sum == 0);
            REQUIRE(st.max_mult == 0);
            REQUIRE(st.histogram.empty());
        } else {
            REQUIRE(st.v_count == it->second.v);
            REQUIRE(st.s_sum == it->second.s);
            REQUIRE(st.max_mult == it->second.maxm);
            REQUIRE(st.histogram == it->second.hist);
        }
    }
    // no stratum beyond k0(x) may be populated
    for (const auto& [l, st] : want.strata) REQUIRE(l <= k0(x));
}

}  // namespace

TEST_CASE("strata agree with brute force at small scales", "[strata]") {
    for (u64 x : {2ull, 4ull, 10ull, 16ull, 100ull, 1000ull, 4096ull}) compare_with_brute(x);
}

TEST_CASE("worked stratum examples at x = 10", "[strata]") {
    const auto res = compute_strata(10);
    CHECK(res.at(1).v_count == 3);  // {2, 6, 10}
    CHECK(res.at(1).s_sum == 9);    // 3 + 4 + 2
    CHECK(res.at(2).v_count == 1);  // {4}
    CHECK(res.at(2).s_sum == 4);
    CHECK(res.at(3).v_count == 1);  // {8}
    CHECK(res.at(3).s_sum == 5);
    CHECK(res.v_total == 6);        // 1, 2, 4, 6, 8, 10
    CHECK_THROWS_AS(compute_strata(1), invalid_input);
}

TEST_CASE("stratum_stats validates ell_max and slices", "[strata]") {
    const auto res = stratum_stats(100, 3);
    CHECK(res.strata.size() == 3);
    CHECK(res.v_total == compute_strata(100).v_total);
    CHECK_THROWS_AS(stratum_stats(100, 0), invalid_input);
    CHECK_THROWS_AS(stratum_stats(100, k0(100) + 1), invalid_input);
}

TEST_CASE("per-stratum bookkeeping invariants", "[strata]") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 12; ++i) {
        const u64 x = 2 + rng() % 20000;
        CAPTURE(x);
        const auto res = compute_strata(x);
        u64 vsum = 1;  // m = 1
        for (const auto& st : res.strata) {
            u64 hv = 0, hs = 0, hmax = 0;
            for (const auto& [mult, cnt] : st.histogram) {
                hv += cnt;
                hs += mult * cnt;
                hmax = std::max(hmax, mult);
            }
            REQUIRE(hv == st.v_count);
            REQUIRE(hs == st.s_sum);
            REQUIRE(hmax == st.max_mult);
            REQUIRE(st.s_sum >= st.v_count);
            if (x >= (u64{1} << st.ell)) {
                const u64 cap = (x - ((u64{1} << st.ell))) / (u64{2} << st.ell) + 1;
                REQUIRE(st.v_count <= cap);
            } else {
                REQUIRE(st.v_count == 0);
            }
            vsum += st.v_count;
        }
        REQUIRE(res.v_total == vsum);  // partition V(x) = 1 + sum V^l(x)
        REQUIRE(res.s_total > x);      // S(x) > x
    }
}

TEST_CASE("count identity against the one-pass tally", "[strata]") {
    for (u64 x : {100ull, 1000ull, 10000ull, 100000ull}) {
        const auto res = compute_strata(x);
        const auto direct = stratum_s_direct(x);
        REQUIRE(direct[0] == 2);  // phi(n) = 1 iff n in {1, 2}
        for (const auto& st : res.strata)
            REQUIRE(direct[static_cast<std::size_t>(st.ell)] == st.s_sum);
        for (std::size_t l = res.strata.size() + 1; l < direct.size(); ++l)
            REQUIRE(direct[l] == 0);
    }
}

TEST_CASE("doubling inequality on a small grid", "[strata]") {
    for (u64 x : {16ull, 64ull, 256ull, 1024ull}) {
        const auto base = compute_strata(x);
        for (int n = 1; n <= 3; ++n) {
            const auto up = compute_strata(x << n);
            for (int l = 1; l <= std::min(6, k0(x)); ++l) {
                CAPTURE(x, l, n);
                REQUIRE((up.at(l + n).s_sum << n) >= base.at(l).s_sum);
            }
        }
    }
}

TEST_CASE("k0 via bit length", "[strata]") {
    CHECK(k0(8) == 3);
    CHECK(k0(10) == 3);
    CHECK(k0(1000000) == 19);
    CHECK(k0(2) == 1);
    CHECK_THROWS_AS(k0(1), invalid_input);
    for (u64 x = 2; x <= 70000; x += 17) {
        int slow = 0;
        while ((u64{2} << slow) <= x) ++slow;  // largest l with 2^l <= x
        REQUIRE(k0(x) == slow);
    }
    // exact at powers of two
    for (int j = 1; j < 40; ++j) {
        REQUIRE(k0(u64{1} << j) == j);
        REQUIRE(k0((u64{1} << j) + 1) == j);
        if (j > 1) REQUIRE(k0((u64{1} << j) - 1) == j - 1);
    }
}

TEST_CASE("ell_of_x exposes candidates and the restricted minimum", "[strata]") {
    const auto res16 = compute_strata(16);
    const auto e16 = ell_of_x(res16);
    REQUIRE(!e16.candidates.empty());
    REQUIRE(e16.ell >= 2);
    // candidates are exactly the strata with 2^l S^l > V
    for (const auto& st : res16.strata) {
        const bool in = e16.candidates.count(st.ell) > 0;
        REQUIRE(in == ((u128{st.s_sum} << st.ell) > res16.v_total));
    }
    const auto e4 = ell_of_x(10000);
    CHECK(e4.ell == 2);
    CHECK_THROWS_AS(ell_of_x(3), invalid_input);
}

TEST_CASE("v1_split counts multiplicity-2 and multiplicity-4 totients", "[strata]") {
    CHECK(v1_split(4) == std::pair<u64, u64>{0, 0});  // only m = 2, exceptional
    CHECK(v1_split(1002) == std::pair<u64, u64>{87, 5});

    // histogram route gives the same split, and m = 2 shows up as the lone
    // multiplicity-3 entry
    const u64 x = 10000;
    const auto res = compute_strata(x);
    const auto& h1 = res.at(1).histogram;
    const auto [m2, m4] = v1_split(x);
    CHECK(m2 == h1.at(2));
    CHECK(m4 == h1.at(4));
    CHECK(h1.at(3) == 1);
    for (const auto& [mult, cnt] : h1) REQUIRE((mult >= 2 && mult <= 4));
}

TEST_CASE("totient-range segmentation and worker counts do not change results", "[strata]") {
    const u64 x = 20000;
    const auto want = compute_strata(x);

    RunConfig seg;
    seg.segment_size = 1 << 12;
    seg.memory_cap_bytes = 2 * 16 * (u64{1} << 12) * seg.workers;  // forces many m-chunks
    const auto got = compute_strata(x, seg);
    REQUIRE(got.v_total == want.v_total);
    REQUIRE(got.s_total == want.s_total);
    for (std::size_t i = 0; i < want.strata.size(); ++i) {
        REQUIRE(got.strata[i].v_count == want.strata[i].v_count);
        REQUIRE(got.strata[i].s_sum == want.strata[i].s_sum);
        REQUIRE(got.strata[i].histogram == want.strata[i].histogram);
    }
    CHECK_THROWS_AS(compute_strata(x, seg, false), limit_exceeded);

    RunConfig w1 = RunConfig{}, w3 = RunConfig{};
    w1.workers = 1;
    w3.workers = 3;
    const auto r1 = compute_strata(x, w1);
    const auto r3 = compute_strata(x, w3);
    REQUIRE(r1.v_total == r3.v_total);
    REQUIRE(r1.s_total == r3.s_total);
    for (std::size_t i = 0; i < r1.strata.size(); ++i)
        REQUIRE(r1.strata[i].histogram == r3.strata[i].histogram);

    RunConfig lim;
    lim.sieve_limit = 1000;
    CHECK_THROWS_AS(compute_strata(x, lim), limit_exceeded);
}

TEST_CASE("attained multiplicities at small x", "[strata]") {
    CHECK(attained_multiplicities(10, 2) == std::vector<u64>{4});
    CHECK(attained_multiplicities(2, 1) == std::vector<u64>{3});  // A(2) = 3
    const auto at = attained_multiplicities(10000, 2);
    REQUIRE(!at.empty());
    CHECK(at.front() >= 2);
}

TEST_CASE("lift_totient raises the stratum and keeps multiplicity", "[strata]") {
    CHECK(lift_totient(4, 7) == 24);
    CHECK(multiplicity(24) == 10);
    CHECK(multiplicity(4) == 4);
    CHECK(lift_totient(2, 7) == 12);
    CHECK(multiplicity(12) == 6);  // {13, 21, 26, 28, 36, 42}
    CHECK_THROWS_AS(lift_totient(4, 3), invalid_input);   // 3 | 12 in phi^{-1}(4)
    CHECK_THROWS_AS(lift_totient(4, 5), invalid_input);   // 5 = 1 mod 4
    CHECK_THROWS_AS(lift_totient(3, 7), invalid_input);   // 3 is a nontotient
    CHECK_THROWS_AS(lift_totient(4, 9), invalid_input);   // 9 not prime

    // guarantee check across a sample of valid (m, p) pairs
    std::mt19937_64 rng(9);
    int tested = 0;
    while (tested < 40) {
        const u64 m = 2 * (1 + rng() % 500);
        const u64 p = 3 + 4 * (rng() % 200);
        if (!is_prime(p)) continue;
        const auto pre = inverse_phi(m);
        if (pre.empty()) continue;
        bool divides = false;
        for (u64 e : pre.elements) divides = divides || e % p == 0;
        if (divides) continue;
        const u64 lifted = lift_totient(m, p);
        REQUIRE(lifted == (p - 1) * m);
        REQUIRE(v2(lifted) == v2(m) + 1);
        REQUIRE(multiplicity(lifted) >= pre.multiplicity());
        ++tested;
    }
}

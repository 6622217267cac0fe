#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "totstrat/dickson.hpp"

using namespace totstrat;

TEST_CASE("form coefficients", "[dickson]") {
    const auto f1 = forms(1);
    CHECK(f1.f_coeffs == std::vector<u64>{30});
    CHECK(f1.g_coeffs == std::vector<u64>{30});
    const auto f2 = forms(2);
    CHECK(f2.f_coeffs == std::vector<u64>{150, 90});
    CHECK(f2.g_coeffs == std::vector<u64>{90, 150});
    const auto f3 = forms(3);
    CHECK(f3.f_coeffs == std::vector<u64>{750, 450, 270});
    CHECK(f3.g_coeffs == std::vector<u64>{270, 450, 750});
    CHECK_THROWS_AS(forms(0), invalid_input);
    CHECK_THROWS_AS(forms(50), limit_exceeded);  // 2*3*5^50 overflows
}

TEST_CASE("admissibility of the 3-5 power forms", "[dickson]") {
    for (int k = 1; k <= 12; ++k) {
        const auto fm = forms(k);
        CAPTURE(k);
        REQUIRE(admissible_check(fm.f_coeffs));
        REQUIRE(admissible_check(fm.g_coeffs));
    }
    // 1 + 1*(2t+1) = 2t + 2 is always even: not admissible
    const std::vector<u64> bad{1};
    CHECK_FALSE(admissible_check(bad));
    CHECK_THROWS_AS(admissible_check(std::vector<u64>{}), invalid_input);
}

TEST_CASE("search k = 1: the first form value is prime at n = 0, m moves past q = p", "[dickson]") {
    const auto w = search_tuple(1, 10);
    REQUIRE(w.has_value());
    CHECK(w->n == 0);
    CHECK(w->p == std::vector<u64>{31});
    CHECK(w->m == 2);  // m = 0 gives q = p = 31 (square product), m = 1 gives 91 = 7*13
    CHECK(w->q == std::vector<u64>{151});
    CHECK(w->totient == 4500);
    const auto cr = construct_totient(*w);
    REQUIRE(cr.verified_multiplicity.has_value());
    CHECK(*cr.verified_multiplicity >= 1);
}

TEST_CASE("search k = 2: composites force n = 3, the diagonal collision forces m past 3", "[dickson]") {
    CHECK_FALSE(search_tuple(2, 0).has_value());  // n = 0 gives 91 = 7*13
    const auto w = search_tuple(2, 100);
    REQUIRE(w.has_value());
    CHECK(w->n == 3);
    CHECK(w->p == std::vector<u64>{1051, 631});
    CHECK(w->m == 6);  // m = 3 repeats the products of n = 3; 4, 5 hit composites
    CHECK(w->q == std::vector<u64>{1171, 1951});
    CHECK(w->totient == 1228500);  // 4 * 27 * 125 * 7 * 13
    CHECK(v2(w->totient) == 2);

    const auto cr = construct_totient(*w);
    REQUIRE(cr.verified_multiplicity.has_value());
    CHECK(*cr.verified_multiplicity >= 2);

    // both products are preimages of the common totient
    const auto pre = inverse_phi(1228500);
    CHECK(std::binary_search(pre.elements.begin(), pre.elements.end(), u64{1051} * 1171));
    CHECK(std::binary_search(pre.elements.begin(), pre.elements.end(), u64{631} * 1951));
    CHECK(*cr.verified_multiplicity == pre.multiplicity());
}

TEST_CASE("degenerate hand-built witness: p = q collapses the product", "[dickson]") {
    DicksonWitness w;
    w.k = 1;
    w.n = 0;
    w.m = 0;
    w.p = {31};
    w.q = {31};
    w.totient = 900;  // 4 * 9 * 25
    CHECK_NOTHROW(validate_witness(w));
    const auto cr = construct_totient(w);
    CHECK(cr.totient == 900);
    REQUIRE(cr.verified_multiplicity.has_value());
    CHECK(*cr.verified_multiplicity >= 1);
    // 31^2 is NOT a preimage of 900: phi(961) = 31*30 = 930
    const auto pre = inverse_phi(900);
    CHECK_FALSE(std::binary_search(pre.elements.begin(), pre.elements.end(), u64{961}));
    CHECK(oracle::phi_trial(961) == 930);
}

TEST_CASE("witness invariants across found tuples", "[dickson]") {
    for (int k = 1; k <= 4; ++k) {
        CAPTURE(k);
        const auto w = search_tuple(k, 5000);
        REQUIRE(w.has_value());
        REQUIRE_NOTHROW(validate_witness(*w));
        // product identity index-independent, by hand
        for (int i = 0; i < k; ++i) {
            REQUIRE((w->p[i] - 1) * (w->q[i] - 1) == w->totient);
            REQUIRE(w->p[i] != w->q[i]);
            REQUIRE(oracle::is_prime_trial(w->p[i]));
            REQUIRE(oracle::is_prime_trial(w->q[i]));
        }
        REQUIRE(v2(w->totient) == 2);
        const auto cr = construct_totient(*w);
        REQUIRE(cr.verified_multiplicity.has_value());
        REQUIRE(*cr.verified_multiplicity >= static_cast<u64>(k));
    }
}

TEST_CASE("bad witnesses are rejected", "[dickson]") {
    DicksonWitness w;
    w.k = 1;
    w.n = 0;
    w.m = 2;
    w.p = {31};
    w.q = {151};
    w.totient = 4500;
    CHECK_NOTHROW(validate_witness(w));

    auto broken = w;
    broken.totient = 4501;
    CHECK_THROWS_AS(validate_witness(broken), invalid_input);

    broken = w;
    broken.q = {152};  // not prime, breaks the product identity too
    CHECK_THROWS_AS(validate_witness(broken), invalid_input);

    broken = w;
    broken.p = {};
    CHECK_THROWS_AS(validate_witness(broken), invalid_input);

    DicksonWitness collide;
    collide.k = 2;
    collide.n = 3;
    collide.m = 3;  // q_i = p_{k+1-i}: products collapse pairwise
    collide.p = {1051, 631};
    collide.q = {631, 1051};
    collide.totient = tuple_totient(2, 3, 3);
    CHECK_THROWS_AS(validate_witness(collide), invalid_input);
}

TEST_CASE("tuple totient arithmetic", "[dickson]") {
    CHECK(tuple_totient(2, 3, 6) == 1228500);
    CHECK(tuple_totient(1, 0, 0) == 900);
    CHECK(v2(tuple_totient(3, 5, 9)) == 2);
    CHECK_THROWS_AS(tuple_totient(40, 1, 1), limit_exceeded);
}

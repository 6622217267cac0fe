#pragma once
// High-multiplicity totients in stratum 2 from the admissible linear forms
//   f_i(n) = 1 + 2*3^i*5^{k+1-i}(2n+1),   g_i(m) = 1 + 2*3^{k+1-i}*5^i(2m+1),
// i = 1..k. When all f_i(n) and g_i(m) are prime, every product p_i*q_i has
//   phi(p_i q_i) = (p_i-1)(q_i-1) = 4*3^{k+1}*5^{k+1}(2n+1)(2m+1),
// one common totient with 2-adic valuation 2, so k distinct products witness
// multiplicity >= k.

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "totstrat/arith.hpp"
#include "totstrat/config.hpp"
#include "totstrat/inverse_totient.hpp"

namespace totstrat {

struct DicksonWitness {
    int k = 0;
    u64 n = 0;
    u64 m = 0;
    std::vector<u64> p;  // p_i = f_i(n)
    std::vector<u64> q;  // q_i = g_i(m)
    u64 totient = 0;     // common value (p_i - 1)(q_i - 1)
};

struct Forms {
    std::vector<u64> f_coeffs;  // form value at t is 1 + coeff*(2t+1)
    std::vector<u64> g_coeffs;
};

/// Coefficients 2*3^i*5^{k+1-i} and 2*3^{k+1-i}*5^i for i = 1..k.
inline Forms forms(int k) {
    if (k < 1) throw invalid_input("forms: k must be >= 1");
    Forms out;
    for (int i = 1; i <= k; ++i) {
        u128 c = 2;
        for (int j = 0; j < i; ++j) c *= 3;
        for (int j = 0; j < k + 1 - i; ++j) c *= 5;
        if (c > ~u64{0}) throw limit_exceeded("forms: coefficient overflows 64 bits");
        out.f_coeffs.push_back(static_cast<u64>(c));
    }
    out.g_coeffs.assign(out.f_coeffs.rbegin(), out.f_coeffs.rend());
    return out;
}

/// Dickson admissibility of the forms 1 + c_i(2t+1): no prime p <= (#forms+1)
/// may cover every residue t mod p with a zero of some form. Larger p cannot
/// cover p residues with at most #forms roots.
inline bool admissible_check(std::span<const u64> coeffs) {
    if (coeffs.empty()) throw invalid_input("admissible_check: empty coefficient list");
    for (u64 p : primes_up_to(coeffs.size() + 1)) {
        bool covered = true;
        for (u64 t = 0; t < p && covered; ++t) {
            bool hit = false;
            for (u64 c : coeffs)
                if ((1 + mul_mod(c % p, (2 * t + 1) % p, p)) % p == 0) { hit = true; break; }
            covered = hit;
        }
        if (covered) return false;
    }
    return true;
}

namespace detail {

// all 1 + c*(2t+1) prime, with a trial-division prefilter before Miller-Rabin
inline bool tuple_all_prime(std::span<const u64> coeffs, u64 t, std::vector<u64>& vals) {
    static constexpr u32 small_primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                           43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    vals.clear();
    for (u64 c : coeffs) {
        if (c > (~u64{0} - 1) / (2 * t + 1)) throw limit_exceeded("dickson: form value overflows");
        const u64 v = 1 + c * (2 * t + 1);
        for (u32 sp : small_primes)
            if (v % sp == 0 && v != sp) return false;
        if (!is_prime(v)) return false;
        vals.push_back(v);
    }
    return true;
}

}  // namespace detail

/// Common totient 4*3^{k+1}*5^{k+1}(2n+1)(2m+1) of a (k, n, m) tuple.
inline u64 tuple_totient(int k, u64 n, u64 m) {
    u128 t = 4;
    for (int j = 0; j <= k; ++j) t *= 15;
    t *= 2 * n + 1;
    t *= 2 * m + 1;
    if (t > ~u64{0}) throw limit_exceeded("dickson: totient overflows 64 bits");
    return static_cast<u64>(t);
}

/// Witness invariants, exactly: primality of all p_i, q_i; the common product
/// identity; v2(totient) = 2; pairwise distinct products.
inline void validate_witness(const DicksonWitness& w) {
    if (w.k < 1 || w.p.size() != static_cast<std::size_t>(w.k) || w.q.size() != w.p.size())
        throw invalid_input("dickson witness: bad arity");
    if (w.totient != tuple_totient(w.k, w.n, w.m))
        throw invalid_input("dickson witness: totient does not match (k, n, m)");
    std::vector<u64> products;
    for (int i = 0; i < w.k; ++i) {
        if (!is_prime(w.p[i]) || !is_prime(w.q[i]))
            throw invalid_input("dickson witness: non-prime entry");
        if ((w.p[i] - 1) * (w.q[i] - 1) != w.totient)
            throw invalid_input("dickson witness: product identity broken");
        products.push_back(w.p[i] * w.q[i]);
    }
    if (v2(w.totient) != 2) throw invalid_input("dickson witness: totient not in stratum 2");
    std::sort(products.begin(), products.end());
    if (std::adjacent_find(products.begin(), products.end()) != products.end())
        throw invalid_input("dickson witness: products collide");
}

/// Smallest n <= bound making every f_i(n) prime, then smallest m <= bound
/// making every g_i(m) prime with all k products p_i*q_i distinct AND
/// p_i != q_i for every i (p_i = q_i would make the product p_i^2, whose
/// totient is p(p-1), not the common value — it cannot witness multiplicity).
inline std::optional<DicksonWitness> search_tuple(int k, u64 bound, const RunConfig& = {}) {
    const Forms fm = forms(k);
    std::vector<u64> p, q;
    std::optional<u64> n_found;
    for (u64 n = 0; n <= bound; ++n) {
        if (detail::tuple_all_prime(fm.f_coeffs, n, p)) { n_found = n; break; }
    }
    if (!n_found) return std::nullopt;
    for (u64 m = 0; m <= bound; ++m) {
        if (!detail::tuple_all_prime(fm.g_coeffs, m, q)) continue;
        bool ok = true;
        std::vector<u64> products;
        for (int i = 0; i < k && ok; ++i) {
            if (p[i] == q[i]) ok = false;
            else products.push_back(p[i] * q[i]);
        }
        if (ok) {
            std::sort(products.begin(), products.end());
            ok = std::adjacent_find(products.begin(), products.end()) == products.end();
        }
        if (!ok) continue;
        DicksonWitness w;
        w.k = k;
        w.n = *n_found;
        w.m = m;
        w.p = p;
        w.q = q;
        w.totient = tuple_totient(k, w.n, m);
        validate_witness(w);
        return w;
    }
    return std::nullopt;
}

struct ConstructResult {
    u64 totient = 0;
    std::optional<u64> verified_multiplicity;  // unset: verification-out-of-range
};

/// Validates the witness, then (when the totient is within inverse_phi range)
/// verifies through the independent preimage path: every genuine semiprime
/// product p_i*q_i with p_i != q_i must appear in phi^{-1}(totient), and the
/// multiplicity must be at least the number of distinct such products.
inline ConstructResult construct_totient(const DicksonWitness& w) {
    validate_witness(w);
    ConstructResult out;
    out.totient = w.totient;
    if (w.totient > kInversePhiMax) return out;  // verification-out-of-range

    const PreimageSet pre = inverse_phi(w.totient);
    std::vector<u64> genuine;
    for (int i = 0; i < w.k; ++i) {
        if (w.p[i] == w.q[i]) continue;  // p^2 is not a preimage of the common totient
        const u64 prod = w.p[i] * w.q[i];
        if (!std::binary_search(pre.elements.begin(), pre.elements.end(), prod))
            throw std::logic_error("dickson: product missing from phi preimage; computation bug");
        genuine.push_back(prod);
    }
    std::sort(genuine.begin(), genuine.end());
    genuine.erase(std::unique(genuine.begin(), genuine.end()), genuine.end());
    if (pre.multiplicity() < genuine.size())
        throw std::logic_error("dickson: multiplicity below witness count; computation bug");
    out.verified_multiplicity = pre.multiplicity();
    return out;
}

}  // namespace totstrat

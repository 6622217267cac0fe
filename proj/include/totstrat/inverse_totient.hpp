#pragma once
// Complete phi-preimages by recursive divisor decomposition, the {0,2,4}
// classification of totients 2 mod 4, prime-power preimage sets R_t, and an
// explicit completeness bound N(x) with  phi(n) <= x  =>  n <= N(x).

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "totstrat/arith.hpp"
#include "totstrat/config.hpp"

namespace totstrat {

// inverse_phi is exact up to here; past it 64-bit intermediates are not safe.
inline constexpr u64 kInversePhiMax = u64{1} << 60;

/// Least N (plus 5% slack) with: phi(n) <= x implies n <= N.
///
/// Uses phi(n) > n / D(n) with D(n) = e^gamma*loglog(n) + 3/loglog(n) for
/// n >= 17 — Rosser & Schoenfeld, "Approximate formulas for some functions of
/// prime numbers" (1962), Theorem 15, taking the constant 3 in place of
/// 2.50637, which drops the theorem's single exceptional n. n/D(n) increases
/// on n >= 17, so the least fixed point N >= x*D(N) gives phi(n) > x for all
/// n > N. Monotone nondecreasing in x.
inline u64 preimage_bound(u64 x) {
    if (x == 0) throw invalid_input("preimage_bound: x must be >= 1");
    const long double e_gamma = 1.78107241799019798523650410310718L;
    long double n = static_cast<long double>(std::max<u64>(x, 17));
    for (int iter = 0; iter < 256; ++iter) {
        const long double ll = std::log(std::log(n));
        const long double next = static_cast<long double>(x) * (e_gamma * ll + 3.0L / ll);
        if (next <= n) break;
        n = next;
    }
    n *= 1.05L;
    if (n >= 9223372036854775808.0L)  // 2^63
        throw limit_exceeded("preimage_bound: bound exceeds 2^63");
    return static_cast<u64>(std::ceil(n));
}

struct PreimageSet {
    u64 m = 0;
    std::vector<u64> elements;  // strictly increasing, complete

    u64 multiplicity() const { return elements.size(); }
    bool empty() const { return elements.empty(); }
};

namespace detail {

struct PhiContribution {
    u64 prime;
    u64 contrib;          // p^{k-1} (p-1), divides m
    u64 power;            // p^k
    std::size_t next_prime;  // index of first contribution of a different prime
};

// Candidates: for each divisor d of m with d+1 prime, the prime powers
// p = d+1, p^k whose phi-contribution p^{k-1} d divides m. Grouped by prime,
// primes descending, exponents ascending inside a group.
inline std::vector<PhiContribution> phi_contributions(u64 m) {
    std::vector<PhiContribution> out;
    auto divs = divisors(m);
    for (auto it = divs.rbegin(); it != divs.rend(); ++it) {
        const u64 d = *it;
        const u64 p = d + 1;
        if (!is_prime(p)) continue;
        u64 contrib = d;
        u64 power = p;
        while (m % contrib == 0) {
            out.push_back({p, contrib, power, 0});
            if (contrib > m / p) break;  // next contribution would exceed m
            contrib *= p;
            power *= p;
        }
    }
    // groups are already contiguous; link each entry to the next prime's start
    std::size_t group_end = out.size();
    for (std::size_t i = out.size(); i-- > 0;) {
        if (i + 1 < out.size() && out[i].prime != out[i + 1].prime) group_end = i + 1;
        out[i].next_prime = group_end;
    }
    return out;
}

inline void inverse_phi_dfs(const std::vector<PhiContribution>& cand, std::size_t start,
                            u64 remaining, u64 acc, std::vector<u64>& out) {
    if (remaining == 1) out.push_back(acc);
    else if (remaining & 1) return;  // odd remainder > 1 is unreachable: contributions are even or 1
    for (std::size_t j = start; j < cand.size(); ++j) {
        if (remaining % cand[j].contrib) continue;
        inverse_phi_dfs(cand, cand[j].next_prime, remaining / cand[j].contrib,
                        acc * cand[j].power, out);
    }
}

}  // namespace detail

/// The complete sorted solution set of phi(n) = m. Sieve-independent; works
/// for isolated large m (up to kInversePhiMax).
inline PreimageSet inverse_phi(u64 m) {
    if (m == 0) throw invalid_input("inverse_phi: m must be >= 1");
    if (m > kInversePhiMax) throw limit_exceeded("limit-exceeded: inverse_phi supports m <= 2^60");
    PreimageSet out;
    out.m = m;
    if (m == 1) {
        out.elements = {1, 2};
        return out;
    }
    if (m & 1) return out;  // odd m > 1 is a nontotient
    auto cand = detail::phi_contributions(m);
    detail::inverse_phi_dfs(cand, 0, m, 1, out.elements);
    std::sort(out.elements.begin(), out.elements.end());
    return out;
}

/// A(m) = |phi^{-1}(m)|.
inline u64 multiplicity(u64 m) { return inverse_phi(m).multiplicity(); }

// ---------------------------------------------------------------------------
// classification of phi^{-1}(2r), r odd

enum class TwoMod4Pattern {
    empty,        // 2r is a nontotient
    pair,         // phi^{-1}(2r) = {p^n, 2 p^n}
    quad,         // phi^{-1}(2r) = {2r+1, q^m, 4r+2, 2 q^m}, m > 1
    exceptional,  // r = 1 only: phi^{-1}(2) = {3, 4, 6}
};

struct TwoMod4Class {
    u64 r = 0;
    u64 multiplicity = 0;
    TwoMod4Pattern pattern = TwoMod4Pattern::empty;
    u64 p = 0, n = 0;  // pair: elements {p^n, 2 p^n}
    u64 q = 0, m = 0;  // quad: prime-power part q^m

    /// The elements the pattern describes, sorted (empty for EMPTY).
    std::vector<u64> elements() const {
        std::vector<u64> e;
        u64 pn;
        switch (pattern) {
            case TwoMod4Pattern::empty: break;
            case TwoMod4Pattern::exceptional: e = {3, 4, 6}; break;
            case TwoMod4Pattern::pair:
                pn = 1;
                for (u64 i = 0; i < n; ++i) pn *= p;
                e = {pn, 2 * pn};
                break;
            case TwoMod4Pattern::quad:
                pn = 1;
                for (u64 i = 0; i < m; ++i) pn *= q;
                e = {2 * r + 1, pn, 4 * r + 2, 2 * pn};
                break;
        }
        std::sort(e.begin(), e.end());
        return e;
    }
};

/// Structure of phi^{-1}(2r) for odd r, computed directly: the degree-one
/// solutions are {2r+1, 4r+2} when 2r+1 is prime; a higher prime power
/// solution q^m (m >= 2) needs q | r with q^{v_q(r)} (q-1) = 2r, and at most
/// one prime q can satisfy that. Multiplicity is 0, 2 or 4 for r >= 3.
inline TwoMod4Class classify_2r(u64 r) {
    if (r == 0 || r % 2 == 0) throw invalid_input("classify_2r: r must be odd and >= 1");
    TwoMod4Class c;
    c.r = r;
    if (r == 1) {
        c.pattern = TwoMod4Pattern::exceptional;
        c.multiplicity = 3;
        return c;
    }
    const bool deg1 = is_prime(2 * r + 1);
    u64 q = 0, qexp = 0;
    for (const Factor& f : factorize(r)) {
        u64 qa = 1;
        for (int i = 0; i < f.e; ++i) qa *= f.p;
        if (qa * (f.p - 1) == 2 * r) {
            q = f.p;
            qexp = static_cast<u64>(f.e) + 1;  // element is q^{e+1}
            break;
        }
    }
    if (deg1 && q) {
        c.pattern = TwoMod4Pattern::quad;
        c.multiplicity = 4;
        c.q = q;
        c.m = qexp;
    } else if (deg1) {
        c.pattern = TwoMod4Pattern::pair;
        c.multiplicity = 2;
        c.p = 2 * r + 1;
        c.n = 1;
    } else if (q) {
        c.pattern = TwoMod4Pattern::pair;
        c.multiplicity = 2;
        c.p = q;
        c.n = qexp;
    }
    return c;
}

// ---------------------------------------------------------------------------
// R_t: totients with a prime-power preimage q^j, j >= t

/// All totients k <= x having a preimage q^j with j >= t, sorted. Enumerates
/// prime powers directly: k = q^{j-1}(q-1) <= x forces q <= (2x)^{1/t}.
///
/// Note: pi((2x)^{1/t}) bounds the number of generating primes q, NOT the
/// size of this set — small q contribute one member per admissible exponent
/// (q = 2 alone yields floor(log2 x) - t + 1 of them), so the set is larger
/// than pi((2x)^{1/t}) at every desk scale.
inline std::vector<u64> r_t_members(u64 x, int t, const RunConfig& cfg = {}) {
    if (t < 2) throw invalid_input("r_t_members: t must be >= 2");
    if (x > cfg.sieve_limit || x > (~u64{0} >> 1))
        throw limit_exceeded("limit-exceeded: x past sieve_limit");
    std::set<u64> members;
    const u64 qmax = iroot(2 * x, t);
    for (u64 q = 2; q <= qmax; ++q) {
        if (!is_prime(q)) continue;
        // k = q^{j-1}(q-1), j >= t; start at j = t
        u128 qp = 1;
        for (int i = 0; i < t - 1; ++i) qp *= q;
        for (;;) {
            const u128 k = qp * (q - 1);
            if (k > x) break;
            members.insert(static_cast<u64>(k));
            qp *= q;
        }
    }
    return {members.begin(), members.end()};
}

}  // namespace totstrat

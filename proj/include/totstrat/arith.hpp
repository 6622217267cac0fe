#pragma once
// Number-theory kernel: segmented sieves for phi and omega, prime counting,
// deterministic 64-bit primality, 2-adic valuation, factorization.
//
// Sieve layout: ranges starting at 1 go through a linear smallest-prime-factor
// sieve; higher ranges are recomputed per segment by stripping the base primes
// p with p^2 < hi and applying phi(n) = n * prod_{p|n}(1 - 1/p) exactly in
// integers (the running product stays divisible by each new prime, so no
// rational arithmetic is needed). Both paths are exact, which makes segment
// boundaries seamless by construction.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <span>
#include <thread>
#include <vector>

#include "totstrat/config.hpp"

namespace totstrat {

/// Largest l with 2^l dividing n. Requires n >= 1.
inline int v2(u64 n) {
    if (n == 0) throw invalid_input("v2: argument must be >= 1");
    return std::countr_zero(n);
}

inline u64 isqrt(u64 n) {
    if (n == 0) return 0;
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && r > n / r) --r;
    while (r + 1 <= n / (r + 1)) ++r;
    return r;
}

/// True iff base^exp <= limit, evaluated without overflow.
inline bool ipow_leq(u64 base, int exp, u64 limit) {
    u64 acc = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && acc > limit / base) return false;
        acc *= base;
    }
    return acc <= limit;
}

/// floor(n^(1/t)) for t >= 1.
inline u64 iroot(u64 n, int t) {
    if (t <= 0) throw invalid_input("iroot: t must be >= 1");
    if (t == 1 || n < 2) return n;
    u64 r = static_cast<u64>(std::pow(static_cast<long double>(n), 1.0L / t));
    while (r > 0 && !ipow_leq(r, t, n)) --r;
    while (ipow_leq(r + 1, t, n)) ++r;
    return r;
}

inline u64 mul_mod(u64 a, u64 b, u64 mod) {
    return static_cast<u64>((static_cast<u128>(a) * b) % mod);
}

inline u64 pow_mod(u64 base, u64 exp, u64 mod) {
    u64 r = mod > 1 ? 1 : 0;
    base %= mod;
    while (exp) {
        if (exp & 1) r = mul_mod(r, base, mod);
        base = mul_mod(base, base, mod);
        exp >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin. The first twelve primes form a complete witness
// set for every n < 3.186*10^24 (Sorenson & Webster, "Strong pseudoprimes to
// twelve prime bases", Math. Comp. 2015), which covers all 64-bit inputs.
inline bool is_prime(u64 n) {
    constexpr u64 witnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (n < 2) return false;
    for (u64 p : witnesses) {
        if (n % p == 0) return n == p;
    }
    const int s = std::countr_zero(n - 1);
    const u64 d = (n - 1) >> s;
    for (u64 a : witnesses) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

/// All primes <= limit, ascending. Meant for base primes (limit ~ sqrt of a
/// sieve range); allocates limit+1 bytes.
inline std::vector<u32> primes_up_to(u64 limit) {
    std::vector<u32> primes;
    if (limit < 2) return primes;
    if (limit >= (u64{1} << 32)) throw limit_exceeded("primes_up_to: limit beyond 2^32");
    std::vector<u8> comp(limit + 1, 0);
    for (u64 i = 2; i <= limit; ++i) {
        if (comp[i]) continue;
        primes.push_back(static_cast<u32>(i));
        for (u64 j = i * i; j <= limit; j += i) comp[j] = 1;
    }
    return primes;
}

// ---------------------------------------------------------------------------
// phi / omega segments

struct PhiSegment {
    u64 lo = 1;
    std::vector<u64> values;  // values[i] = phi(lo + i)

    u64 hi() const { return lo + values.size(); }
    u64 phi(u64 n) const { return values.at(n - lo); }
};

struct OmegaSegment {
    u64 lo = 1;
    std::vector<u8> values;  // values[i] = omega(lo + i); omega(n) <= 15 on 64 bits

    u64 hi() const { return lo + values.size(); }
    u8 omega(u64 n) const { return values.at(n - lo); }
};

namespace detail {

// phi(1..n) via linear smallest-prime-factor sieve; result[i] = phi(i), O(n).
inline std::vector<u64> phi_linear(u64 n) {
    std::vector<u64> phi(n + 1, 0);
    std::vector<u32> spf(n + 1, 0);
    std::vector<u32> primes;
    if (n >= 1) phi[1] = 1;
    for (u64 i = 2; i <= n; ++i) {
        if (spf[i] == 0) {
            spf[i] = static_cast<u32>(i);
            primes.push_back(static_cast<u32>(i));
            phi[i] = i - 1;
        }
        for (u32 p : primes) {
            if (p > spf[i] || i * p > n) break;
            spf[i * p] = p;
            phi[i * p] = (p == spf[i]) ? phi[i] * p : phi[i] * (p - 1);
        }
    }
    return phi;
}

// Exact phi over [lo, hi) by base-prime stripping; base_primes must cover
// every p with p*p < hi. rem is scratch.
inline void phi_fill_segment(u64 lo, u64 hi, std::span<const u32> base_primes,
                             std::vector<u64>& phi, std::vector<u64>& rem) {
    const std::size_t n = static_cast<std::size_t>(hi - lo);
    phi.resize(n);
    rem.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        phi[i] = lo + i;
        rem[i] = lo + i;
    }
    if (lo == 1) rem[0] = phi[0] = 1;
    // p = 2 by shifts
    for (u64 j = lo + (lo & 1); j < hi; j += 2) {
        const std::size_t i = static_cast<std::size_t>(j - lo);
        phi[i] -= phi[i] >> 1;
        rem[i] >>= std::countr_zero(rem[i]);
    }
    for (u32 p : base_primes) {
        if (p == 2) continue;
        if (static_cast<u64>(p) * p >= hi) break;
        for (u64 j = ((lo + p - 1) / p) * p; j < hi; j += p) {
            const std::size_t i = static_cast<std::size_t>(j - lo);
            phi[i] -= phi[i] / p;
            do rem[i] /= p; while (rem[i] % p == 0);
        }
    }
    // leftover rem > 1 is a single prime factor > sqrt(hi-1)
    for (std::size_t i = 0; i < n; ++i)
        if (rem[i] > 1) phi[i] -= phi[i] / rem[i];
}

// omega over [lo, hi); same stripping scheme, counting distinct primes.
inline void omega_fill_segment(u64 lo, u64 hi, std::span<const u32> base_primes,
                               std::vector<u8>& cnt, std::vector<u64>& rem) {
    const std::size_t n = static_cast<std::size_t>(hi - lo);
    cnt.assign(n, 0);
    rem.resize(n);
    for (std::size_t i = 0; i < n; ++i) rem[i] = lo + i;
    if (lo == 1) rem[0] = 1;
    for (u64 j = lo + (lo & 1); j < hi; j += 2) {
        const std::size_t i = static_cast<std::size_t>(j - lo);
        cnt[i]++;
        rem[i] >>= std::countr_zero(rem[i]);
    }
    for (u32 p : base_primes) {
        if (p == 2) continue;
        if (static_cast<u64>(p) * p >= hi) break;
        for (u64 j = ((lo + p - 1) / p) * p; j < hi; j += p) {
            const std::size_t i = static_cast<std::size_t>(j - lo);
            cnt[i]++;
            do rem[i] /= p; while (rem[i] % p == 0);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (rem[i] > 1) cnt[i]++;
}

inline void check_range(u64 lo, u64 hi) {
    if (lo == 0 || lo >= hi) throw invalid_input("invalid-range: need 1 <= lo < hi");
    if (hi > (u64{1} << 63)) throw invalid_input("invalid-range: hi beyond 2^63");
}

}  // namespace detail

/// phi(n) for every n in [lo, hi) as one segment. Throws range-too-large when
/// the buffers would exceed the memory cap; sweep with for_each_phi_segment
/// instead for big ranges.
inline PhiSegment phi_range(u64 lo, u64 hi, const RunConfig& cfg = {}) {
    detail::check_range(lo, hi);
    if (hi - lo > cfg.memory_cap_bytes / 16)
        throw limit_exceeded("range-too-large: [lo,hi) exceeds memory_cap_bytes; use for_each_phi_segment");
    PhiSegment seg;
    seg.lo = lo;
    if (lo == 1 && hi - 1 < (u64{1} << 32)) {
        auto phi = detail::phi_linear(hi - 1);
        seg.values.assign(phi.begin() + 1, phi.end());
    } else {
        auto base = primes_up_to(isqrt(hi - 1));
        std::vector<u64> rem;
        detail::phi_fill_segment(lo, hi, base, seg.values, rem);
    }
    return seg;
}

inline OmegaSegment omega_range(u64 lo, u64 hi, const RunConfig& cfg = {}) {
    detail::check_range(lo, hi);
    if (hi - lo > cfg.memory_cap_bytes / 16)
        throw limit_exceeded("range-too-large: [lo,hi) exceeds memory_cap_bytes");
    OmegaSegment seg;
    seg.lo = lo;
    auto base = primes_up_to(isqrt(hi - 1));
    std::vector<u64> rem;
    detail::omega_fill_segment(lo, hi, base, seg.values, rem);
    return seg;
}

/// Sweep [lo, hi) in segments of cfg.segment_size, calling
/// fn(seg_lo, span<const u64> phi_values) in ascending order.
template <class Fn>
void for_each_phi_segment(u64 lo, u64 hi, const RunConfig& cfg, Fn&& fn) {
    detail::check_range(lo, hi);
    if (hi - 1 > cfg.sieve_limit) throw limit_exceeded("limit-exceeded: range past sieve_limit");
    auto base = primes_up_to(isqrt(hi - 1));
    std::vector<u64> phi, rem;
    const u64 step = std::max<u64>(cfg.segment_size, 1024);
    for (u64 s = lo; s < hi; s += step) {
        const u64 e = std::min(hi, s + step);
        detail::phi_fill_segment(s, e, base, phi, rem);
        fn(s, std::span<const u64>(phi.data(), static_cast<std::size_t>(e - s)));
    }
}

template <class Fn>
void for_each_omega_segment(u64 lo, u64 hi, const RunConfig& cfg, Fn&& fn) {
    detail::check_range(lo, hi);
    if (hi - 1 > cfg.sieve_limit) throw limit_exceeded("limit-exceeded: range past sieve_limit");
    auto base = primes_up_to(isqrt(hi - 1));
    std::vector<u8> cnt;
    std::vector<u64> rem;
    const u64 step = std::max<u64>(cfg.segment_size, 1024);
    for (u64 s = lo; s < hi; s += step) {
        const u64 e = std::min(hi, s + step);
        detail::omega_fill_segment(s, e, base, cnt, rem);
        fn(s, std::span<const u8>(cnt.data(), static_cast<std::size_t>(e - s)));
    }
}

/// Parallel phi sweep over [lo, hi): the range splits into one contiguous
/// block per worker (segment-aligned), and fn(worker_id, seg_lo, values) runs
/// on the worker's thread. Partition is a pure function of (lo, hi, cfg), so
/// additive merges give worker-count-independent results.
template <class Fn>
void parallel_phi_sweep(u64 lo, u64 hi, const RunConfig& cfg, unsigned workers, Fn&& fn) {
    detail::check_range(lo, hi);
    if (hi - 1 > cfg.sieve_limit) throw limit_exceeded("limit-exceeded: range past sieve_limit");
    workers = std::max(1u, workers);
    const u64 step = std::max<u64>(cfg.segment_size, 1024);
    const u64 total = hi - lo;
    u64 per = (total + workers - 1) / workers;
    per = ((per + step - 1) / step) * step;

    if (workers == 1 || total <= step) {
        for_each_phi_segment(lo, hi, cfg, [&](u64 s, std::span<const u64> v) { fn(0u, s, v); });
        return;
    }

    const auto base = primes_up_to(isqrt(hi - 1));
    std::vector<std::thread> threads;
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (unsigned w = 0; w < workers; ++w) {
        const u64 block_lo = lo + static_cast<u64>(w) * per;
        if (block_lo >= hi) break;
        const u64 block_hi = std::min(hi, block_lo + per);
        threads.emplace_back([&, w, block_lo, block_hi] {
            try {
                std::vector<u64> phi, rem;
                for (u64 s = block_lo; s < block_hi; s += step) {
                    const u64 e = std::min(block_hi, s + step);
                    detail::phi_fill_segment(s, e, base, phi, rem);
                    fn(w, s, std::span<const u64>(phi.data(), static_cast<std::size_t>(e - s)));
                }
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// prime counting

/// pi(x) = #{p prime : p <= x}, by segmented Eratosthenes.
inline u64 prime_pi(u64 x, const RunConfig& cfg = {}) {
    if (x > cfg.sieve_limit) throw limit_exceeded("limit-exceeded: prime_pi past sieve_limit");
    if (x < 2) return 0;
    auto base = primes_up_to(isqrt(x));
    const u64 step = std::max<u64>(cfg.segment_size, 1024);
    std::vector<u8> comp;
    u64 count = 0;
    for (u64 s = 2; s <= x; s += step) {
        const u64 e = std::min(x + 1, s + step);
        comp.assign(static_cast<std::size_t>(e - s), 0);
        for (u32 p : base) {
            const u64 p2 = static_cast<u64>(p) * p;
            if (p2 >= e) break;
            for (u64 j = std::max(p2, ((s + p - 1) / p) * p); j < e; j += p) comp[j - s] = 1;
        }
        for (u8 c : comp) count += !c;
    }
    return count;
}

/// hist[i] = pi_i(x) = #{n <= x : omega(n) = i}; hist[0] counts only n = 1.
inline std::vector<u64> omega_histogram(u64 x, const RunConfig& cfg = {}) {
    std::vector<u64> hist(17, 0);
    if (x == 0) return hist;
    for_each_omega_segment(1, x + 1, cfg, [&](u64, std::span<const u8> v) {
        for (u8 w : v) hist[w]++;
    });
    return hist;
}

/// pi_i(x): integers <= x with exactly i distinct prime factors.
inline u64 prime_pi_i(u64 x, int i, const RunConfig& cfg = {}) {
    if (i < 1) throw invalid_input("prime_pi_i: need i >= 1");
    auto hist = omega_histogram(x, cfg);
    return static_cast<std::size_t>(i) < hist.size() ? hist[i] : 0;
}

// ---------------------------------------------------------------------------
// factorization

struct Factor {
    u64 p;
    int e;
};

namespace detail {

// Pollard-Brent with deterministic parameter sequence; n odd composite, > 1.
inline u64 pollard_brent(u64 n) {
    for (u64 c = 1;; ++c) {
        u64 x = 2, y = 2, d = 1;
        u64 power = 1, lam = 1;
        while (d == 1) {
            if (power == lam) {
                x = y;
                power <<= 1;
                lam = 0;
            }
            y = mul_mod(y, y, n);
            y = (y + c) % n;
            ++lam;
            const u64 diff = x > y ? x - y : y - x;
            d = std::gcd(diff, n);
        }
        if (d != n) return d;
    }
}

inline void factorize_rec(u64 n, std::vector<Factor>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back({n, 1});
        return;
    }
    const u64 d = pollard_brent(n);
    factorize_rec(d, out);
    factorize_rec(n / d, out);
}

}  // namespace detail

/// Prime factorization, exact for all 64-bit n >= 1. Sorted by prime.
inline std::vector<Factor> factorize(u64 n) {
    if (n == 0) throw invalid_input("factorize: argument must be >= 1");
    std::vector<Factor> out;
    for (u64 p : {2ull, 3ull, 5ull}) {
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        if (e) out.push_back({p, e});
    }
    // wheel over 6k +- 1
    for (u64 p = 7; p * p <= n && p < 100000; p += (p % 6 == 1) ? 4 : 2) {
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        if (e) out.push_back({p, e});
    }
    if (n > 1) {
        std::vector<Factor> rest;
        detail::factorize_rec(n, rest);
        std::sort(rest.begin(), rest.end(), [](const Factor& a, const Factor& b) { return a.p < b.p; });
        // collapse equal primes from the recursive split
        for (const Factor& f : rest) {
            if (!out.empty() && out.back().p == f.p) out.back().e += f.e;
            else out.push_back(f);
        }
    }
    std::sort(out.begin(), out.end(), [](const Factor& a, const Factor& b) { return a.p < b.p; });
    return out;
}

/// All divisors of n, sorted ascending.
inline std::vector<u64> divisors(u64 n) {
    auto fac = factorize(n);
    std::vector<u64> divs{1};
    for (const Factor& f : fac) {
        const std::size_t m = divs.size();
        u64 pe = 1;
        for (int e = 1; e <= f.e; ++e) {
            pe *= f.p;
            for (std::size_t i = 0; i < m; ++i) divs.push_back(divs[i] * pe);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

/// phi from a factorization-free single value (used where no sieve is open).
inline u64 phi_of(u64 n) {
    u64 r = n;
    for (const Factor& f : factorize(n)) r -= r / f.p;
    return r;
}

}  // namespace totstrat

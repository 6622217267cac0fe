#pragma once
// Bulk stratified statistics over the totients <= x: per-stratum counts
// V^l(x), multiplicity sums S^l(x), multiplicity histograms and maxima, the
// stratum cutoff k0(x), the witnessed l(x), and multiplicity lifting.
//
// Core sweep: every n <= preimage_bound(x) contributes one count to its
// totient phi(n); per-totient counts are then folded by 2-adic valuation.
// The m-range is processed in sub-intervals when the count array would not
// fit the memory cap (several passes over the same n-range), and each pass
// splits the n-range across workers with per-worker count arrays merged by
// addition, so results do not depend on worker count.

#include <algorithm>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "totstrat/arith.hpp"
#include "totstrat/config.hpp"
#include "totstrat/inverse_totient.hpp"

namespace totstrat {

/// k0(x) = floor(log2 x) for x >= 2, via bit length (exact at powers of two).
inline int k0(u64 x) {
    if (x < 2) throw invalid_input("k0: x must be >= 2");
    return static_cast<int>(std::bit_width(x)) - 1;
}

struct StratumStats {
    u64 x = 0;
    int ell = 0;
    u64 v_count = 0;   // V^l(x)
    u64 s_sum = 0;     // S^l(x)
    u64 max_mult = 0;  // max A(m) over the stratum, 0 if empty
    std::map<u64, u64> histogram;  // multiplicity -> number of totients
};

struct StrataResult {
    u64 x = 0;
    u64 v_total = 0;  // V(x), m = 1 included
    u64 s_total = 0;  // S(x) = #{n : phi(n) <= x} = 2 + sum_l S^l(x)
    std::vector<StratumStats> strata;  // index l-1 holds stratum l, l = 1..k0(x)

    const StratumStats& at(int ell) const {
        if (ell < 1 || static_cast<std::size_t>(ell) > strata.size())
            throw invalid_input("stratum index out of range");
        return strata[static_cast<std::size_t>(ell) - 1];
    }
};

/// Full sweep: stats for every stratum l = 1..k0(x).
/// allow_m_segmentation: permit multiple passes over the n-range with the
/// totient range split to fit the memory cap; when false, an oversized x
/// raises memory-cap-exceeded instead.
inline StrataResult compute_strata(u64 x, const RunConfig& cfg = {}, bool allow_m_segmentation = true) {
    if (x < 2) throw invalid_input("compute_strata: x must be >= 2");
    const u64 sweep_hi = preimage_bound(x) + 1;
    if (sweep_hi - 1 > cfg.sieve_limit)
        throw limit_exceeded("limit-exceeded: preimage_bound(x) past sieve_limit");

    const int kmax = k0(x);
    const unsigned workers = std::max(1u, cfg.workers);
    const u64 seg_bytes = 16 * std::max<u64>(cfg.segment_size, 1024) * workers;
    const u64 budget = cfg.memory_cap_bytes > seg_bytes ? cfg.memory_cap_bytes - seg_bytes : 0;
    u64 chunk = budget / (4 * workers);  // u32 counts per worker
    if (chunk < std::min<u64>(x + 1, u64{1} << 12))
        throw limit_exceeded("memory-cap-exceeded: cap too small for sieve buffers plus counters");
    if (chunk < x + 1 && !allow_m_segmentation)
        throw limit_exceeded("memory-cap-exceeded: enable totient-range segmentation");
    chunk = std::min<u64>(chunk, x + 1);

    StrataResult res;
    res.x = x;
    res.strata.resize(static_cast<std::size_t>(kmax));
    for (int l = 1; l <= kmax; ++l) {
        res.strata[l - 1].x = x;
        res.strata[l - 1].ell = l;
    }

    std::vector<std::vector<u32>> counts(workers);
    for (u64 m_lo = 0; m_lo <= x; m_lo += chunk) {
        const u64 m_hi = std::min(x + 1, m_lo + chunk);
        const std::size_t width = static_cast<std::size_t>(m_hi - m_lo);
        for (auto& c : counts) c.assign(width, 0);

        parallel_phi_sweep(1, sweep_hi, cfg, workers, [&](unsigned w, u64, std::span<const u64> vals) {
            u32* cw = counts[w].data();
            for (u64 v : vals) {
                const u64 off = v - m_lo;  // wraps below m_lo, single compare
                if (off < width) cw[off]++;
            }
        });
        for (unsigned w = 1; w < workers; ++w)
            for (std::size_t i = 0; i < width; ++i) counts[0][i] += counts[w][i];

        const u32* merged = counts[0].data();
        for (u64 m = std::max<u64>(m_lo, 1); m < m_hi; ++m) {
            const u32 c = merged[m - m_lo];
            if (!c) continue;
            res.v_total++;
            res.s_total += c;
            if (m == 1) continue;
            const int l = v2(m);
            if (l <= kmax) {
                auto& st = res.strata[l - 1];
                st.v_count++;
                st.s_sum += c;
                st.max_mult = std::max<u64>(st.max_mult, c);
                st.histogram[c]++;
            }
        }
    }
    return res;
}

/// Strata for l = 1..ell_max plus totals (spec surface over compute_strata).
inline StrataResult stratum_stats(u64 x, int ell_max, const RunConfig& cfg = {},
                                  bool allow_m_segmentation = true) {
    if (x < 2) throw invalid_input("stratum_stats: x must be >= 2");
    if (ell_max < 1 || ell_max > k0(x))
        throw invalid_input("stratum_stats: need 1 <= ell_max <= k0(x)");
    StrataResult res = compute_strata(x, cfg, allow_m_segmentation);
    res.strata.resize(static_cast<std::size_t>(ell_max));
    return res;
}

/// Independent single-pass S^l tally (no per-totient counts): bucket[l] counts
/// n <= preimage_bound(x) with phi(n) <= x and v2(phi(n)) = l; bucket[0]
/// counts the n with phi(n) = 1. Cross-check path for the count identity.
inline std::vector<u64> stratum_s_direct(u64 x, const RunConfig& cfg = {}) {
    if (x < 2) throw invalid_input("stratum_s_direct: x must be >= 2");
    const u64 sweep_hi = preimage_bound(x) + 1;
    std::vector<u64> bucket(65, 0);
    for_each_phi_segment(1, sweep_hi, cfg, [&](u64, std::span<const u64> vals) {
        for (u64 v : vals)
            if (v <= x) bucket[static_cast<std::size_t>(std::countr_zero(v))]++;
    });
    return bucket;
}

// ---------------------------------------------------------------------------
// stratum-1 split by multiplicity

/// (#totients <= x that are 2 mod 4 with A = 2, with A = 4). The totient 2
/// itself (A(2) = 3) lands in neither bucket. Uses the dedicated bound 3x:
/// preimages of 2r are among {2r+1, 4r+2, q^j, 2q^j} with 2q^j <= 6r, so all
/// of them are <= 3*(2r) <= 3x.
inline std::pair<u64, u64> v1_split(u64 x, const RunConfig& cfg = {}) {
    if (x < 2) return {0, 0};
    const u64 sweep_hi = 3 * x + 1;
    if (sweep_hi - 1 > cfg.sieve_limit)
        throw limit_exceeded("limit-exceeded: v1_split sweep past sieve_limit");
    const unsigned workers = std::max(1u, cfg.workers);
    const std::size_t width = static_cast<std::size_t>((x - 2) / 4 + 1);  // m = 2, 6, ..., <= x

    std::vector<std::vector<u8>> counts(workers);
    for (auto& c : counts) c.assign(width, 0);
    parallel_phi_sweep(1, sweep_hi, cfg, workers, [&](unsigned w, u64, std::span<const u64> vals) {
        u8* cw = counts[w].data();
        for (u64 v : vals) {
            if (v <= x && (v & 3) == 2) {
                u8& c = cw[(v - 2) >> 2];
                if (c < 255) c++;
            }
        }
    });
    for (unsigned w = 1; w < workers; ++w)
        for (std::size_t i = 0; i < width; ++i)
            counts[0][i] = static_cast<u8>(std::min<unsigned>(255u, counts[0][i] + counts[w][i]));

    u64 mult2 = 0, mult4 = 0;
    for (std::size_t i = 1; i < width; ++i) {  // i = 0 is m = 2, excluded
        if (counts[0][i] == 2) mult2++;
        else if (counts[0][i] == 4) mult4++;
    }
    return {mult2, mult4};
}

// ---------------------------------------------------------------------------
// derived views

inline u64 max_mult(const StrataResult& res, int ell) { return res.at(ell).max_mult; }

inline u64 max_mult(u64 x, int ell, const RunConfig& cfg = {}) {
    return max_mult(compute_strata(x, cfg), ell);
}

/// {A(m) : m in stratum l, m <= x}, ascending.
inline std::vector<u64> attained_multiplicities(const StrataResult& res, int ell) {
    std::vector<u64> vals;
    for (const auto& [mult, cnt] : res.at(ell).histogram) vals.push_back(mult);
    return vals;
}

inline std::vector<u64> attained_multiplicities(u64 x, int ell, const RunConfig& cfg = {}) {
    return attained_multiplicities(compute_strata(x, cfg), ell);
}

struct EllOfX {
    std::set<int> candidates;  // all l in [1, k0(x)] with 2^l S^l(x) > V(x)
    int ell = 0;               // min over candidates restricted to l >= 2
};

/// Witness l(x): candidates carry every stratum (including l = 1) so the
/// l = 1 question stays observable; ell is the minimum over l >= 2.
inline EllOfX ell_of_x(const StrataResult& res) {
    EllOfX out;
    for (const auto& st : res.strata) {
        const u128 lhs = static_cast<u128>(st.s_sum) << st.ell;
        if (lhs > res.v_total) out.candidates.insert(st.ell);
    }
    for (int l : out.candidates)
        if (l >= 2) { out.ell = l; break; }
    if (out.ell == 0)
        throw std::logic_error(
            "empty-candidates: no stratum l >= 2 with 2^l S^l(x) > V(x); computation bug");
    return out;
}

inline EllOfX ell_of_x(u64 x, const RunConfig& cfg = {}) {
    if (x < 4) throw invalid_input("ell_of_x: x must be >= 4");
    return ell_of_x(compute_strata(x, cfg));
}

// ---------------------------------------------------------------------------
// multiplicity lifting

/// (p-1)*m for a prime p = 3 mod 4 dividing no preimage of the totient m;
/// then A((p-1)m) >= A(m) and v2((p-1)m) = v2(m) + 1, because n -> p*n maps
/// phi^{-1}(m) injectively into phi^{-1}((p-1)m).
inline u64 lift_totient(u64 m, u64 p) {
    if (!is_prime(p)) throw invalid_input("p-not-prime: lift requires a prime p");
    if (p % 4 != 3) throw invalid_input("p-not-3-mod-4");
    const PreimageSet pre = inverse_phi(m);
    if (pre.empty()) throw invalid_input("m-nontotient");
    for (u64 e : pre.elements)
        if (e % p == 0) throw invalid_input("p-divides-preimage");
    if (m > 0 && (p - 1) > ~u64{0} / m) throw limit_exceeded("lift_totient: product overflows");
    return (p - 1) * m;
}

}  // namespace totstrat

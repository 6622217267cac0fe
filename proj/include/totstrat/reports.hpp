#pragma once
// Table reproductions at desk scale, the cross-module invariant check suite,
// and CSV/JSON emission. Decimal columns are truncated toward zero at fixed
// precision (4 digits for the ratio table, 6 for the totients-2-mod-4 table),
// computed in integers so rendering is exact and platform-independent.

#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "totstrat/arith.hpp"
#include "totstrat/config.hpp"
#include "totstrat/inverse_totient.hpp"
#include "totstrat/strata.hpp"

namespace totstrat {

enum class TableId { table1, tablemax, table2, checks };

using Cell = std::variant<u64, std::string>;

struct ReportRow {
    TableId table = TableId::checks;
    u64 x = 0;
    std::vector<std::pair<std::string, Cell>> columns;
};

inline std::string_view table_header(TableId id) {
    switch (id) {
        case TableId::table1: return "x,pi,v1_mult2,v1_mult4,ratio";
        case TableId::tablemax: return "x,ell,max_mult";
        case TableId::table2: return "x,ell,ratio";
        case TableId::checks: return "check_id,x,status,detail";
    }
    return "";
}

/// num/den truncated toward zero to `digits` fractional digits.
inline std::string decimal_ratio(u64 num, u64 den, int digits) {
    if (den == 0) throw invalid_input("decimal_ratio: zero denominator");
    u64 scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const u64 ip = num / den;
    const u64 frac = static_cast<u64>(static_cast<u128>(num % den) * scale / den);
    std::string f = std::to_string(frac);
    f.insert(f.begin(), digits - f.size(), '0');
    return std::to_string(ip) + "." + f;
}

/// Same, for numerators wider than 64 bits (2^l * S^l can pass 2^64 late in
/// the stratification).
inline std::string decimal_ratio_wide(u128 num, u64 den, int digits) {
    if (den == 0) throw invalid_input("decimal_ratio: zero denominator");
    u64 scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    const u128 ip = num / den;
    const u64 frac = static_cast<u64>(num % den * scale / den);
    std::string head;
    u128 v = ip;
    if (v == 0) head = "0";
    while (v > 0) {
        head.insert(head.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::string f = std::to_string(frac);
    f.insert(f.begin(), digits - f.size(), '0');
    return head + "." + f;
}

// ---------------------------------------------------------------------------
// tables

/// Rows (x, pi(x), |V^1_2(x)|, |V^1_4(x)|, ratio = v1_mult2/pi to 6 digits).
inline std::vector<ReportRow> table1(std::span<const u64> xs, const RunConfig& cfg = {}) {
    std::vector<ReportRow> rows;
    for (u64 x : xs) {
        if (x < 2) throw invalid_input("table1: x must be >= 2");
        const u64 pi = prime_pi(x, cfg);
        const auto [m2, m4] = v1_split(x, cfg);
        ReportRow row;
        row.table = TableId::table1;
        row.x = x;
        row.columns = {{"x", x},
                       {"pi", pi},
                       {"v1_mult2", m2},
                       {"v1_mult4", m4},
                       {"ratio", decimal_ratio(m2, pi, 6)}};
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Rows (x, ell, max A over stratum ell), for each x then each ell.
inline std::vector<ReportRow> table_max(std::span<const u64> xs, std::span<const int> ells,
                                        const RunConfig& cfg = {}) {
    std::vector<ReportRow> rows;
    for (u64 x : xs) {
        const StrataResult res = compute_strata(x, cfg);
        for (int ell : ells) {
            ReportRow row;
            row.table = TableId::tablemax;
            row.x = x;
            row.columns = {{"x", x}, {"ell", static_cast<u64>(ell)}, {"max_mult", max_mult(res, ell)}};
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

/// Rows (x, ell, 2^ell*S^ell(x)/V(x) truncated to 4 digits). The source table
/// prints decimal commas; this emits decimal points.
inline std::vector<ReportRow> table_ratio(std::span<const u64> xs, std::span<const int> ells,
                                          const RunConfig& cfg = {}) {
    std::vector<ReportRow> rows;
    for (u64 x : xs) {
        const StrataResult res = compute_strata(x, cfg);
        for (int ell : ells) {
            const auto& st = res.at(ell);
            ReportRow row;
            row.table = TableId::table2;
            row.x = x;
            row.columns = {{"x", x},
                           {"ell", static_cast<u64>(ell)},
                           {"ratio", decimal_ratio_wide(static_cast<u128>(st.s_sum) << ell,
                                                        res.v_total, 4)}};
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// check suite

struct CheckReport {
    std::vector<ReportRow> rows;
    bool all_pass = true;
};

namespace detail {

inline void add_check(CheckReport& rep, u64 x, const std::string& id, bool pass,
                      const std::string& witness) {
    ReportRow row;
    row.table = TableId::checks;
    row.x = x;
    row.columns = {{"check_id", id},
                   {"x", x},
                   {"status", std::string(pass ? "pass" : "fail")},
                   {"detail", witness}};
    rep.rows.push_back(std::move(row));
    rep.all_pass = rep.all_pass && pass;
}

}  // namespace detail

/// Every cross-module invariant at scale x, each as one pass/fail row with
/// witnessing values (failures are data, not errors). Scans over odd r and
/// the count-identity cross-check follow their stated envelopes (capped at
/// 10^5); the omega bound needs x >= 10^4 to be meaningful and is skipped
/// below that.
inline CheckReport check_suite(u64 x, const RunConfig& cfg = {}) {
    if (x < 2) throw invalid_input("check_suite: x must be >= 2");
    CheckReport rep;
    std::ostringstream detail;

    const StrataResult res = compute_strata(x, cfg);
    const int kx = k0(x);

    // V(x) = 1 + sum_l V^l(x): every totient > 1 is even
    {
        u64 sum = 1;
        for (const auto& st : res.strata) sum += st.v_count;
        detail.str("");
        detail << "V=" << res.v_total << " 1+sum(V^l)=" << sum;
        detail::add_check(rep, x, "partition", res.v_total == sum, detail.str());
    }
    // S(x) > x
    {
        detail.str("");
        detail << "S=" << res.s_total << " x=" << x;
        detail::add_check(rep, x, "s_exceeds_x", res.s_total > x, detail.str());
    }
    // S^l cross-check against the independent single-pass tally
    if (x <= 100000) {
        const auto direct = stratum_s_direct(x, cfg);
        bool ok = direct[0] == 2;  // phi(n) = 1 exactly for n = 1, 2
        for (const auto& st : res.strata)
            ok = ok && direct[static_cast<std::size_t>(st.ell)] == st.s_sum;
        for (std::size_t l = res.strata.size() + 1; l < direct.size(); ++l)
            ok = ok && direct[l] == 0;
        detail.str("");
        detail << "buckets=" << res.strata.size() << " direct[0]=" << direct[0];
        detail::add_check(rep, x, "count_identity", ok, detail.str());
    }
    // 2^n S^{l+n}(2^n x) >= S^l(x)
    {
        bool ok = true;
        detail.str("");
        detail << "grid l<=8 n<=3";
        for (int n = 1; n <= 3 && ok; ++n) {
            const StrataResult up = compute_strata(x << n, cfg);
            for (int l = 1; l <= std::min(8, kx) && ok; ++l) {
                const u64 lhs = up.at(l + n).s_sum << n;
                if (lhs < res.at(l).s_sum) {
                    ok = false;
                    detail.str("");
                    detail << "l=" << l << " n=" << n << " 2^n*S^{l+n}(2^n x)=" << lhs
                           << " < S^l(x)=" << res.at(l).s_sum;
                }
            }
        }
        detail::add_check(rep, x, "doubling", ok, detail.str());
    }
    // V^l(x) < sum_{i<=l+1} pi_i(x)
    if (x >= 10000) {
        const auto hist = omega_histogram(x, cfg);
        bool ok = true;
        detail.str("");
        detail << "l<=" << std::min(6, kx);
        for (int l = 1; l <= std::min(6, kx); ++l) {
            u64 sum = 0;
            for (int i = 1; i <= l + 1; ++i) sum += hist[static_cast<std::size_t>(i)];
            if (res.at(l).v_count >= sum) {
                ok = false;
                detail.str("");
                detail << "l=" << l << " V^l=" << res.at(l).v_count << " sum(pi_i)=" << sum;
            }
        }
        detail::add_check(rep, x, "omega_bound", ok, detail.str());
    }
    // |R_t(x)| vs pi(floor((2x)^{1/t})): the root bounds the generating
    // primes, not the member count, so this fails once several exponents fit
    for (int t : {2, 3}) {
        const auto rt = r_t_members(x, t, cfg);
        const u64 lim = iroot(2 * x, t);
        const u64 pi = prime_pi(lim, cfg);
        detail.str("");
        detail << "|R_" << t << "|=" << rt.size() << " pi(" << lim << ")=" << pi;
        detail::add_check(rep, x, t == 2 ? "rt_pi_bound_t2" : "rt_pi_bound_t3",
                          rt.size() <= pi, detail.str());
    }
    // classification of phi^{-1}(2r) against the full preimage enumeration
    {
        const u64 cap = std::min<u64>(x, 100000);
        bool ok = true;
        std::vector<u64> quad_totients;
        detail.str("");
        detail << "2r<=" << cap;
        for (u64 r = 3; 2 * r <= cap && ok; r += 2) {
            const TwoMod4Class c = classify_2r(r);
            const PreimageSet pre = inverse_phi(2 * r);
            const bool mult_ok =
                (c.multiplicity == 0 || c.multiplicity == 2 || c.multiplicity == 4) &&
                c.multiplicity == pre.multiplicity();
            if (!mult_ok || c.elements() != pre.elements) {
                ok = false;
                detail.str("");
                detail << "r=" << r << " classified=" << c.multiplicity
                       << " enumerated=" << pre.multiplicity();
            }
            if (c.pattern == TwoMod4Pattern::quad) quad_totients.push_back(2 * r);
        }
        detail::add_check(rep, x, "two_mod4_classes", ok, detail.str());

        // totients 2 mod 4 with multiplicity 4 all possess a q^m preimage
        const auto r2 = r_t_members(cap, 2, cfg);
        bool sub = true;
        detail.str("");
        detail << "|V14(" << cap << ")|=" << quad_totients.size();
        for (u64 m : quad_totients) {
            if (!std::binary_search(r2.begin(), r2.end(), m)) {
                sub = false;
                detail.str("");
                detail << "m=" << m << " not in R_2";
                break;
            }
        }
        detail::add_check(rep, x, "v14_in_r2", sub, detail.str());
    }
    return rep;
}

// ---------------------------------------------------------------------------
// emission

/// CSV with the fixed per-table header, LF endings, no BOM. Emitted fields
/// never contain commas, so no quoting is applied.
inline std::string to_csv(TableId id, std::span<const ReportRow> rows) {
    std::string out{table_header(id)};
    out += '\n';
    for (const ReportRow& row : rows) {
        bool first = true;
        for (const auto& [name, cell] : row.columns) {
            if (!first) out += ',';
            first = false;
            if (std::holds_alternative<u64>(cell)) out += std::to_string(std::get<u64>(cell));
            else out += std::get<std::string>(cell);
        }
        out += '\n';
    }
    return out;
}

/// JSON: one object per row, keys in column order. Integers above 2^53 are
/// emitted as decimal strings so consumers with double-backed numbers keep
/// exact values.
inline std::string to_json(TableId, std::span<const ReportRow> rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ReportRow& row : rows) {
        nlohmann::ordered_json obj;
        for (const auto& [name, cell] : row.columns) {
            if (std::holds_alternative<u64>(cell)) {
                const u64 v = std::get<u64>(cell);
                if (v > (u64{1} << 53)) obj[name] = std::to_string(v);
                else obj[name] = v;
            } else {
                obj[name] = std::get<std::string>(cell);
            }
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

/// Inverse of to_csv for the fixed schemas (round-trip exact).
inline std::vector<ReportRow> parse_csv(TableId id, std::string_view text) {
    std::vector<std::string> names;
    std::vector<bool> numeric;
    {
        std::string_view header = table_header(id);
        std::size_t start = 0;
        while (start <= header.size()) {
            const std::size_t comma = header.find(',', start);
            const std::string_view name =
                header.substr(start, comma == std::string_view::npos ? comma : comma - start);
            names.emplace_back(name);
            start = comma == std::string_view::npos ? header.size() + 1 : comma + 1;
        }
        for (const std::string& n : names)
            numeric.push_back(n == "x" || n == "pi" || n == "v1_mult2" || n == "v1_mult4" ||
                              n == "ell" || n == "max_mult");
    }
    std::vector<ReportRow> rows;
    std::size_t pos = 0;
    bool first_line = true;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (first_line) {  // header
            first_line = false;
            if (line != table_header(id)) throw invalid_input("parse_csv: header mismatch");
            continue;
        }
        if (line.empty()) continue;
        ReportRow row;
        row.table = id;
        std::size_t start = 0;
        for (std::size_t c = 0; c < names.size(); ++c) {
            std::size_t comma = c + 1 == names.size() ? line.size() : line.find(',', start);
            if (comma == std::string_view::npos) throw invalid_input("parse_csv: short row");
            const std::string field{line.substr(start, comma - start)};
            if (numeric[c]) row.columns.emplace_back(names[c], static_cast<u64>(std::stoull(field)));
            else row.columns.emplace_back(names[c], field);
            if (names[c] == "x") row.x = std::stoull(field);
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace totstrat

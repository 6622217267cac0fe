// totstrat CLI: one subcommand per operation, CSV or JSON on stdout or --out.
// Table subcommands go through the parameter-keyed result cache when a cache
// directory is configured (--cache-dir or TOTSTRAT_CACHE_DIR).
//
// Exit codes: 0 success, 1 input error, 2 limit/resource error, 3 check-suite
// failure.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "totstrat/totstrat.hpp"

namespace {

using namespace totstrat;

// "2,5-7" -> {2, 5, 6, 7}
std::vector<int> parse_ell_spec(const std::string& spec) {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        const auto dash = tok.find('-');
        if (dash == std::string::npos) {
            out.push_back(std::stoi(tok));
        } else {
            const int a = std::stoi(tok.substr(0, dash));
            const int b = std::stoi(tok.substr(dash + 1));
            if (b < a) throw invalid_input("bad --ell range: " + tok);
            for (int l = a; l <= b; ++l) out.push_back(l);
        }
    }
    if (out.empty()) throw invalid_input("empty --ell specification");
    return out;
}

std::string join_u64(const std::vector<u64>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += '+';
        s += std::to_string(v[i]);
    }
    return s;
}

std::string join_int(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += '+';
        s += std::to_string(v[i]);
    }
    return s;
}

void emit(const std::string& bytes, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << bytes;
        return;
    }
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw error(errc::limit_exceeded, "cannot write " + out_path);
}

nlohmann::ordered_json json_int(u64 v) {
    // integers past 2^53 go out as decimal strings so double-backed JSON
    // consumers keep exact values
    if (v > (u64{1} << 53)) return std::to_string(v);
    return v;
}

nlohmann::ordered_json witness_json(const DicksonWitness& w) {
    nlohmann::ordered_json obj;
    obj["k"] = w.k;
    obj["n"] = json_int(w.n);
    obj["m"] = json_int(w.m);
    obj["p"] = nlohmann::ordered_json::array();
    obj["q"] = nlohmann::ordered_json::array();
    for (u64 v : w.p) obj["p"].push_back(json_int(v));
    for (u64 v : w.q) obj["q"].push_back(json_int(v));
    obj["totient"] = json_int(w.totient);
    return obj;
}

// compute -> render -> cache; cache key carries every parameter the bytes
// depend on (workers and memory cap deliberately excluded: results are
// worker- and cap-independent by construction)
std::string cached_render(const RunConfig& cfg, const std::string& key,
                          const std::function<std::string()>& render) {
    Cache cache(cfg.cache_dir);
    if (auto hit = cache.get(key)) return *hit;
    std::string bytes = render();
    cache.put(key, bytes);
    return bytes;
}

std::string key_prefix(const RunConfig& cfg, const std::string& op) {
    std::ostringstream k;
    k << "v" << kCacheFormatVersion << ";op=" << op << ";sieve=" << cfg.sieve_limit
      << ";seg=" << cfg.segment_size
      << ";fmt=" << (cfg.output_format == OutputFormat::csv ? "csv" : "json");
    return k.str();
}

std::string render_rows(const RunConfig& cfg, TableId id, std::span<const ReportRow> rows) {
    return cfg.output_format == OutputFormat::csv ? to_csv(id, rows) : to_json(id, rows);
}

std::string render_strata(const RunConfig& cfg, const StrataResult& res) {
    u64 overall_max = 0;
    for (const auto& st : res.strata) overall_max = std::max(overall_max, st.max_mult);
    if (cfg.output_format == OutputFormat::json) {
        nlohmann::ordered_json obj;
        obj["x"] = json_int(res.x);
        obj["v_total"] = json_int(res.v_total);
        obj["s_total"] = json_int(res.s_total);
        obj["strata"] = nlohmann::ordered_json::array();
        for (const auto& st : res.strata) {
            nlohmann::ordered_json s;
            s["ell"] = st.ell;
            s["v_count"] = json_int(st.v_count);
            s["s_sum"] = json_int(st.s_sum);
            s["max_mult"] = json_int(st.max_mult);
            nlohmann::ordered_json hist = nlohmann::ordered_json::object();
            for (const auto& [mult, cnt] : st.histogram) hist[std::to_string(mult)] = json_int(cnt);
            s["histogram"] = std::move(hist);
            obj["strata"].push_back(std::move(s));
        }
        return obj.dump(2) + "\n";
    }
    // CSV: one row per stratum; final ell=0 row carries the totals
    // (v_count = V(x), s_sum = S(x), max_mult = overall maximum)
    std::string out = "x,ell,v_count,s_sum,max_mult\n";
    for (const auto& st : res.strata) {
        out += std::to_string(res.x) + "," + std::to_string(st.ell) + "," +
               std::to_string(st.v_count) + "," + std::to_string(st.s_sum) + "," +
               std::to_string(st.max_mult) + "\n";
    }
    out += std::to_string(res.x) + ",0," + std::to_string(res.v_total) + "," +
           std::to_string(res.s_total) + "," + std::to_string(overall_max) + "\n";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2-adic stratification of Euler totients"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may trail the subcommand

    RunConfig cfg;
    if (const char* env = std::getenv("TOTSTRAT_CACHE_DIR")) cfg.cache_dir = env;
    std::string format = "csv";
    std::string out_path;
    app.add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", out_path, "write output to PATH instead of stdout");
    app.add_option("--sieve-limit", cfg.sieve_limit, "largest n any sieve may touch");
    app.add_option("--segment-size", cfg.segment_size, "sieve segment length");
    app.add_option("--memory-cap", cfg.memory_cap_bytes, "memory budget in bytes");
    app.add_option("--workers", cfg.workers, "worker threads");
    app.add_option("--cache-dir", cfg.cache_dir, "result cache directory (or TOTSTRAT_CACHE_DIR)");

    // sieve
    u64 lo = 1, hi = 0;
    bool with_omega = false;
    auto* sc_sieve = app.add_subcommand("sieve", "emit phi (and omega) over [lo, hi)");
    sc_sieve->add_option("--lo", lo, "inclusive start, >= 1")->required();
    sc_sieve->add_option("--hi", hi, "exclusive end")->required();
    sc_sieve->add_flag("--omega", with_omega, "add the omega column");

    // invphi / mult
    u64 arg_m = 0;
    auto* sc_invphi = app.add_subcommand("invphi", "all n with phi(n) = M");
    sc_invphi->add_option("M", arg_m, "totient value")->required();
    u64 mult_m = 0;
    auto* sc_mult = app.add_subcommand("mult", "multiplicity A(M)");
    sc_mult->add_option("M", mult_m, "totient value")->required();

    // classify
    u64 arg_r = 0;
    auto* sc_classify = app.add_subcommand("classify", "structure of phi^{-1}(2R) for odd R");
    sc_classify->add_option("R", arg_r, "odd r >= 1")->required();

    // rt
    u64 rt_x = 0;
    int rt_t = 2;
    auto* sc_rt = app.add_subcommand("rt", "totients <= x with a prime-power preimage q^j, j >= t");
    sc_rt->add_option("--x", rt_x)->required();
    sc_rt->add_option("--t", rt_t)->required();

    // strata
    u64 strata_x = 0;
    int strata_ellmax = 1;
    auto* sc_strata = app.add_subcommand("strata", "V^l, S^l, max multiplicity per stratum");
    sc_strata->add_option("--x", strata_x)->required();
    sc_strata->add_option("--ell-max", strata_ellmax)->required();

    // tables
    std::vector<u64> t1_xs;
    auto* sc_table1 = app.add_subcommand("table1", "totients 2 mod 4 by multiplicity");
    sc_table1->add_option("--x", t1_xs, "x values")->required()->delimiter(',');

    std::vector<u64> tm_xs;
    std::string tm_ell = "2-7";
    auto* sc_tablemax = app.add_subcommand("tablemax", "maximal multiplicity per stratum");
    sc_tablemax->add_option("--x", tm_xs, "x values")->required()->delimiter(',');
    sc_tablemax->add_option("--ell", tm_ell, "strata, e.g. 2-7 or 2,3,5");

    std::vector<u64> t2_xs;
    std::string t2_ell = "2-15";
    auto* sc_table2 = app.add_subcommand("table2", "2^l*S^l(x)/V(x) per stratum");
    sc_table2->add_option("--x", t2_xs, "x values")->required()->delimiter(',');
    sc_table2->add_option("--ell", t2_ell, "strata, e.g. 2-15");

    // dickson
    int dk_k = 1;
    u64 dk_bound = 0;
    bool dk_verify = false;
    auto* sc_dickson = app.add_subcommand("dickson", "search a k-tuple witness in stratum 2");
    sc_dickson->add_option("--k", dk_k)->required();
    sc_dickson->add_option("--bound", dk_bound)->required();
    sc_dickson->add_flag("--verify", dk_verify, "verify through the inverse-totient path");

    // lift
    u64 lift_m = 0, lift_p = 0;
    auto* sc_lift = app.add_subcommand("lift", "(p-1)*m for p = 3 mod 4 dividing no preimage of m");
    sc_lift->add_option("--m", lift_m)->required();
    sc_lift->add_option("--p", lift_p)->required();

    // check
    u64 check_x = 0;
    auto* sc_check = app.add_subcommand("check", "run the invariant suite at scale x");
    sc_check->add_option("--x", check_x)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    cfg.output_format = format == "json" ? OutputFormat::json : OutputFormat::csv;

    try {
        if (sc_sieve->parsed()) {
            std::ostringstream out;
            out << (with_omega ? "n,phi,omega\n" : "n,phi\n");
            for_each_phi_segment(lo, hi, cfg, [&](u64 seg_lo, std::span<const u64> vals) {
                OmegaSegment om;  // per-segment so arbitrary ranges stream
                if (with_omega) om = omega_range(seg_lo, seg_lo + vals.size(), cfg);
                for (std::size_t i = 0; i < vals.size(); ++i) {
                    out << seg_lo + i << ',' << vals[i];
                    if (with_omega) out << ',' << static_cast<unsigned>(om.omega(seg_lo + i));
                    out << '\n';
                }
            });
            emit(out.str(), out_path);
        } else if (sc_invphi->parsed()) {
            const PreimageSet pre = inverse_phi(arg_m);
            if (cfg.output_format == OutputFormat::json) {
                nlohmann::ordered_json obj;
                obj["m"] = json_int(pre.m);
                obj["elements"] = nlohmann::ordered_json::array();
                for (u64 e : pre.elements) obj["elements"].push_back(json_int(e));
                obj["multiplicity"] = pre.multiplicity();
                emit(obj.dump(2) + "\n", out_path);
            } else {
                std::string line;
                for (std::size_t i = 0; i < pre.elements.size(); ++i) {
                    if (i) line += ' ';
                    line += std::to_string(pre.elements[i]);
                }
                emit(line + "\n", out_path);
            }
        } else if (sc_mult->parsed()) {
            emit(std::to_string(multiplicity(mult_m)) + "\n", out_path);
        } else if (sc_classify->parsed()) {
            const TwoMod4Class c = classify_2r(arg_r);
            if (cfg.output_format == OutputFormat::json) {
                nlohmann::ordered_json obj;
                obj["r"] = json_int(c.r);
                switch (c.pattern) {
                    case TwoMod4Pattern::empty: obj["pattern"] = "EMPTY"; break;
                    case TwoMod4Pattern::pair: obj["pattern"] = "PAIR"; obj["p"] = json_int(c.p); obj["n"] = json_int(c.n); break;
                    case TwoMod4Pattern::quad: obj["pattern"] = "QUAD"; obj["q"] = json_int(c.q); obj["m"] = json_int(c.m); break;
                    case TwoMod4Pattern::exceptional: obj["pattern"] = "EXCEPTIONAL"; break;
                }
                obj["multiplicity"] = c.multiplicity;
                nlohmann::ordered_json el = nlohmann::ordered_json::array();
                for (u64 e : c.elements()) el.push_back(json_int(e));
                obj["elements"] = std::move(el);
                emit(obj.dump(2) + "\n", out_path);
            } else {
                std::ostringstream out;
                switch (c.pattern) {
                    case TwoMod4Pattern::empty: out << "EMPTY"; break;
                    case TwoMod4Pattern::pair: out << "PAIR p=" << c.p << " n=" << c.n; break;
                    case TwoMod4Pattern::quad: out << "QUAD q=" << c.q << " m=" << c.m; break;
                    case TwoMod4Pattern::exceptional: out << "EXCEPTIONAL"; break;
                }
                out << " multiplicity=" << c.multiplicity << "\n";
                emit(out.str(), out_path);
            }
        } else if (sc_rt->parsed()) {
            const auto members = r_t_members(rt_x, rt_t, cfg);
            std::string line;
            for (std::size_t i = 0; i < members.size(); ++i) {
                if (i) line += ' ';
                line += std::to_string(members[i]);
            }
            emit(line + "\n", out_path);
        } else if (sc_strata->parsed()) {
            const std::string key =
                key_prefix(cfg, "strata") + ";x=" + std::to_string(strata_x) +
                ";ellmax=" + std::to_string(strata_ellmax);
            emit(cached_render(cfg, key,
                               [&] { return render_strata(cfg, stratum_stats(strata_x, strata_ellmax, cfg)); }),
                 out_path);
        } else if (sc_table1->parsed()) {
            const std::string key = key_prefix(cfg, "table1") + ";x=" + join_u64(t1_xs);
            emit(cached_render(cfg, key,
                               [&] { return render_rows(cfg, TableId::table1, table1(t1_xs, cfg)); }),
                 out_path);
        } else if (sc_tablemax->parsed()) {
            const auto ells = parse_ell_spec(tm_ell);
            const std::string key =
                key_prefix(cfg, "tablemax") + ";x=" + join_u64(tm_xs) + ";ell=" + join_int(ells);
            emit(cached_render(cfg, key,
                               [&] { return render_rows(cfg, TableId::tablemax, table_max(tm_xs, ells, cfg)); }),
                 out_path);
        } else if (sc_table2->parsed()) {
            const auto ells = parse_ell_spec(t2_ell);
            const std::string key =
                key_prefix(cfg, "table2") + ";x=" + join_u64(t2_xs) + ";ell=" + join_int(ells);
            emit(cached_render(cfg, key,
                               [&] { return render_rows(cfg, TableId::table2, table_ratio(t2_xs, ells, cfg)); }),
                 out_path);
        } else if (sc_dickson->parsed()) {
            const auto witness = search_tuple(dk_k, dk_bound, cfg);
            nlohmann::ordered_json obj;
            if (!witness) {
                obj["found"] = false;
                obj["k"] = dk_k;
                obj["bound"] = json_int(dk_bound);
            } else {
                obj = witness_json(*witness);
                if (dk_verify) {
                    const ConstructResult cr = construct_totient(*witness);
                    obj["verified"] = cr.verified_multiplicity.has_value();
                    if (cr.verified_multiplicity)
                        obj["verified_multiplicity"] = json_int(*cr.verified_multiplicity);
                }
            }
            emit(obj.dump(2) + "\n", out_path);
        } else if (sc_lift->parsed()) {
            emit(std::to_string(lift_totient(lift_m, lift_p)) + "\n", out_path);
        } else if (sc_check->parsed()) {
            // not cached: the exit code must reflect a fresh run
            const CheckReport rep = check_suite(check_x, cfg);
            emit(render_rows(cfg, TableId::checks, rep.rows), out_path);
            if (!rep.all_pass) return 3;
        }
    } catch (const invalid_input& e) {
        std::cerr << "totstrat: " << e.what() << "\n";
        return 1;
    } catch (const limit_exceeded& e) {
        std::cerr << "totstrat: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "totstrat: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

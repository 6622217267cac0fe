#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "totstrat/cache.hpp"

using namespace totstrat;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(TOTSTRAT_CLI_PATH) + " " + args + " 2>/dev/null";
    CliResult res;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

fs::path fresh_dir(const char* tag) {
    const fs::path dir = fs::temp_directory_path() / (std::string("totstrat-test-") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("cache round-trip, miss, and corruption recovery", "[cache]") {
    const fs::path dir = fresh_dir("cache");
    Cache cache(dir.string());
    REQUIRE(cache.enabled());
    CHECK_FALSE(cache.get("nothing").has_value());

    const std::string key = "v1;op=table2;x=12;ell=2+3;fmt=csv";
    const std::string bytes = "x,ell,ratio\n12,2,9.9999\n";
    cache.put(key, bytes);
    auto hit = cache.get(key);
    REQUIRE(hit.has_value());
    CHECK(*hit == bytes);

    // different key misses
    CHECK_FALSE(cache.get(key + ";extra").has_value());

    // truncate the data file: checksum mismatch -> miss, not garbage
    {
        std::ofstream f(cache.data_path(key), std::ios::binary | std::ios::trunc);
        f << "x,ell,ratio\ncorrupted";
    }
    CHECK_FALSE(cache.get(key).has_value());
    // a fresh put repairs the entry
    cache.put(key, bytes);
    CHECK(cache.get(key) == bytes);

    // mangled meta file -> miss
    {
        std::ofstream f(cache.meta_path(key), std::ios::binary | std::ios::trunc);
        f << "not-a-meta-file\n";
    }
    CHECK_FALSE(cache.get(key).has_value());

    // disabled cache never hits and never writes
    Cache off{""};
    CHECK_FALSE(off.enabled());
    off.put("k", "v");
    CHECK_FALSE(off.get("k").has_value());

    // hostile key characters are sanitized but stay distinct
    cache.put("a/b", "first");
    cache.put("a_b", "second");
    CHECK(cache.get("a/b") == std::string("first"));
    CHECK(cache.get("a_b") == std::string("second"));
    fs::remove_all(dir);
}

TEST_CASE("cli: invphi, mult, classify, rt, lift", "[cli]") {
    CHECK(run_cli("invphi 4").out == "5 8 10 12\n");
    CHECK(run_cli("invphi 4").exit_code == 0);
    CHECK(run_cli("invphi 3").out == "\n");  // nontotient: empty set
    CHECK(run_cli("mult 6").out == "4\n");
    CHECK(run_cli("classify 5").out == "PAIR p=11 n=1 multiplicity=2\n");
    CHECK(run_cli("classify 1").out == "EXCEPTIONAL multiplicity=3\n");
    CHECK(run_cli("rt --x 10 --t 2").out == "2 4 6 8\n");
    CHECK(run_cli("lift --m 4 --p 7").out == "24\n");
}

TEST_CASE("cli: exit codes follow the error taxonomy", "[cli]") {
    CHECK(run_cli("nonsense-subcommand").exit_code == 1);
    CHECK(run_cli("classify 4").exit_code == 1);              // invalid input
    CHECK(run_cli("lift --m 4 --p 3").exit_code == 1);        // p divides a preimage
    CHECK(run_cli("mult 1152921504606846978").exit_code == 2);  // past 2^60: limit
    CHECK(run_cli("rt --x 100000 --t 2 --sieve-limit 10").exit_code == 2);
    CHECK(run_cli("check --x 100").exit_code == 3);  // the R_t bound rows fail honestly
    CHECK(run_cli("table1 --x 1002").exit_code == 0);
}

TEST_CASE("cli: table output, json format, --out", "[cli]") {
    const auto t1 = run_cli("table1 --x 1002");
    CHECK(t1.out == "x,pi,v1_mult2,v1_mult4,ratio\n1002,168,87,5,0.517857\n");

    const auto tj = run_cli("--format json table1 --x 1002");
    CHECK(tj.out.find("\"ratio\": \"0.517857\"") != std::string::npos);

    const fs::path dir = fresh_dir("cliout");
    const fs::path out = dir / "t1.csv";
    const auto r = run_cli("--out " + out.string() + " table1 --x 1002");
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    std::ifstream f(out);
    std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(content == t1.out);
    fs::remove_all(dir);
}

TEST_CASE("cli: dickson witness json", "[cli]") {
    const auto r = run_cli("dickson --k 2 --bound 100 --verify");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"n\": 3") != std::string::npos);
    CHECK(r.out.find("\"m\": 6") != std::string::npos);
    CHECK(r.out.find("1051") != std::string::npos);
    CHECK(r.out.find("\"totient\": 1228500") != std::string::npos);
    CHECK(r.out.find("\"verified\": true") != std::string::npos);

    const auto nf = run_cli("dickson --k 2 --bound 0");
    CHECK(nf.exit_code == 0);
    CHECK(nf.out.find("\"found\": false") != std::string::npos);
}

TEST_CASE("cli: sieve emission", "[cli]") {
    const auto r = run_cli("sieve --lo 1 --hi 7 --omega");
    CHECK(r.out ==
          "n,phi,omega\n"
          "1,1,0\n"
          "2,1,1\n"
          "3,2,1\n"
          "4,2,1\n"
          "5,4,1\n"
          "6,2,2\n");
    const auto plain = run_cli("sieve --lo 10 --hi 13");
    CHECK(plain.out == "n,phi\n10,4\n11,10\n12,4\n");
    CHECK(run_cli("sieve --lo 5 --hi 3").exit_code == 1);
    CHECK(run_cli("rt --x 10 --t 1").exit_code == 1);
}

TEST_CASE("cli: strata summary row", "[cli]") {
    const auto r = run_cli("strata --x 10 --ell-max 3");
    CHECK(r.out ==
          "x,ell,v_count,s_sum,max_mult\n"
          "10,1,3,9,4\n"
          "10,2,1,4,4\n"
          "10,3,1,5,5\n"
          "10,0,6,20,5\n");
}

TEST_CASE("cli: cache reuse is byte-identical and survives corruption", "[cli][cache]") {
    const fs::path dir = fresh_dir("clicache");
    const std::string flags = "--cache-dir " + dir.string() + " table2 --x 100000 --ell 2-6";
    const auto first = run_cli(flags);
    REQUIRE(first.exit_code == 0);
    REQUIRE(!first.out.empty());

    bool saw_entry = false;
    for (const auto& e : fs::directory_iterator(dir)) saw_entry = saw_entry || e.path().extension() == ".dat";
    CHECK(saw_entry);

    const auto second = run_cli(flags);
    CHECK(second.out == first.out);

    // without the cache dir: same bytes (cache can never change results)
    const auto uncached = run_cli("table2 --x 100000 --ell 2-6");
    CHECK(uncached.out == first.out);

    // nor can the worker count
    CHECK(run_cli("table2 --x 100000 --ell 2-6 --workers 1").out == first.out);
    CHECK(run_cli("table2 --x 100000 --ell 2-6 --workers 3").out == first.out);

    // corrupt every entry: output identical, entries rebuilt
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".dat") {
            std::ofstream f(e.path(), std::ios::binary | std::ios::trunc);
            f << "garbage";
        }
    }
    const auto third = run_cli(flags);
    CHECK(third.out == first.out);
    fs::remove_all(dir);
}

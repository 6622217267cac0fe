#pragma once
// Run configuration and the error taxonomy shared by every module.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>

namespace totstrat {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

enum class errc {
    invalid_input = 1,   // argument outside an operation's domain
    limit_exceeded = 2,  // configured sieve / memory / range limit hit
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

struct invalid_input : error {
    explicit invalid_input(const std::string& what) : error(errc::invalid_input, what) {}
};

struct limit_exceeded : error {
    explicit limit_exceeded(const std::string& what) : error(errc::limit_exceeded, what) {}
};

enum class OutputFormat { csv, json };

struct RunConfig {
    u64 sieve_limit = u64{1} << 31;       // largest n any sieve pass may touch
    u64 segment_size = u64{1} << 22;      // values per sieve segment
    u64 memory_cap_bytes = u64{1} << 30;  // budget for sieve buffers and histograms
    unsigned workers = default_workers();
    std::string cache_dir;                // empty: result cache disabled
    OutputFormat output_format = OutputFormat::csv;

    static unsigned default_workers() {
        unsigned n = std::thread::hardware_concurrency();
        return n ? n : 1;
    }
};

}  // namespace totstrat

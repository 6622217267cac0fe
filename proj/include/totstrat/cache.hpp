#pragma once
// Parameter-keyed result cache for rendered reports. One entry is the exact
// emitted bytes plus a small metadata file (version, key, length, checksum);
// entries are human-inspectable and written atomically (temp file + rename).
// A version bump changes every key, invalidating prior entries wholesale.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "totstrat/config.hpp"

namespace totstrat {

inline constexpr int kCacheFormatVersion = 1;

inline u64 fnv1a64(std::string_view bytes) {
    u64 h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class Cache {
public:
    explicit Cache(std::string dir) : dir_(std::move(dir)) {}

    bool enabled() const { return !dir_.empty(); }

    /// Cached bytes for key, or nullopt. Corrupt entries (bad meta, length or
    /// checksum mismatch) are ignored with a warning so callers recompute.
    std::optional<std::string> get(const std::string& key) const {
        if (!enabled()) return std::nullopt;
        namespace fs = std::filesystem;
        const fs::path data = data_path(key);
        const fs::path meta = meta_path(key);
        std::error_code ec;
        if (!fs::exists(data, ec) || !fs::exists(meta, ec)) return std::nullopt;

        std::ifstream mf(meta);
        std::string line;
        int version = -1;
        std::string stored_key;
        u64 size = 0, checksum = 0;
        bool meta_ok = static_cast<bool>(mf);
        while (meta_ok && std::getline(mf, line)) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) { meta_ok = false; break; }
            const std::string_view name{line.data(), eq};
            const std::string value = line.substr(eq + 1);
            try {
                if (name == "version") version = std::stoi(value);
                else if (name == "key") stored_key = value;
                else if (name == "size") size = std::stoull(value);
                else if (name == "fnv1a64") checksum = std::stoull(value, nullptr, 16);
            } catch (const std::exception&) {
                meta_ok = false;
            }
        }
        std::string bytes;
        if (meta_ok) {
            std::ifstream df(data, std::ios::binary);
            std::ostringstream buf;
            buf << df.rdbuf();
            bytes = std::move(buf).str();
        }
        if (!meta_ok || version != kCacheFormatVersion || stored_key != key ||
            bytes.size() != size || fnv1a64(bytes) != checksum) {
            std::cerr << "totstrat: ignoring corrupt cache entry for key '" << key << "'\n";
            return std::nullopt;
        }
        return bytes;
    }

    void put(const std::string& key, std::string_view bytes) const {
        if (!enabled()) return;
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(dir_, ec);

        std::ostringstream meta;
        meta << "version=" << kCacheFormatVersion << "\n"
             << "key=" << key << "\n"
             << "size=" << bytes.size() << "\n"
             << "fnv1a64=" << std::hex << fnv1a64(bytes) << "\n";

        write_atomic(data_path(key), bytes);
        write_atomic(meta_path(key), meta.str());
    }

    std::filesystem::path data_path(const std::string& key) const {
        return std::filesystem::path(dir_) / (sanitize(key) + ".dat");
    }
    std::filesystem::path meta_path(const std::string& key) const {
        return std::filesystem::path(dir_) / (sanitize(key) + ".meta");
    }

private:
    static std::string sanitize(const std::string& key) {
        std::string out;
        for (char c : key) {
            const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                              (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_';
            out += keep ? c : '_';
        }
        // keys stay unique after sanitizing: tie the checksum of the raw key on
        char suffix[20];
        std::snprintf(suffix, sizeof suffix, "-%016llx",
                      static_cast<unsigned long long>(fnv1a64(key)));
        return out + suffix;
    }

    static void write_atomic(const std::filesystem::path& target, std::string_view bytes) {
        namespace fs = std::filesystem;
        const fs::path tmp = target.string() + ".tmp";
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
            if (!f) throw error(errc::limit_exceeded, "cache: cannot write " + tmp.string());
        }
        fs::rename(tmp, target);
    }

    std::string dir_;
};

}  // namespace totstrat

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ppk {

// INI-style key/value store. Section headers prefix keys as "section.key";
// '#' and ';' start comments. Lookups throw validation_error when a key is
// missing or fails to parse, so configs fail loudly at the CLI boundary.
class Config {
public:
    Config() = default;
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key,
                           const std::string& fallback) const;
    std::vector<double> get_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    const std::map<std::string, std::string>& entries() const {
        return values_;
    }

    // sorted "key=value" lines; the determinism hash is FNV-1a over this
    std::string canonical() const;
    std::uint64_t hash() const;

private:
    std::map<std::string, std::string> values_;
};

} // namespace ppk

#include "ppk/config.hpp"

#include "ppk/types.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ppk {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
    for (std::size_t i = 0; i < line.size(); ++i)
        if (line[i] == '#' || line[i] == ';') return line.substr(0, i);
    return line;
}

} // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw io_error("config: read failure on " + path);
    return from_string(buf.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw validation_error("config: bad section header at line " +
                                       std::to_string(lineno));
            section = trim(body.substr(1, body.size() - 2));
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw validation_error("config: expected key=value at line " +
                                   std::to_string(lineno));
        std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            throw validation_error("config: empty key at line " +
                                   std::to_string(lineno));
        if (!section.empty()) key = section + "." + key;
        cfg.values_[key] = value;
    }
    return cfg;
}

bool Config::has(const std::string& key) const {
    return values_.count(key) != 0;
}

double Config::get_double(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        throw validation_error("config: missing key " + key);
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (trim(it->second.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw validation_error("config: key " + key + " is not a number: '" +
                           it->second + "'");
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        throw validation_error("config: missing key " + key);
    try {
        std::size_t used = 0;
        const long long v = std::stoll(it->second, &used);
        if (trim(it->second.substr(used)).empty()) return v;
    } catch (const std::exception&) {
    }
    throw validation_error("config: key " + key + " is not an integer: '" +
                           it->second + "'");
}

long long Config::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = values_.at(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw validation_error("config: key " + key + " is not a boolean: '" + v +
                           "'");
}

std::string Config::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        throw validation_error("config: missing key " + key);
    return it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
    return has(key) ? values_.at(key) : fallback;
}

std::vector<double> Config::get_list(const std::string& key) const {
    const std::string raw = get_string(key);
    std::vector<double> out;
    std::istringstream in(raw);
    std::string item;
    while (std::getline(in, item, ',')) {
        const std::string body = trim(item);
        if (body.empty()) continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(body, &used);
            if (!trim(body.substr(used)).empty()) throw std::exception();
            out.push_back(v);
        } catch (const std::exception&) {
            throw validation_error("config: list key " + key +
                                   " has a bad element: '" + body + "'");
        }
    }
    if (out.empty())
        throw validation_error("config: list key " + key + " is empty");
    return out;
}

void Config::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

std::string Config::canonical() const {
    std::ostringstream out;
    for (const auto& [k, v] : values_) out << k << "=" << v << "\n";
    return out.str();
}

std::uint64_t Config::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (const char c : canonical()) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace ppk

#include "ddl/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "ddl/errors.hpp"

namespace ddl {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) {
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        return std::nullopt;
    }
    return v;
}

bool is_integer_literal(const std::string& s) {
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

ConfigValue parse_value(const std::string& raw, int line) {
    const std::string s = trim(raw);
    if (s.empty()) throw ArgumentError("config line " + std::to_string(line) + ": empty value");
    if (s == "true") return true;
    if (s == "false") return false;
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw ArgumentError("config line " + std::to_string(line) + ": unterminated string");
        return s.substr(1, s.size() - 2);
    }
    if (s.front() == '[') {
        if (s.back() != ']') throw ArgumentError("config line " + std::to_string(line) + ": unterminated array");
        std::vector<double> out;
        std::stringstream ss(s.substr(1, s.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            auto v = parse_number(item);
            if (!v) throw ArgumentError("config line " + std::to_string(line) + ": non-numeric array entry '" + item + "'");
            out.push_back(*v);
        }
        return out;
    }
    if (is_integer_literal(s)) return std::stoll(s);
    if (auto v = parse_number(s)) return *v;
    return s;
}

std::string name(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config c;
    std::stringstream ss(text);
    std::string line, section;
    int n = 0;
    while (std::getline(ss, line)) {
        ++n;
        const auto hash = line.find('#');
        // a '#' inside a quoted value is kept
        if (hash != std::string::npos && line.find('"') > hash) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.find('=') == std::string::npos) {
            if (line.back() != ']') throw ArgumentError("config line " + std::to_string(n) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            c.data_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ArgumentError("config line " + std::to_string(n) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ArgumentError("config line " + std::to_string(n) + ": empty key");
        if (c.data_[section].count(key))
            throw ArgumentError("config line " + std::to_string(n) + ": duplicate key " + name(section, key));
        c.data_[section][key] = parse_value(line.substr(eq + 1), n);
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ArgumentError("cannot read config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse(ss.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    return it != data_.end() && it->second.count(key);
}

bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

const ConfigValue& Config::lookup(const std::string& section, const std::string& key) const {
    auto it = data_.find(section);
    if (it == data_.end() || !it->second.count(key)) throw ArgumentError("missing config key " + name(section, key));
    used_.insert(name(section, key));
    return it->second.at(key);
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const auto& v = lookup(section, key);
    if (auto d = std::get_if<double>(&v)) return *d;
    if (auto i = std::get_if<long long>(&v)) return double(*i);
    throw ArgumentError(name(section, key) + " must be a number");
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

long long Config::get_int(const std::string& section, const std::string& key) const {
    const auto& v = lookup(section, key);
    if (auto i = std::get_if<long long>(&v)) return *i;
    throw ArgumentError(name(section, key) + " must be an integer");
}

long long Config::get_int(const std::string& section, const std::string& key, long long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const auto& v = lookup(section, key);
    if (auto b = std::get_if<bool>(&v)) return *b;
    throw ArgumentError(name(section, key) + " must be true or false");
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    const auto& v = lookup(section, key);
    if (auto s = std::get_if<std::string>(&v)) return *s;
    throw ArgumentError(name(section, key) + " must be a string");
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

std::vector<double> Config::get_array(const std::string& section, const std::string& key) const {
    const auto& v = lookup(section, key);
    if (auto a = std::get_if<std::vector<double>>(&v)) return *a;
    if (auto d = std::get_if<double>(&v)) return {*d};
    if (auto i = std::get_if<long long>(&v)) return {double(*i)};
    throw ArgumentError(name(section, key) + " must be an array of numbers");
}

std::optional<double> Config::get_optional(const std::string& section, const std::string& key) const {
    if (!has(section, key)) return std::nullopt;
    return get_double(section, key);
}

void Config::set(const std::string& section, const std::string& key, ConfigValue v) {
    data_[section][key] = std::move(v);
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [s, kv] : data_)
        for (const auto& [k, v] : kv)
            if (!used_.count(name(s, k))) out.push_back(name(s, k));
    return out;
}

std::string Config::dump() const {
    std::ostringstream os;
    os.precision(17);
    auto put = [&](const ConfigValue& v) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, bool>)
                    os << (x ? "true" : "false");
                else if constexpr (std::is_same_v<T, std::string>)
                    os << '"' << x << '"';
                else if constexpr (std::is_same_v<T, std::vector<double>>) {
                    os << '[';
                    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
                    os << ']';
                } else
                    os << x;
            },
            v);
    };
    for (const auto& [s, kv] : data_) {
        if (!s.empty()) os << "[" << s << "]\n";
        for (const auto& [k, v] : kv) {
            os << k << " = ";
            put(v);
            os << "\n";
        }
    }
    return os.str();
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return double(next() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ddl

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace ddl {

// Sectioned key-value text:
//
//   # comment
//   experiment = simulate        top-level keys live in section ""
//   [solver]
//   dt = 1e-3
//   adaptive_dt = true
//   modes = [1, 2, 3]
//   name = "quoted string"
//
// Values are typed at parse time: true/false, integers, floats, [arrays of
// numbers], quoted or bare strings.
using ConfigValue = std::variant<bool, long long, double, std::string, std::vector<double>>;

class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const;

    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long long get_int(const std::string& section, const std::string& key) const;
    long long get_int(const std::string& section, const std::string& key, long long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
    std::vector<double> get_array(const std::string& section, const std::string& key) const;
    std::optional<double> get_optional(const std::string& section, const std::string& key) const;

    void set(const std::string& section, const std::string& key, ConfigValue v);

    // Keys never read by any getter, as "section.key".
    std::vector<std::string> unused_keys() const;

    const std::map<std::string, std::map<std::string, ConfigValue>>& sections() const { return data_; }
    std::string dump() const;

private:
    const ConfigValue& lookup(const std::string& section, const std::string& key) const;

    std::map<std::string, std::map<std::string, ConfigValue>> data_;
    mutable std::set<std::string> used_;
};

// 64-bit generator with splitmix sequence semantics: the state advances by
// 0x9E3779B97F4A7C15 per draw and each output is a fixed bijective mix of the
// new state, so a seed determines the whole stream.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double uniform();  // [0, 1) with 53 random bits
    double normal();   // Box-Muller
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }
    result_type operator()() { return next(); }

private:
    std::uint64_t state_;
};

}  // namespace ddl

// Copyright 2026 The spinent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// config.hpp: key=value experiment configuration.
//
//   # comment
//   experiment = p2
//   chain.spin = 1/2
//   chain.field = 3.7
//
// Keys are dotted, one per line, each at most once. Lists are comma
// separated. Command-line overrides use the same syntax and win over the file.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinent/errors.hpp"

namespace spinent {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, int line, const std::string& message)
        : std::runtime_error(format(source, line, message)), source_(std::move(source)), line_(line) {}

    const std::string& source() const { return source_; }
    int line() const { return line_; }

private:
    static std::string format(const std::string& source, int line, const std::string& message) {
        std::string where = source;
        if (line > 0) where += ":" + std::to_string(line);
        return where.empty() ? message : where + ": " + message;
    }
    std::string source_;
    int line_;
};

struct ConfigEntry {
    std::string value;
    std::string source;
    int line = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline bool valid_key(std::string_view k) {
    if (k.empty() || k.front() == '.' || k.back() == '.') return false;
    return std::all_of(k.begin(), k.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    });
}

}  // namespace detail

// Raw key/value pairs with their origin. Typed access goes through the schema.
class Config {
public:
    static Config parse(std::string_view text, const std::string& source) {
        Config cfg;
        std::istringstream in{std::string(text)};
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            std::string_view s = raw;
            if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
            s = detail::trim(s);
            if (s.empty()) continue;
            cfg.set_line(s, source, line);
        }
        return cfg;
    }

    static Config load(const std::string& path) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw ConfigError(path, 0, "cannot open config file");
        std::ostringstream ss;
        ss << f.rdbuf();
        return parse(ss.str(), path);
    }

    // "key=value" from the command line; replaces any earlier value.
    void apply_override(std::string_view assignment) {
        const auto eq = assignment.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("override", 0, "expected key=value, got '" + std::string(assignment) + "'");
        }
        const std::string key(detail::trim(assignment.substr(0, eq)));
        if (!detail::valid_key(key)) throw ConfigError("override", 0, "malformed key '" + key + "'");
        entries_[key] = {std::string(detail::trim(assignment.substr(eq + 1))), "override", 0};
    }

    void set(const std::string& key, const std::string& value, const std::string& source = "default") {
        entries_[key] = {value, source, 0};
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    const ConfigEntry& entry(const std::string& key) const { return entries_.at(key); }
    const std::map<std::string, ConfigEntry>& entries() const { return entries_; }
    void erase(const std::string& key) { entries_.erase(key); }

private:
    void set_line(std::string_view s, const std::string& source, int line) {
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) throw ConfigError(source, line, "expected key = value");
        const std::string key(detail::trim(s.substr(0, eq)));
        if (!detail::valid_key(key)) throw ConfigError(source, line, "malformed key '" + key + "'");
        if (entries_.count(key)) throw ConfigError(source, line, "duplicate key '" + key + "'");
        entries_[key] = {std::string(detail::trim(s.substr(eq + 1))), source, line};
    }

    std::map<std::string, ConfigEntry> entries_;
};

// ---------------------------------------------------------------------------
// Value parsing

namespace detail {

inline ConfigError value_error(const std::string& key, const ConfigEntry& e, const std::string& what) {
    return ConfigError(e.source, e.line, "key '" + key + "': " + what + " (got '" + e.value + "')");
}

inline std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    // Accept simple fractions such as 1/2 or 3/2.
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const auto num = to_double(s.substr(0, slash));
        const auto den = to_double(s.substr(slash + 1));
        if (!num || !den || *den == 0.0) return std::nullopt;
        return *num / *den;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<long long> to_int(std::string_view s) {
    s = trim(s);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s = s.substr(comma + 1);
    }
    return out;
}

}  // namespace detail

inline double get_double(const Config& c, const std::string& key) {
    const auto& e = c.entry(key);
    const auto v = detail::to_double(e.value);
    if (!v) throw detail::value_error(key, e, "expected a number");
    return *v;
}

inline long long get_int(const Config& c, const std::string& key) {
    const auto& e = c.entry(key);
    const auto v = detail::to_int(e.value);
    if (!v) throw detail::value_error(key, e, "expected an integer");
    return *v;
}

inline std::uint64_t get_uint64(const Config& c, const std::string& key) {
    const auto& e = c.entry(key);
    std::string_view s = detail::trim(e.value);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw detail::value_error(key, e, "expected a non-negative integer");
    }
    return v;
}

inline bool get_bool(const Config& c, const std::string& key) {
    const auto& e = c.entry(key);
    const std::string_view s = detail::trim(e.value);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw detail::value_error(key, e, "expected true or false");
}

inline std::string get_string(const Config& c, const std::string& key) { return c.entry(key).value; }

inline std::string get_choice(const Config& c, const std::string& key, const std::vector<std::string>& allowed) {
    const auto& e = c.entry(key);
    if (std::find(allowed.begin(), allowed.end(), e.value) == allowed.end()) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        throw detail::value_error(key, e, "expected one of " + list);
    }
    return e.value;
}

// Comma list of numbers; "a:b:step" expands to an inclusive range.
inline std::vector<double> get_double_list(const Config& c, const std::string& key) {
    const auto& e = c.entry(key);
    std::vector<double> out;
    for (auto item : detail::split_list(e.value)) {
        if (item.find(':') != std::string_view::npos) {
            const auto a = item.find(':');
            const auto b = item.find(':', a + 1);
            const auto lo = detail::to_double(item.substr(0, a));
            if (b == std::string_view::npos) throw detail::value_error(key, e, "range must be lo:hi:step with step > 0");
            const auto hi = detail::to_double(item.substr(a + 1, b - a - 1));
            const auto step = detail::to_double(item.substr(b + 1));
            if (!lo || !hi || !step || !(*step > 0.0) || *hi < *lo) {
                throw detail::value_error(key, e, "range must be lo:hi:step with step > 0");
            }
            const double lo_v = *lo, step_v = *step;
            const long n = std::lround(std::floor((*hi - lo_v) / step_v + 1e-9));
            for (long i = 0; i <= n; ++i) out.push_back(lo_v + static_cast<double>(i) * step_v);
            continue;
        }
        const auto v = detail::to_double(item);
        if (!v) throw detail::value_error(key, e, "expected a comma-separated list of numbers");
        out.push_back(*v);
    }
    if (out.empty()) throw detail::value_error(key, e, "list is empty");
    return out;
}

inline std::vector<std::string> get_string_list(const Config& c, const std::string& key) {
    std::vector<std::string> out;
    for (auto item : detail::split_list(c.entry(key).value)) {
        if (!item.empty()) out.emplace_back(item);
    }
    if (out.empty()) throw detail::value_error(key, c.entry(key), "list is empty");
    return out;
}

}  // namespace spinent

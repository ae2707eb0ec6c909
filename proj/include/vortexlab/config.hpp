#pragma once
// Flat "key = value" scenario text. Keys may be dotted (model.kind), '#' starts
// a comment, blank lines are ignored. Every lookup is tracked so unknown keys
// can be rejected after parsing.

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vortexlab/geometry.hpp"

namespace vortexlab {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& key, const std::string& what)
        : std::runtime_error(format(source, line, key, what)), line_(line), key_(key) {}
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    static std::string format(const std::string& source, int line, const std::string& key, const std::string& what) {
        std::string out = source;
        if (line > 0) out += ":" + std::to_string(line);
        if (!key.empty()) out += ": field '" + key + "'";
        return out + ": " + what;
    }
    int line_;
    std::string key_;
};

class Config {
public:
    struct Entry {
        std::string value;
        int line{0};
    };

    static Config parse(std::istream& in, const std::string& source = "<config>") {
        Config cfg;
        cfg.source_ = source;
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
            const std::string text = trim(raw);
            if (text.empty()) continue;
            const auto eq = text.find('=');
            if (eq == std::string::npos) throw ConfigError(source, line, "", "expected 'key = value'");
            const std::string key = trim(text.substr(0, eq));
            const std::string value = trim(text.substr(eq + 1));
            if (key.empty()) throw ConfigError(source, line, "", "empty key");
            for (char c : key) {
                if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) {
                    throw ConfigError(source, line, key, "invalid character in key");
                }
            }
            if (cfg.entries_.count(key)) throw ConfigError(source, line, key, "duplicate key");
            cfg.entries_[key] = {value, line};
        }
        return cfg;
    }

    static Config parse_string(const std::string& text, const std::string& source = "<config>") {
        std::istringstream in(text);
        return parse(in, source);
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError(path, 0, "", "cannot open scenario file");
        return parse(in, path);
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        used_.insert(key);
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.value;
    }
    std::string require_string(const std::string& key) const {
        used_.insert(key);
        auto it = entries_.find(key);
        if (it == entries_.end()) throw ConfigError(source_, 0, key, "required field missing");
        return it->second.value;
    }

    double get_double(const std::string& key, double fallback) const {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        return to_double(key, require_string(key));
    }
    long get_int(const std::string& key, long fallback) const {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        const std::string v = require_string(key);
        char* end = nullptr;
        errno = 0;
        const long out = std::strtol(v.c_str(), &end, 10);
        if (v.empty() || *end != '\0' || errno != 0) fail(key, "expected an integer, got '" + v + "'");
        return out;
    }
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const {
        if (!has(key)) {
            used_.insert(key);
            return fallback;
        }
        std::vector<double> out;
        std::stringstream ss(require_string(key));
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
        return out;
    }
    Vec2 get_vec2(const std::string& key, Vec2 fallback) const {
        const auto v = get_list(key, {fallback.x, fallback.y});
        if (v.size() != 2) fail(key, "expected two comma-separated numbers");
        return {v[0], v[1]};
    }

    /// Throws for entries that no lookup consumed.
    void reject_unknown() const {
        for (const auto& [key, entry] : entries_) {
            if (!used_.count(key)) throw ConfigError(source_, entry.line, key, "unknown field");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        auto it = entries_.find(key);
        throw ConfigError(source_, it == entries_.end() ? 0 : it->second.line, key, what);
    }

    const std::string& source() const { return source_; }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }
    double to_double(const std::string& key, const std::string& v) const {
        char* end = nullptr;
        errno = 0;
        const double out = std::strtod(v.c_str(), &end);
        if (v.empty() || *end != '\0' || errno != 0) fail(key, "expected a number, got '" + v + "'");
        return out;
    }

    std::string source_;
    std::map<std::string, Entry> entries_;
    mutable std::set<std::string> used_;
};

}  // namespace vortexlab

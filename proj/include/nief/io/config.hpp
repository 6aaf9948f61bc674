#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "nief/errors.hpp"
#include "nief/units.hpp"

namespace nief::io {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    return s.substr(a, s.find_last_not_of(" \t\r\n") - a + 1);
}

// Locale-independent parse of the whole string.
inline bool parse_double(const std::string& text, double& out) {
    const std::string s = trim(text);
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    auto [p, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size() && !s.empty();
}

// Multiplier to rad/s for a frequency unit tag.
inline bool unit_factor(const std::string& unit, double& f) {
    static const std::map<std::string, double> table = {
        {"rad/s", 1},           {"1/s", 1},           {"s^-1", 1},          {"Hz", units::two_pi},
        {"kHz", units::two_pi * 1e3}, {"MHz", units::two_pi * 1e6}, {"GHz", units::two_pi * 1e9},
    };
    auto it = table.find(unit);
    if (it == table.end()) return false;
    f = it->second;
    return true;
}

// Sectioned key-value configuration. Values stay as text until a typed
// accessor reads them; every error names "section.key".
class Config {
public:
    using Section = std::map<std::string, std::string>;

    static Config parse_ini(std::istream& in) {
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::ini_parser::read_ini(in, tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ValidationError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
        }
        Config c;
        for (const auto& [name, sec] : tree) {
            if (sec.empty() && !sec.data().empty())
                throw ValidationError("config: key '" + name + "' outside any section");
            auto& s = c.sections_[name];
            for (const auto& [k, v] : sec) s[k] = trim(v.data());
        }
        return c;
    }

    static Config parse_ini(const std::string& text) {
        std::istringstream in(text);
        return parse_ini(in);
    }

    static Config from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw ValidationError("config: JSON config must be an object of sections");
        Config c;
        for (const auto& [name, sec] : j.items()) {
            if (!sec.is_object()) throw ValidationError("config." + name + ": section must be an object");
            auto& s = c.sections_[name];
            for (const auto& [k, v] : sec.items()) {
                if (!v.is_string()) throw ValidationError(name + "." + k + ": values must be strings");
                s[k] = v.get<std::string>();
            }
        }
        return c;
    }

    // INI text, or the "config" member of a JSON result sidecar.
    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ValidationError("config: cannot read '" + path + "'");
        if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw ValidationError(std::string("config: ") + e.what());
            }
            return from_json(j.contains("config") ? j["config"] : j);
        }
        return parse_ini(in);
    }

    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [name, sec] : sections_) {
            j[name] = nlohmann::json::object();
            for (const auto& [k, v] : sec) j[name][k] = v;
        }
        return j;
    }

    bool empty() const { return sections_.empty(); }
    bool has(const std::string& s) const { return sections_.count(s) > 0; }
    bool has(const std::string& s, const std::string& k) const { return find(s, k) != nullptr; }
    const std::map<std::string, Section>& sections() const { return sections_; }

    void set(const std::string& s, const std::string& k, const std::string& v) { sections_[s][k] = v; }

    const std::string* find(const std::string& s, const std::string& k) const {
        auto it = sections_.find(s);
        if (it == sections_.end()) return nullptr;
        auto jt = it->second.find(k);
        return jt == it->second.end() ? nullptr : &jt->second;
    }

    std::string text(const std::string& s, const std::string& k) const {
        if (auto* v = find(s, k)) return *v;
        throw ValidationError(s + "." + k + ": missing");
    }
    std::string text(const std::string& s, const std::string& k, const std::string& fallback) const {
        auto* v = find(s, k);
        return v ? *v : fallback;
    }

    double number(const std::string& s, const std::string& k) const { return to_number(s, k, text(s, k)); }
    double number(const std::string& s, const std::string& k, double fallback) const {
        auto* v = find(s, k);
        return v ? to_number(s, k, *v) : fallback;
    }

    // Angular frequency in rad/s; accepts a trailing unit tag ("3.6 GHz").
    double rate(const std::string& s, const std::string& k) const { return to_rate(s, k, text(s, k)); }
    double rate(const std::string& s, const std::string& k, double fallback) const {
        auto* v = find(s, k);
        return v ? to_rate(s, k, *v) : fallback;
    }

    long integer(const std::string& s, const std::string& k, long fallback) const {
        auto* v = find(s, k);
        if (!v) return fallback;
        const std::string t = trim(*v);
        long out = 0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
        if (ec != std::errc() || p != t.data() + t.size() || t.empty())
            throw ValidationError(s + "." + k + ": expected an integer, got '" + *v + "'");
        return out;
    }

    bool flag(const std::string& s, const std::string& k, bool fallback) const {
        auto* v = find(s, k);
        if (!v) return fallback;
        if (*v == "true" || *v == "yes" || *v == "1" || *v == "on") return true;
        if (*v == "false" || *v == "no" || *v == "0" || *v == "off") return false;
        throw ValidationError(s + "." + k + ": expected true or false, got '" + *v + "'");
    }

    // Comma-separated numbers, each optionally unit-tagged when as_rate is set.
    std::vector<double> list(const std::string& s, const std::string& k, bool as_rate = false) const {
        std::vector<double> out;
        std::stringstream in(text(s, k));
        std::string item;
        while (std::getline(in, item, ','))
            out.push_back(as_rate ? to_rate(s, k, item) : to_number(s, k, item));
        if (out.empty()) throw ValidationError(s + "." + k + ": empty list");
        return out;
    }

    void require_section(const std::string& s) const {
        if (!has(s)) throw ValidationError("missing " + s);
    }

private:
    std::map<std::string, Section> sections_;

    static double to_number(const std::string& s, const std::string& k, const std::string& v) {
        double out;
        if (!parse_double(v, out)) throw ValidationError(s + "." + k + ": expected a number, got '" + v + "'");
        return out;
    }

    static double to_rate(const std::string& s, const std::string& k, const std::string& v) {
        const std::string t = trim(v);
        const auto sp = t.find_first_of(" \t");
        if (sp == std::string::npos) return to_number(s, k, t);
        const std::string unit = trim(t.substr(sp));
        double f;
        if (!unit_factor(unit, f)) throw ValidationError(s + "." + k + ": unknown unit '" + unit + "'");
        return to_number(s, k, t.substr(0, sp)) * f;
    }
};

} // namespace nief::io

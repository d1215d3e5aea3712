#pragma once

// Scenario configuration: INI text with [sections] and key = value lines.
// Parsing is done by Boost.PropertyTree; a separate scan of the raw text
// remembers the line of every key so that semantic errors can point at it.

#include "evosurf/core.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace evosurf::io {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

/// Strict number parse: the whole string must be consumed.
inline std::optional<double> parse_number(const std::string& s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = t.data() + (t[0] == '+' ? 1 : 0);
    const auto [p, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) return std::nullopt;
    return v;
}

class Config {
public:
    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError(path + ": cannot open config file");
        return parse(in, path);
    }

    static Config parse(std::istream& in, std::string source = "<config>") {
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string text = buf.str();
        Config c;
        c.source_ = std::move(source);
        std::istringstream parse_in(text);
        try {
            boost::property_tree::ini_parser::read_ini(parse_in, c.tree_);
        } catch (const boost::property_tree::ini_parser_error& e) {
            std::ostringstream os;
            os << c.source_ << ':' << e.line() << ": " << e.message();
            throw ConfigError(os.str());
        }
        c.index_lines(text);
        for (const auto& [key, node] : c.tree_)
            if (node.empty() && !node.data().empty())
                c.fail_at(c.line_of(key), "key '" + key + "' outside of any [section]");
        return c;
    }

    const std::string& source() const { return source_; }

    bool has_section(const std::string& sec) const { return tree_.find(sec) != tree_.not_found(); }

    bool has(const std::string& sec, const std::string& key) const {
        const auto s = tree_.find(sec);
        return s != tree_.not_found() && s->second.find(key) != s->second.not_found();
    }

    std::string text(const std::string& sec, const std::string& key) const {
        if (!has(sec, key)) fail(sec, key, "missing required key");
        return trim(tree_.get_child(sec).find(key)->second.data());
    }
    std::string text(const std::string& sec, const std::string& key, const std::string& def) const {
        return has(sec, key) ? text(sec, key) : def;
    }

    double number(const std::string& sec, const std::string& key) const {
        const std::string v = text(sec, key);
        const auto d = parse_number(v);
        if (!d) fail(sec, key, "expected a number, got '" + v + "'");
        return *d;
    }
    double number(const std::string& sec, const std::string& key, double def) const {
        return has(sec, key) ? number(sec, key) : def;
    }

    int integer(const std::string& sec, const std::string& key) const {
        const double d = number(sec, key);
        if (d != static_cast<double>(static_cast<long long>(d)) || std::abs(d) > 1e9)
            fail(sec, key, "expected an integer");
        return static_cast<int>(d);
    }
    int integer(const std::string& sec, const std::string& key, int def) const {
        return has(sec, key) ? integer(sec, key) : def;
    }

    bool flag(const std::string& sec, const std::string& key, bool def) const {
        if (!has(sec, key)) return def;
        const std::string v = text(sec, key);
        if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
        if (v == "false" || v == "no" || v == "0" || v == "off") return false;
        fail(sec, key, "expected true/false, got '" + v + "'");
    }

    /// Value must satisfy lo <= v (and v <= hi when given).
    double bounded(const std::string& sec, const std::string& key, double def, double lo,
                   double hi = std::numeric_limits<double>::infinity(), bool strict_lo = false) const {
        const double v = number(sec, key, def);
        if (!std::isfinite(v) || v < lo || v > hi || (strict_lo && v == lo)) {
            std::ostringstream os;
            os << "value " << v << " out of range " << (strict_lo ? "(" : "[") << lo << ", " << hi << "]";
            fail(sec, key, os.str());
        }
        return v;
    }

    /// Rejects sections outside `allowed`.
    void allow_sections(const std::set<std::string>& allowed) const {
        for (const auto& [sec, node] : tree_)
            if (!allowed.count(sec)) fail_at(line_of(sec), "unknown section [" + sec + "]");
    }

    /// Rejects keys of `sec` outside `allowed` (catches typos).
    void allow_keys(const std::string& sec, const std::set<std::string>& allowed) const {
        const auto s = tree_.find(sec);
        if (s == tree_.not_found()) return;
        for (const auto& [key, node] : s->second)
            if (!allowed.count(key)) fail(sec, key, "unknown key");
    }

    [[noreturn]] void fail(const std::string& sec, const std::string& key, const std::string& msg) const {
        fail_at(line_of(sec + "." + key), "[" + sec + "] " + key + ": " + msg);
    }

private:
    [[noreturn]] void fail_at(int line, const std::string& msg) const {
        std::ostringstream os;
        os << source_;
        if (line > 0) os << ':' << line;
        os << ": " << msg;
        throw ConfigError(os.str());
    }

    int line_of(const std::string& dotted) const {
        const auto it = lines_.find(dotted);
        return it == lines_.end() ? 0 : it->second;
    }

    void index_lines(const std::string& text) {
        std::istringstream in(text);
        std::string raw, section;
        int n = 0;
        while (std::getline(in, raw)) {
            ++n;
            const std::string l = trim(raw);
            if (l.empty() || l[0] == ';' || l[0] == '#') continue;
            if (l.front() == '[' && l.back() == ']') {
                section = trim(l.substr(1, l.size() - 2));
                lines_.emplace(section, n);
                continue;
            }
            const auto eq = l.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = trim(l.substr(0, eq));
            lines_.emplace(section.empty() ? key : section + "." + key, n);
        }
    }

    std::string source_;
    boost::property_tree::ptree tree_;
    std::map<std::string, int> lines_;
};

}  // namespace evosurf::io

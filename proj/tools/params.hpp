#pragma once

// Typed parameter registry shared by the TOML loader and the flag parser.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

namespace lpp_cli {

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Target = std::variant<std::int64_t*, std::uint64_t*, unsigned*, double*, bool*, std::string*, std::vector<double>*>;

struct Param {
    std::string key;
    std::string help;
    Target target;
};

inline std::string flag_name(const std::string& key)
{
    std::string f = key;
    std::replace(f.begin(), f.end(), '_', '-');
    return "--" + f;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& key)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw usage_error("bad value for " + key + ": '" + item + "' is not a number");
        }
    }
    return out;
}

// Applies a command-line string to a parameter.
inline void assign_text(const Param& p, const std::string& text)
{
    auto num = [&](auto conv) {
        try {
            std::size_t used = 0;
            auto v = conv(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            throw usage_error("bad value for " + p.key + ": '" + text + "'");
        }
    };
    std::visit(
        [&](auto* t) {
            using T = std::remove_pointer_t<decltype(t)>;
            if constexpr (std::is_same_v<T, std::int64_t>) {
                *t = num([](const std::string& s, std::size_t* u) { return std::stoll(s, u); });
            } else if constexpr (std::is_same_v<T, std::uint64_t>) {
                *t = num([](const std::string& s, std::size_t* u) { return std::stoull(s, u); });
            } else if constexpr (std::is_same_v<T, unsigned>) {
                *t = static_cast<unsigned>(num([](const std::string& s, std::size_t* u) { return std::stoul(s, u); }));
            } else if constexpr (std::is_same_v<T, double>) {
                *t = num([](const std::string& s, std::size_t* u) { return std::stod(s, u); });
            } else if constexpr (std::is_same_v<T, bool>) {
                if (text == "true" || text == "1") {
                    *t = true;
                } else if (text == "false" || text == "0") {
                    *t = false;
                } else {
                    throw usage_error("bad value for " + p.key + ": expected true or false");
                }
            } else if constexpr (std::is_same_v<T, std::string>) {
                *t = text;
            } else {
                *t = parse_list(text, p.key);
            }
        },
        p.target);
}

inline std::string where(const toml::node& n)
{
    const auto& b = n.source().begin;
    return "line " + std::to_string(b.line) + ", column " + std::to_string(b.column);
}

inline void assign_node(const Param& p, const toml::node& n)
{
    auto bad = [&](const char* expected) {
        return usage_error("config key '" + p.key + "' at " + where(n) + ": expected " + expected);
    };
    std::visit(
        [&](auto* t) {
            using T = std::remove_pointer_t<decltype(t)>;
            if constexpr (std::is_same_v<T, std::int64_t> || std::is_same_v<T, std::uint64_t> ||
                          std::is_same_v<T, unsigned>) {
                const auto v = n.value<std::int64_t>();
                if (!v || !n.is_integer()) throw bad("an integer");
                if (!std::is_same_v<T, std::int64_t> && *v < 0) throw bad("a nonnegative integer");
                *t = static_cast<T>(*v);
            } else if constexpr (std::is_same_v<T, double>) {
                const auto v = n.value<double>();
                if (!v) throw bad("a number");
                *t = *v;
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!n.is_boolean()) throw bad("a boolean");
                *t = *n.value<bool>();
            } else if constexpr (std::is_same_v<T, std::string>) {
                // Lists given as arrays become comma-separated text.
                if (const auto* arr = n.as_array()) {
                    std::string s;
                    for (const auto& e : *arr) {
                        const auto v = e.value<double>();
                        if (!v) throw bad("a string or an array of numbers");
                        if (!s.empty()) s += ',';
                        s += std::to_string(*v);
                    }
                    *t = s;
                } else if (n.is_string()) {
                    *t = *n.value<std::string>();
                } else {
                    throw bad("a string");
                }
            } else {
                const auto* arr = n.as_array();
                if (!arr) throw bad("an array of numbers");
                t->clear();
                for (const auto& e : *arr) {
                    const auto v = e.value<double>();
                    if (!v) throw bad("an array of numbers");
                    t->push_back(*v);
                }
            }
        },
        p.target);
}

// Loads a flat TOML file. Every key must be registered; the listed
// required keys must be present.
inline void load_config(const std::string& path, const std::vector<Param>& params,
                        const std::vector<std::string>& required, const std::vector<std::string>& ignored = {})
{
    toml::table tbl;
    try {
        tbl = toml::parse_file(path);
    } catch (const toml::parse_error& e) {
        const auto& b = e.source().begin;
        throw usage_error(path + ":" + std::to_string(b.line) + ":" + std::to_string(b.column) + ": " +
                          std::string(e.description()));
    }
    for (const auto& key : required) {
        if (!tbl.contains(key)) throw usage_error("missing field: " + key);
    }
    for (const auto& [k, node] : tbl) {
        const std::string key(k.str());
        if (std::find(ignored.begin(), ignored.end(), key) != ignored.end()) continue;
        const auto it = std::find_if(params.begin(), params.end(), [&](const Param& p) { return p.key == key; });
        if (it == params.end()) throw usage_error(path + ": unknown key '" + key + "' at " + where(node));
        assign_node(*it, node);
    }
}

inline nlohmann::json echo(const std::vector<Param>& params)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& p : params) {
        std::visit([&](auto* t) { j[p.key] = *t; }, p.target);
    }
    return j;
}

inline std::size_t edit_distance(const std::string& a, const std::string& b)
{
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

inline std::string nearest(const std::string& word, const std::vector<std::string>& choices)
{
    std::string best;
    std::size_t d = std::string::npos;
    for (const auto& c : choices) {
        const auto e = edit_distance(word, c);
        if (e < d) {
            d = e;
            best = c;
        }
    }
    return best;
}

} // namespace lpp_cli

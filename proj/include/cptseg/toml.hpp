#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cptseg/simulate.hpp"
#include "cptseg/types.hpp"

namespace cptseg::toml {

/// Minimal TOML subset: top-level `key = value` pairs and `[[table]]`
/// arrays of tables with scalar entries (strings, integers, floats).
/// This covers the simulation-spec format; it is not a general parser.
struct Document {
    std::map<std::string, std::string> root;
    std::vector<std::pair<std::string, std::map<std::string, std::string>>> tables;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

} // namespace detail

inline Document parse(std::istream& in) {
    Document doc;
    std::map<std::string, std::string>* current = &doc.root;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.size() >= 4 && line.substr(0, 2) == "[[" &&
            line.substr(line.size() - 2) == "]]") {
            const std::string name = detail::trim(line.substr(2, line.size() - 4));
            doc.tables.emplace_back(name, std::map<std::string, std::string>{});
            current = &doc.tables.back().second;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw invalid_input("bad TOML at line " + std::to_string(lineno) + ": " + line);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::unquote(detail::trim(line.substr(eq + 1)));
        if (key.empty()) throw invalid_input("bad TOML key at line " + std::to_string(lineno));
        (*current)[key] = value;
    }
    return doc;
}

inline Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open TOML file: " + path);
    return parse(in);
}

inline double to_double(const std::map<std::string, std::string>& table, const std::string& key,
                        double fallback) {
    const auto it = table.find(key);
    if (it == table.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(key);
        return v;
    } catch (...) {
        throw invalid_input("bad numeric value for '" + key + "': " + it->second);
    }
}

/// Simulation spec format:
///   rng_seed = 42
///   [[region]]
///   length = 100
///   distribution = "normal"   # normal | lognormal | poisson | trend
///   mean = 0.0
///   sd = 1.0                  # rate= for poisson; intercept=/slope= for trend
inline SimSpec read_sim_spec(const Document& doc) {
    SimSpec spec;
    spec.rng_seed = static_cast<std::uint64_t>(to_double(doc.root, "rng_seed", 1.0));
    for (const auto& [name, table] : doc.tables) {
        if (name != "region") throw invalid_input("unknown table [[" + name + "]]");
        SimRegion region;
        region.length = static_cast<int>(to_double(table, "length", 0.0));
        const auto it = table.find("distribution");
        const std::string dist = it == table.end() ? "normal" : it->second;
        if (dist == "normal")
            region.distribution = SimDistribution::normal;
        else if (dist == "lognormal")
            region.distribution = SimDistribution::lognormal;
        else if (dist == "poisson")
            region.distribution = SimDistribution::poisson;
        else if (dist == "trend")
            region.distribution = SimDistribution::trend;
        else
            throw invalid_input("unknown distribution: " + dist);
        region.mean = to_double(table, "mean", 0.0);
        region.sd = to_double(table, "sd", 1.0);
        region.rate = to_double(table, "rate", 1.0);
        region.intercept = to_double(table, "intercept", 0.0);
        region.slope = to_double(table, "slope", 0.0);
        spec.regions.push_back(region);
    }
    spec.validate();
    return spec;
}

} // namespace cptseg::toml

#pragma once

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "weakfactor/error.hpp"
#include "weakfactor/montecarlo.hpp"

// Flat key = value experiment files. Blank lines and text after '#' are
// ignored; every key maps to one ModelConfig field and unknown keys are
// rejected. Unlisted keys keep their ModelConfig defaults.

namespace weakfactor {

namespace config_detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& key, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE)
        throw config_error(key, "expected a number, got '" + text + "'");
    return v;
}

inline long long parse_int(const std::string& key, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE)
        throw config_error(key, "expected an integer, got '" + text + "'");
    return v;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    if (!text.empty() && text.front() == '-') throw config_error(key, "expected a nonnegative integer");
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE)
        throw config_error(key, "expected a nonnegative integer, got '" + text + "'");
    return v;
}

struct Field {
    std::function<void(ModelConfig&, const std::string&)> set;
    std::function<std::string(const ModelConfig&)> get;
};

template <class Enum>
struct EnumNames {
    std::vector<std::pair<Enum, std::string_view>> entries;

    std::string_view name(Enum e) const {
        for (const auto& [value, label] : entries)
            if (value == e) return label;
        return "?";
    }

    Enum parse(const std::string& key, const std::string& text) const {
        std::string allowed;
        for (const auto& [value, label] : entries) {
            if (label == text) return value;
            allowed += (allowed.empty() ? "" : "|") + std::string(label);
        }
        throw config_error(key, "expected one of " + allowed + ", got '" + text + "'");
    }
};

inline const EnumNames<FactorKind>& factor_kind_names() {
    static const EnumNames<FactorKind> n{{{FactorKind::sv, "sv"}, {FactorKind::wiener, "wiener"}}};
    return n;
}

inline const EnumNames<IdiosyncraticSpec::Kind>& idio_kind_names() {
    static const EnumNames<IdiosyncraticSpec::Kind> n{
        {{IdiosyncraticSpec::Kind::wiener, "wiener"}, {IdiosyncraticSpec::Kind::nts, "nts"}}};
    return n;
}

inline const EnumNames<SubordinatorCoupling>& coupling_names() {
    static const EnumNames<SubordinatorCoupling> n{
        {{SubordinatorCoupling::independent, "independent"}, {SubordinatorCoupling::common, "common"}}};
    return n;
}

inline const EnumNames<GRule>& g_rule_names() {
    static const EnumNames<GRule> n{{{GRule::sigma2_loglog, "sigma2_loglog"},
                                     {GRule::loglog, "loglog"},
                                     {GRule::median_eigen, "median_eigen"},
                                     {GRule::explicit_value, "explicit"}}};
    return n;
}

#define WEAKFACTOR_DOUBLE_FIELD(key, member)                                                           \
    {key, Field{[](ModelConfig& c, const std::string& v) { c.member = parse_double(key, v); },        \
                [](const ModelConfig& c) { return format_double(c.member); }}}
#define WEAKFACTOR_INT_FIELD(key, member, type)                                                           \
    {key, Field{[](ModelConfig& c, const std::string& v) { c.member = static_cast<type>(parse_int(key, v)); }, \
                [](const ModelConfig& c) { return std::to_string(c.member); }}}
#define WEAKFACTOR_ENUM_FIELD(key, member, names)                                                       \
    {key, Field{[](ModelConfig& c, const std::string& v) { c.member = names().parse(key, v); },       \
                [](const ModelConfig& c) { return std::string(names().name(c.member)); }}}

// Ordered schema; serialization follows this order.
inline const std::vector<std::pair<std::string, Field>>& schema() {
    static const std::vector<std::pair<std::string, Field>> fields{
        WEAKFACTOR_INT_FIELD("n", n, Eigen::Index),
        WEAKFACTOR_INT_FIELD("d", d, Eigen::Index),
        WEAKFACTOR_ENUM_FIELD("factor_kind", factor_kind, factor_kind_names),
        WEAKFACTOR_DOUBLE_FIELD("sv_mu", sv.mu),
        WEAKFACTOR_DOUBLE_FIELD("sv_a", sv.a),
        WEAKFACTOR_DOUBLE_FIELD("sv_b", sv.b),
        WEAKFACTOR_DOUBLE_FIELD("sv_kappa", sv.kappa),
        WEAKFACTOR_DOUBLE_FIELD("sv_rho", sv.rho),
        WEAKFACTOR_INT_FIELD("refinement", refinement, int),
        WEAKFACTOR_ENUM_FIELD("idio_kind", idio.kind, idio_kind_names),
        WEAKFACTOR_DOUBLE_FIELD("alpha", idio.alpha),
        WEAKFACTOR_DOUBLE_FIELD("theta", idio.theta),
        WEAKFACTOR_DOUBLE_FIELD("phi", idio.phi),
        WEAKFACTOR_ENUM_FIELD("coupling", idio.coupling, coupling_names),
        WEAKFACTOR_DOUBLE_FIELD("tau", estimator.tau),
        WEAKFACTOR_INT_FIELD("r_max", estimator.r_max, int),
        WEAKFACTOR_DOUBLE_FIELD("gamma", estimator.gamma),
        WEAKFACTOR_ENUM_FIELD("g_rule", estimator.g_rule, g_rule_names),
        WEAKFACTOR_DOUBLE_FIELD("g_value", estimator.g_value),
        WEAKFACTOR_DOUBLE_FIELD("g_scale", estimator.g_scale),
        WEAKFACTOR_DOUBLE_FIELD("pelger_gamma", estimator.pelger_gamma),
        WEAKFACTOR_INT_FIELD("replications", replications, int),
        {"seed", Field{[](ModelConfig& c, const std::string& v) { c.master_seed = parse_u64("seed", v); },
                       [](const ModelConfig& c) { return std::to_string(c.master_seed); }}},
        WEAKFACTOR_INT_FIELD("true_r", true_r_tau, int),
    };
    return fields;
}

#undef WEAKFACTOR_DOUBLE_FIELD
#undef WEAKFACTOR_INT_FIELD
#undef WEAKFACTOR_ENUM_FIELD

}  // namespace config_detail

inline std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [key, field] : config_detail::schema()) keys.push_back(key);
    return keys;
}

/// Parses a config stream onto the defaults and validates the result.
inline ModelConfig parse_config(std::istream& in) {
    ModelConfig config;
    std::map<std::string, int> seen;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = config_detail::trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(line_number), "expected 'key = value'");
        const std::string key = config_detail::trim(std::string_view(body).substr(0, eq));
        const std::string value = config_detail::trim(std::string_view(body).substr(eq + 1));

        const auto& fields = config_detail::schema();
        const auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return f.first == key; });
        if (it == fields.end()) throw config_error(key, "unknown key");
        if (seen[key]++) throw config_error(key, "duplicate key");
        it->second.set(config, value);
    }
    config.validate();
    return config;
}

inline ModelConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline ModelConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config", "cannot open '" + path + "'");
    return parse_config(in);
}

/// Writes every key, so a parse of the output reproduces `config` exactly.
inline std::string serialize_config(const ModelConfig& config) {
    std::string out;
    for (const auto& [key, field] : config_detail::schema()) out += key + " = " + field.get(config) + "\n";
    return out;
}

}  // namespace weakfactor

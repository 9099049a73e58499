#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weakfactor/error.hpp"
#include "weakfactor/montecarlo.hpp"

// Named experiment grids. Tables run every (n, d) cell of a fixed grid;
// figures sweep one parameter at n = 78, d = 500.

namespace weakfactor {

struct TablePreset {
    std::string id;
    std::string description;
    ModelConfig base;  // n and d are overwritten per cell
    std::vector<Eigen::Index> n_grid;
    std::vector<Eigen::Index> d_grid;

    std::vector<ModelConfig> cells() const {
        std::vector<ModelConfig> out;
        for (auto n : n_grid)
            for (auto d : d_grid) {
                ModelConfig c = base;
                c.n = n;
                c.d = d;
                out.push_back(c);
            }
        return out;
    }
};

struct FigurePreset {
    std::string id;
    std::string description;
    std::vector<ModelConfig> panels;  // one sweep per panel, n = 78, d = 500
    SweepParameter parameter;
    std::vector<double> grid;
};

namespace preset_detail {

inline ModelConfig table_base(FactorKind factors, std::optional<double> nts_alpha) {
    ModelConfig c;
    c.factor_kind = factors;
    if (nts_alpha) {
        c.idio.kind = IdiosyncraticSpec::Kind::nts;
        c.idio.alpha = *nts_alpha;
    } else {
        c.idio.kind = IdiosyncraticSpec::Kind::wiener;
    }
    return c;
}

inline std::string idio_label(const std::optional<double>& alpha) {
    if (!alpha) return "Brownian idiosyncratic noise";
    char buf[64];
    std::snprintf(buf, sizeof buf, "NTS idiosyncratic noise, alpha = %.2f", *alpha);
    return buf;
}

}  // namespace preset_detail

inline const std::vector<TablePreset>& table_presets() {
    static const std::vector<TablePreset> presets = [] {
        const std::vector<std::optional<double>> idio{std::nullopt, 0.25, 0.5, 0.75};
        std::vector<TablePreset> out;
        int id = 1;
        for (FactorKind factors : {FactorKind::sv, FactorKind::wiener}) {
            for (const auto& alpha : idio) {
                TablePreset p;
                p.id = "table" + std::to_string(id++);
                p.description = std::string(factors == FactorKind::sv ? "SV factors" : "Brownian factors") + ", " +
                                preset_detail::idio_label(alpha);
                p.base = preset_detail::table_base(factors, alpha);
                p.n_grid = {26, 78, 390};
                p.d_grid = {100, 500, 1000, 1500};
                out.push_back(std::move(p));
            }
        }
        return out;
    }();
    return presets;
}

inline const std::vector<FigurePreset>& figure_presets() {
    static const std::vector<FigurePreset> presets = [] {
        std::vector<ModelConfig> all_models, nts_075;
        for (FactorKind factors : {FactorKind::wiener, FactorKind::sv}) {
            for (const auto& alpha : std::vector<std::optional<double>>{std::nullopt, 0.25, 0.5, 0.75}) {
                ModelConfig c = preset_detail::table_base(factors, alpha);
                c.n = 78;
                c.d = 500;
                all_models.push_back(c);
                if (alpha == 0.75) nts_075.push_back(c);
            }
        }
        return std::vector<FigurePreset>{
            {"fig1", "threshold scale a in g(d) = a sqrt(log log d)", all_models, SweepParameter::g_scale,
             {0.5, 1.0, 2.0, 4.0, 8.0}},
            {"fig2", "ratio margin gamma", all_models, SweepParameter::gamma, {0.01, 0.025, 0.05, 0.1, 0.2, 0.3}},
            {"fig3", "idiosyncratic scale theta", nts_075, SweepParameter::theta, {0.5, 1.0, 1.5, 2.0, 3.0}},
            {"fig4", "idiosyncratic cross-correlation phi", nts_075, SweepParameter::phi, {0.0, 0.1, 0.3, 0.5, 0.7}},
        };
    }();
    return presets;
}

inline const TablePreset* find_table_preset(std::string_view id) {
    for (const auto& p : table_presets())
        if (p.id == id) return &p;
    return nullptr;
}

inline const FigurePreset* find_figure_preset(std::string_view id) {
    for (const auto& p : figure_presets())
        if (p.id == id) return &p;
    return nullptr;
}

inline std::vector<std::string> preset_ids() {
    std::vector<std::string> ids;
    for (const auto& p : table_presets()) ids.push_back(p.id);
    for (const auto& p : figure_presets()) ids.push_back(p.id);
    return ids;
}

}  // namespace weakfactor

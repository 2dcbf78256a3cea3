#pragma once

// Built-in initial data.
//
//   box          : height on [left, right]
//   double_hump  : two boxes separated by interior vacuum
//   riemann_like : tall box abutting a short box
//   sawtooth_bv  : increasing staircase

#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ftl/errors.hpp"
#include "ftl/initial_data.hpp"

namespace ftl {

using ScenarioParams = std::map<std::string, double, std::less<>>;

namespace detail {

class ParamReader {
public:
    ParamReader(std::string_view scenario, const ScenarioParams& given, ScenarioParams defaults)
        : scenario_(scenario), values_(std::move(defaults)) {
        for (const auto& [key, value] : given) {
            auto it = values_.find(key);
            if (it == values_.end())
                throw ConfigError("scenario '" + std::string(scenario_) + "': unknown parameter '" + key + "'");
            it->second = value;
        }
    }

    double operator[](std::string_view key) const { return values_.find(key)->second; }

private:
    std::string_view scenario_;
    ScenarioParams values_;
};

}  // namespace detail

inline std::vector<std::string> scenario_names() { return {"box", "double_hump", "riemann_like", "sawtooth_bv"}; }

inline InitialDatum make_scenario(std::string_view name, const ScenarioParams& params = {}) {
    if (name == "box") {
        detail::ParamReader p(name, params, {{"left", 0.0}, {"right", 1.0}, {"height", 1.0}});
        return InitialDatum::from_piecewise({p["left"], p["right"]}, {p["height"]});
    }
    if (name == "double_hump") {
        detail::ParamReader p(name, params,
                              {{"a", 0.0}, {"b", 1.0}, {"c", 1.5}, {"d", 2.5}, {"first", 1.0}, {"second", 0.5}});
        return InitialDatum::from_piecewise({p["a"], p["b"], p["c"], p["d"]}, {p["first"], 0.0, p["second"]});
    }
    if (name == "riemann_like") {
        detail::ParamReader p(name, params,
                              {{"left", -1.0}, {"middle", 0.0}, {"right", 1.0}, {"rho_left", 0.8}, {"rho_right", 0.2}});
        return InitialDatum::from_piecewise({p["left"], p["middle"], p["right"]}, {p["rho_left"], p["rho_right"]});
    }
    if (name == "sawtooth_bv") {
        detail::ParamReader p(name, params, {{"left", 0.0}, {"right", 2.0}, {"steps", 4.0}, {"low", 0.25}, {"high", 1.0}});
        const double steps = p["steps"];
        if (!(steps >= 1.0) || steps != std::floor(steps)) throw ConfigError("sawtooth_bv: steps must be a positive integer");
        const auto m = static_cast<std::size_t>(steps);
        std::vector<double> b(m + 1), v(m);
        const double w = (p["right"] - p["left"]) / steps;
        for (std::size_t j = 0; j <= m; ++j) b[j] = p["left"] + w * static_cast<double>(j);
        b[m] = p["right"];
        for (std::size_t j = 0; j < m; ++j)
            v[j] = m == 1 ? p["high"] : p["low"] + (p["high"] - p["low"]) * static_cast<double>(j) / static_cast<double>(m - 1);
        return InitialDatum::from_piecewise(std::move(b), std::move(v));
    }
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

}  // namespace ftl

#pragma once

#include <json.hpp>

#include "repliscope/decay_models.hpp"

namespace repliscope::cli {

inline nlohmann::json decay_json(const DecayFit& f) {
    return {{"model", "f1"}, {"a", f.a},   {"b", f.b},
            {"c", f.c},      {"B", f.B},   {"C", f.C},
            {"r_squared", f.r_squared},    {"n_points", f.n_points}};
}

inline nlohmann::json growth_json(const GrowthFit& g) {
    return {{"model", "g"},
            {"s", g.s},
            {"beta", g.beta},
            {"r_squared", g.r_squared},
            {"n_points", g.n_points}};
}

inline nlohmann::json composite_json(const CompositeModel& m, double r_squared,
                                     std::size_t n_points) {
    return {{"model", "f2"},         {"a", m.decay.a},      {"b", m.decay.b},
            {"c", m.decay.c},        {"B", m.decay.B},      {"C", m.decay.C},
            {"s", m.growth.s},       {"beta", m.growth.beta}, {"r_squared", r_squared},
            {"n_points", n_points}};
}

inline DecayFit decay_from_json(const nlohmann::json& j) {
    DecayFit f = DecayFit::from_parameters(j.at("a").get<double>(), j.at("b").get<double>(),
                                           j.at("c").get<double>());
    if (j.contains("B")) f.B = j.at("B").get<double>();
    if (j.contains("C")) f.C = j.at("C").get<double>();
    if (j.contains("r_squared") && j.at("r_squared").is_number()) {
        f.r_squared = j.at("r_squared").get<double>();
    }
    if (j.contains("n_points")) f.n_points = j.at("n_points").get<std::size_t>();
    return f;
}

inline GrowthFit growth_from_json(const nlohmann::json& j) {
    GrowthFit g;
    g.s = j.at("s").get<double>();
    g.beta = j.at("beta").get<double>();
    if (j.contains("r_squared") && j.at("r_squared").is_number()) {
        g.r_squared = j.at("r_squared").get<double>();
    }
    if (j.contains("n_points")) g.n_points = j.at("n_points").get<std::size_t>();
    return g;
}

}  // namespace repliscope::cli

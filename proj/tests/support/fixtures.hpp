#pragma once

// Constructed datasets and model families with known answers.

#include <cmath>
#include <string>
#include <vector>

#include "repliscope/predictor.hpp"
#include "repliscope/vecstore.hpp"

namespace fixture {

using repliscope::SpaceTag;
using repliscope::VectorDataset;

struct ReplicationPair {
    VectorDataset training;
    VectorDataset generated;
};

/// 100 training rows at least 10 alpha apart (last coordinate 0). Generated:
/// exact copies of rows 0..49, then rows 50..99 shifted by 2 alpha along the
/// last axis, which puts each exactly 2 alpha from its source and further
/// from everything else.
inline ReplicationPair fifty_fifty(double alpha, std::size_t dim = 16) {
    const std::size_t n = 100;
    std::vector<float> train(n * dim, 0.0f);
    for (std::size_t i = 0; i < n; ++i) {
        train[i * dim] = static_cast<float>(static_cast<double>(i) * 10.0 * alpha);
        train[i * dim + 1 + i % (dim - 2)] += static_cast<float>(3.0 * alpha);
    }
    std::vector<float> gen(train);
    for (std::size_t i = 50; i < n; ++i) {
        gen[i * dim + dim - 1] = static_cast<float>(2.0 * alpha);
    }
    return {VectorDataset(n, dim, std::move(train), SpaceTag::pixel_raw_0_255),
            VectorDataset(n, dim, std::move(gen), SpaceTag::pixel_raw_0_255)};
}

struct TrueCombo {
    std::string name;
    double b;
    double s;
    double beta;
};

inline double f1(double a, double b, double c, double mu1) { return std::pow(a, b * mu1 - c); }

/// Points lying exactly on shared-(a, c) decay curves and per-combo growth curves.
inline std::vector<repliscope::ComboRecord> noiseless_combos(
    double a, double c, const std::vector<TrueCombo>& truth,
    const std::vector<double>& mu1_levels = {10, 14, 18, 22, 26}) {
    std::vector<repliscope::ComboRecord> out;
    for (const auto& t : truth) {
        std::vector<repliscope::ReplicationPoint> pts;
        for (double mu : mu1_levels) {
            pts.push_back({mu, t.s * std::exp(t.beta * mu), f1(a, t.b, c, mu)});
        }
        out.push_back(repliscope::ComboRecord::make(t.name, std::move(pts)));
    }
    return out;
}

inline std::vector<TrueCombo> three_combos() {
    return {{"A", 5.0, 4.0, 0.30}, {"B", 7.0, 2.5, 0.25}, {"C", 9.0, 6.0, 0.28}};
}

}  // namespace fixture

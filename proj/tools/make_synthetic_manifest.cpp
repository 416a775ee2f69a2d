// Writes a small synthetic experiment (VDS files plus manifest.json) whose
// levels have growing intrinsic dimension and shrinking replica counts.
//
//   make_synthetic_manifest OUT_DIR
//
// Output depends only on the fixed seeds below.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "repliscope/vecstore.hpp"

namespace fs = std::filesystem;
using repliscope::SpaceTag;
using repliscope::VectorDataset;

namespace {

constexpr std::size_t kAmbient = 24;
constexpr std::size_t kGenerated = 128;
constexpr double kAlpha = 0.05;
constexpr double kScale = 10.0;

struct Level {
    std::size_t size;
    std::size_t manifold_dim;
};

struct Combo {
    const char* name;
    std::uint64_t seed;
    std::vector<std::size_t> replicas;  // per level, out of kGenerated
};

// Portable uniform draw in [0, 1): the top 53 bits of mt19937_64.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Orthonormal basis of `rows` vectors in R^kAmbient via Gram-Schmidt.
std::vector<double> random_frame(std::size_t rows, std::mt19937_64& rng) {
    std::vector<double> q(rows * kAmbient);
    for (std::size_t r = 0; r < rows; ++r) {
        double* v = &q[r * kAmbient];
        for (;;) {
            for (std::size_t j = 0; j < kAmbient; ++j) v[j] = 2.0 * unit(rng) - 1.0;
            for (std::size_t p = 0; p < r; ++p) {
                const double* u = &q[p * kAmbient];
                double dot = 0.0;
                for (std::size_t j = 0; j < kAmbient; ++j) dot += u[j] * v[j];
                for (std::size_t j = 0; j < kAmbient; ++j) v[j] -= dot * u[j];
            }
            double norm = 0.0;
            for (std::size_t j = 0; j < kAmbient; ++j) norm += v[j] * v[j];
            norm = std::sqrt(norm);
            if (norm > 1e-6) {
                for (std::size_t j = 0; j < kAmbient; ++j) v[j] /= norm;
                break;
            }
        }
    }
    return q;
}

std::vector<float> manifold_point(const std::vector<double>& frame, std::size_t d,
                                  std::mt19937_64& rng) {
    std::vector<double> x(kAmbient, 0.0);
    for (std::size_t r = 0; r < d; ++r) {
        const double t = kScale * unit(rng);
        for (std::size_t j = 0; j < kAmbient; ++j) x[j] += t * frame[r * kAmbient + j];
    }
    return {x.begin(), x.end()};
}

std::vector<std::string> ids(const std::string& prefix, std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_synthetic_manifest OUT_DIR\n";
        return 2;
    }
    const fs::path out_dir(argv[1]);
    fs::create_directories(out_dir);

    const std::vector<Level> levels{{150, 3}, {300, 5}, {600, 7}};
    const std::vector<Combo> combos{
        {"toy-gan-a", 11, {64, 30, 12}},
        {"toy-gan-b", 23, {80, 44, 20}},
        {"toy-gan-c", 37, {50, 21, 7}},
    };

    nlohmann::json manifest{{"alpha", kAlpha}, {"id_resolution", 32}, {"k1", 10},
                            {"k2", 20},        {"seed", 0},          {"combos", nlohmann::json::array()}};

    for (const auto& combo : combos) {
        std::mt19937_64 rng(combo.seed);
        const auto frame = random_frame(levels.back().manifold_dim, rng);
        nlohmann::json entry{{"name", combo.name}, {"levels", nlohmann::json::array()}};

        for (std::size_t l = 0; l < levels.size(); ++l) {
            const auto [size, d] = levels[l];
            std::vector<float> train;
            train.reserve(size * kAmbient);
            for (std::size_t i = 0; i < size; ++i) {
                const auto p = manifold_point(frame, d, rng);
                train.insert(train.end(), p.begin(), p.end());
            }

            std::vector<float> gen;
            gen.reserve(kGenerated * kAmbient);
            for (std::size_t g = 0; g < kGenerated; ++g) {
                if (g < combo.replicas[l]) {
                    // A training row nudged well inside alpha.
                    const std::size_t src = static_cast<std::size_t>(unit(rng) * size);
                    for (std::size_t j = 0; j < kAmbient; ++j) {
                        const double jitter = (2.0 * unit(rng) - 1.0) * kAlpha * 0.1;
                        gen.push_back(static_cast<float>(train[src * kAmbient + j] + jitter));
                    }
                } else {
                    auto p = manifold_point(frame, d, rng);
                    // Lift off the manifold so novel samples sit beyond alpha.
                    p[kAmbient - 1] += static_cast<float>(3.0 * kAlpha);
                    gen.insert(gen.end(), p.begin(), p.end());
                }
            }

            const std::string stem = std::string(combo.name) + "_n" + std::to_string(size);
            repliscope::write_vds(VectorDataset(size, kAmbient, std::move(train),
                                                SpaceTag::external_embedding,
                                                ids(stem + "_train_", size)),
                                  out_dir / (stem + "_train.vds"));
            repliscope::write_vds(VectorDataset(kGenerated, kAmbient, std::move(gen),
                                                SpaceTag::external_embedding,
                                                ids(stem + "_gen_", kGenerated)),
                                  out_dir / (stem + "_gen.vds"));
            entry["levels"].push_back({{"size", size},
                                       {"training_path", stem + "_train.vds"},
                                       {"generated_path", stem + "_gen.vds"}});
        }
        manifest["combos"].push_back(std::move(entry));
    }

    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    return out ? 0 : 1;
}

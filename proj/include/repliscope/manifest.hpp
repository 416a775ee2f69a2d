#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "repliscope/error.hpp"

namespace repliscope {

class ManifestError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

struct ManifestLevel {
    std::size_t size = 0;
    std::filesystem::path training_path;   ///< resolved against the manifest directory
    std::filesystem::path generated_path;  ///< resolved against the manifest directory
};

struct ManifestCombo {
    std::string name;
    std::vector<ManifestLevel> levels;
};

/// JSON experiment description:
///
///   {"alpha": 8000, "resolution": 128, "id_resolution": 32, "k1": 10, "k2": 20,
///    "seed": 0,
///    "combos": [{"name": "BigGAN-Flower",
///                "levels": [{"size": 1000, "training_path": "t.vds",
///                            "generated_path": "g.vds"}, ...]}, ...]}
///
/// Every top-level key except "combos" is optional.
struct ExperimentManifest {
    std::vector<ManifestCombo> combos;
    double alpha = 8000.0;
    bool alpha_given = false;
    std::size_t resolution = 128;
    std::size_t id_resolution = 32;
    std::size_t k1 = 10;
    std::size_t k2 = 20;
    std::uint64_t seed = 0;

    /// Parses and validates: unique names, sizes strictly increasing within a
    /// combo, 2 <= k1 <= k2, alpha >= 0. Throws ManifestError.
    static ExperimentManifest parse(const std::string& json_text,
                                    const std::filesystem::path& base_dir);
    static ExperimentManifest load(const std::filesystem::path& path);
};

}  // namespace repliscope

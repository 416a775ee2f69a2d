#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "repliscope/vecstore.hpp"

namespace repliscope {

/// Interleaved H x W x C image in raw 0-255 units, row-major.
struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 0;
    std::vector<float> pixels;

    float at(std::size_t x, std::size_t y, std::size_t c) const {
        return pixels[(y * width + x) * channels + c];
    }
};

/// Takes the largest centered square (offset floor((W-S)/2), floor((H-S)/2))
/// and resamples it bilinearly to target x target using half-pixel centers
/// with clamp-to-edge. A square input at its own size is returned unchanged.
Image center_crop_resize(const Image& image, std::size_t target);

/// Square image geometry inferred from a flattened row length: dim = 3R^2
/// means RGB, dim = R^2 means grayscale. Both cannot hold for the same dim.
struct SquareLayout {
    std::size_t side = 0;
    std::size_t channels = 0;
};
std::optional<SquareLayout> infer_square_layout(std::size_t dim);

/// Resamples every row of a pixel dataset to target x target. Throws
/// InvalidInput when the rows are not square images.
VectorDataset resize_dataset(const VectorDataset& ds, std::size_t target);

/// Rows at the resolution used for intrinsic-dimension estimation: pixel
/// datasets larger than id_resolution are downscaled, anything else passes
/// through at native dimension.
VectorDataset dataset_for_id(const VectorDataset& ds, std::size_t id_resolution);

struct PreprocessConfig {
    std::size_t target_resolution = 128;
    std::size_t id_resolution = 32;
    bool zscore = false;
    std::size_t threads = 0;

    void validate() const;
};

struct SkippedFile {
    std::string path;
    std::string reason;
};

struct LoadedImages {
    VectorDataset dataset;
    std::size_t channels = 0;
    std::vector<SkippedFile> skipped;
    std::optional<ChannelStats> stats;
    Warnings warnings;
};

/// Decodes every PNG/JPEG under `dir` (recursively, lexicographic by relative
/// path) into one row each. Undecodable files are skipped and listed; the
/// dataset is RGB if any image has color, otherwise grayscale.
LoadedImages load_image_dir(const std::filesystem::path& dir, const PreprocessConfig& cfg);

/// Decodes a single file; std::nullopt when the file is not a readable image.
std::optional<Image> decode_image(const std::filesystem::path& path);

}  // namespace repliscope

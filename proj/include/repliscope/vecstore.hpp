#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "repliscope/error.hpp"

namespace repliscope {

/// The vector space a dataset's rows live in. Distances are only meaningful
/// between datasets with the same tag.
enum class SpaceTag : std::uint8_t {
    pixel_raw_0_255 = 0,
    pixel_zscored = 1,
    external_embedding = 2,
};

std::string_view to_string(SpaceTag tag);
std::optional<SpaceTag> space_tag_from_code(std::uint8_t code);

/// Immutable count x dim matrix of finite floats, row-major, with optional
/// per-row source ids. The number of rows is the dataset's size.
class VectorDataset {
public:
    /// Throws InvalidInput if any invariant fails: count, dim >= 1, values
    /// sized count*dim and finite, ids (when given) one per row, non-empty
    /// and free of newlines.
    VectorDataset(std::size_t count, std::size_t dim, std::vector<float> values,
                  SpaceTag space_tag,
                  std::optional<std::vector<std::string>> source_ids = std::nullopt);

    std::size_t count() const noexcept { return count_; }
    std::size_t dim() const noexcept { return dim_; }
    SpaceTag space_tag() const noexcept { return space_tag_; }

    std::span<const float> values() const noexcept { return values_; }
    std::span<const float> row(std::size_t i) const noexcept {
        return {values_.data() + i * dim_, dim_};
    }

    bool has_source_ids() const noexcept { return source_ids_.has_value(); }
    const std::optional<std::vector<std::string>>& source_ids() const noexcept {
        return source_ids_;
    }
    /// Source id of row i, or its decimal index when ids are absent.
    std::string label(std::size_t i) const;

    bool operator==(const VectorDataset& other) const;

private:
    std::size_t count_;
    std::size_t dim_;
    std::vector<float> values_;
    SpaceTag space_tag_;
    std::optional<std::vector<std::string>> source_ids_;
};

// ---------------------------------------------------------------------------
// VDS binary format
// ---------------------------------------------------------------------------

enum class VdsErrorKind {
    io,
    bad_magic,
    unsupported_dtype,
    unknown_space_tag,
    bad_header,
    truncated,
    id_count_mismatch,
    invalid_payload,
    trailing_bytes,
};

class VdsFormatError : public Error {
public:
    VdsFormatError(VdsErrorKind kind, const std::string& what)
        : Error(what), kind_(kind) {}
    VdsErrorKind kind() const noexcept { return kind_; }

private:
    VdsErrorKind kind_;
};

/// Serializes to the little-endian VDS1 layout:
/// magic | u8 dtype | u8 space tag | u16 reserved | u32 dim | u64 count |
/// floats | u32 id block length | newline-joined ids.
std::vector<std::uint8_t> encode_vds(const VectorDataset& ds);
VectorDataset decode_vds(std::span<const std::uint8_t> bytes);

void write_vds(const VectorDataset& ds, const std::filesystem::path& path);
VectorDataset read_vds(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Subsets and normalization
// ---------------------------------------------------------------------------

/// n rows drawn uniformly without replacement by a seeded mt19937_64;
/// returned in ascending source order.
VectorDataset subsample(const VectorDataset& ds, std::size_t n, std::uint64_t seed);

/// Row indices subsample() would pick, ascending.
std::vector<std::size_t> subsample_indices(std::size_t count, std::size_t n,
                                           std::uint64_t seed);

/// Per-channel statistics in raw 0-255 units. Channels are interleaved, so
/// element j of a row belongs to channel j % channels.
struct ChannelStats {
    std::vector<double> mean;
    std::vector<double> stddev;

    std::size_t channels() const noexcept { return mean.size(); }
};

struct ZscoreResult {
    VectorDataset dataset;
    ChannelStats stats;
    Warnings warnings;
};

ChannelStats compute_channel_stats(const VectorDataset& raw, std::size_t channels);

/// (value - mean) / std per channel; zero-variance channels map to 0.
VectorDataset apply_channel_stats(const VectorDataset& raw, const ChannelStats& stats);

/// Maps z-scored values back to raw units (zero-variance channels return the mean).
VectorDataset invert_channel_stats(const VectorDataset& normalized,
                                   const ChannelStats& stats);

/// Requires a pixel_raw_0_255 dataset whose dim is a multiple of channels.
ZscoreResult zscore_normalize(const VectorDataset& raw, std::size_t channels);

}  // namespace repliscope

#include "repliscope/vecstore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace repliscope {

std::string_view to_string(SpaceTag tag) {
    switch (tag) {
        case SpaceTag::pixel_raw_0_255: return "pixel_raw_0_255";
        case SpaceTag::pixel_zscored: return "pixel_zscored";
        case SpaceTag::external_embedding: return "external_embedding";
    }
    return "unknown";
}

std::optional<SpaceTag> space_tag_from_code(std::uint8_t code) {
    switch (code) {
        case 0: return SpaceTag::pixel_raw_0_255;
        case 1: return SpaceTag::pixel_zscored;
        case 2: return SpaceTag::external_embedding;
        default: return std::nullopt;
    }
}

VectorDataset::VectorDataset(std::size_t count, std::size_t dim, std::vector<float> values,
                             SpaceTag space_tag,
                             std::optional<std::vector<std::string>> source_ids)
    : count_(count),
      dim_(dim),
      values_(std::move(values)),
      space_tag_(space_tag),
      source_ids_(std::move(source_ids)) {
    if (count_ == 0 || dim_ == 0) {
        throw InvalidInput("dataset must have count >= 1 and dim >= 1");
    }
    if (values_.size() / dim_ != count_ || values_.size() % dim_ != 0) {
        std::ostringstream msg;
        msg << "dataset values hold " << values_.size() << " entries, expected " << count_
            << " x " << dim_;
        throw InvalidInput(msg.str());
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            std::ostringstream msg;
            msg << "non-finite value at row " << i / dim_ << ", column " << i % dim_;
            throw InvalidInput(msg.str());
        }
    }
    if (source_ids_) {
        if (source_ids_->size() != count_) {
            throw InvalidInput("source_ids length " + std::to_string(source_ids_->size()) +
                               " does not match count " + std::to_string(count_));
        }
        for (const auto& id : *source_ids_) {
            if (id.empty() || id.find('\n') != std::string::npos) {
                throw InvalidInput("source ids must be non-empty and contain no newline");
            }
        }
    }
}

std::string VectorDataset::label(std::size_t i) const {
    if (source_ids_) return (*source_ids_)[i];
    return std::to_string(i);
}

bool VectorDataset::operator==(const VectorDataset& other) const {
    if (count_ != other.count_ || dim_ != other.dim_ || space_tag_ != other.space_tag_ ||
        source_ids_ != other.source_ids_) {
        return false;
    }
    // Bitwise, so that -0.0f and 0.0f differ.
    return std::memcmp(values_.data(), other.values_.data(), values_.size() * sizeof(float)) == 0;
}

// ---------------------------------------------------------------------------
// VDS

namespace {

constexpr char kMagic[4] = {'V', 'D', 'S', '1'};
constexpr std::uint8_t kDtypeFloat32 = 1;
constexpr std::size_t kHeaderSize = 4 + 1 + 1 + 2 + 4 + 8;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        out.push_back(static_cast<std::uint8_t>(value >> (8 * b)));
    }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
    T value = 0;
    for (std::size_t b = 0; b < sizeof(T); ++b) {
        value |= static_cast<T>(bytes[offset + b]) << (8 * b);
    }
    return value;
}

[[noreturn]] void truncated(std::size_t expected, std::size_t actual, const char* where) {
    std::ostringstream msg;
    msg << "VDS truncated in " << where << ": expected at least " << expected
        << " bytes, file has " << actual;
    throw VdsFormatError(VdsErrorKind::truncated, msg.str());
}

}  // namespace

std::vector<std::uint8_t> encode_vds(const VectorDataset& ds) {
    if (ds.dim() > std::numeric_limits<std::uint32_t>::max()) {
        throw InvalidInput("dim exceeds the VDS u32 limit");
    }
    std::string id_block;
    if (const auto& ids = ds.source_ids()) {
        for (std::size_t i = 0; i < ids->size(); ++i) {
            if (i) id_block.push_back('\n');
            id_block += (*ids)[i];
        }
    }
    if (id_block.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw InvalidInput("source id block exceeds the VDS u32 limit");
    }

    std::vector<std::uint8_t> out;
    out.reserve(kHeaderSize + ds.values().size() * 4 + 4 + id_block.size());
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    out.push_back(kDtypeFloat32);
    out.push_back(static_cast<std::uint8_t>(ds.space_tag()));
    put_le<std::uint16_t>(out, 0);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ds.dim()));
    put_le<std::uint64_t>(out, ds.count());
    for (float v : ds.values()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(id_block.size()));
    out.insert(out.end(), id_block.begin(), id_block.end());
    return out;
}

VectorDataset decode_vds(std::span<const std::uint8_t> bytes) {
    const std::size_t probe = std::min<std::size_t>(bytes.size(), 4);
    if (std::memcmp(bytes.data(), kMagic, probe) != 0) {
        throw VdsFormatError(VdsErrorKind::bad_magic, "not a VDS file (bad magic bytes)");
    }
    if (bytes.size() < kHeaderSize) truncated(kHeaderSize, bytes.size(), "header");

    const std::uint8_t dtype = bytes[4];
    if (dtype != kDtypeFloat32) {
        throw VdsFormatError(VdsErrorKind::unsupported_dtype,
                             "unsupported VDS dtype code " + std::to_string(dtype));
    }
    const auto tag = space_tag_from_code(bytes[5]);
    if (!tag) {
        throw VdsFormatError(VdsErrorKind::unknown_space_tag,
                             "unknown VDS space tag code " + std::to_string(bytes[5]));
    }
    if (get_le<std::uint16_t>(bytes, 6) != 0) {
        throw VdsFormatError(VdsErrorKind::bad_header, "VDS reserved field is not zero");
    }
    const std::uint64_t dim = get_le<std::uint32_t>(bytes, 8);
    const std::uint64_t count = get_le<std::uint64_t>(bytes, 12);
    if (dim == 0 || count == 0) {
        throw VdsFormatError(VdsErrorKind::bad_header,
                             "VDS header declares dim=" + std::to_string(dim) +
                                 " count=" + std::to_string(count) + "; both must be >= 1");
    }
    if (count > (std::numeric_limits<std::uint64_t>::max() - kHeaderSize - 4) / 4 / dim) {
        throw VdsFormatError(VdsErrorKind::bad_header, "VDS header dimensions overflow");
    }

    const std::uint64_t n_values = count * dim;
    const std::uint64_t matrix_end = kHeaderSize + n_values * 4;
    if (bytes.size() < matrix_end + 4) truncated(matrix_end + 4, bytes.size(), "matrix");

    std::vector<float> values(n_values);
    for (std::uint64_t i = 0; i < n_values; ++i) {
        const float v = std::bit_cast<float>(get_le<std::uint32_t>(bytes, kHeaderSize + 4 * i));
        if (!std::isfinite(v)) {
            throw VdsFormatError(VdsErrorKind::invalid_payload,
                                 "VDS matrix holds a non-finite value at entry " +
                                     std::to_string(i));
        }
        values[i] = v;
    }

    const std::uint32_t id_len = get_le<std::uint32_t>(bytes, matrix_end);
    const std::uint64_t ids_begin = matrix_end + 4;
    if (bytes.size() < ids_begin + id_len) truncated(ids_begin + id_len, bytes.size(), "id block");
    if (bytes.size() > ids_begin + id_len) {
        throw VdsFormatError(VdsErrorKind::trailing_bytes,
                             std::to_string(bytes.size() - ids_begin - id_len) +
                                 " unexpected bytes after the VDS id block");
    }

    std::optional<std::vector<std::string>> ids;
    if (id_len > 0) {
        std::vector<std::string> parsed;
        std::string block(reinterpret_cast<const char*>(bytes.data() + ids_begin), id_len);
        std::size_t start = 0;
        for (;;) {
            const std::size_t nl = block.find('\n', start);
            parsed.push_back(block.substr(start, nl - start));
            if (nl == std::string::npos) break;
            start = nl + 1;
        }
        if (parsed.size() != count) {
            throw VdsFormatError(VdsErrorKind::id_count_mismatch,
                                 "VDS id block has " + std::to_string(parsed.size()) +
                                     " ids for " + std::to_string(count) + " rows");
        }
        ids = std::move(parsed);
    }

    try {
        return VectorDataset(count, dim, std::move(values), *tag, std::move(ids));
    } catch (const InvalidInput& e) {
        throw VdsFormatError(VdsErrorKind::invalid_payload, e.what());
    }
}

void write_vds(const VectorDataset& ds, const std::filesystem::path& path) {
    const auto bytes = encode_vds(ds);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw VdsFormatError(VdsErrorKind::io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw VdsFormatError(VdsErrorKind::io, "failed writing " + path.string());
}

VectorDataset read_vds(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw VdsFormatError(VdsErrorKind::io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    try {
        return decode_vds(bytes);
    } catch (const VdsFormatError& e) {
        throw VdsFormatError(e.kind(), path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Subsample

namespace {

// Unbiased draw in [0, bound) by rejection; portable across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

}  // namespace

std::vector<std::size_t> subsample_indices(std::size_t count, std::size_t n, std::uint64_t seed) {
    if (n == 0 || n > count) {
        throw InvalidInput("subsample size " + std::to_string(n) + " must be in [1, " +
                           std::to_string(count) + "]");
    }
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + bounded(rng, count - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    return idx;
}

VectorDataset subsample(const VectorDataset& ds, std::size_t n, std::uint64_t seed) {
    const auto idx = subsample_indices(ds.count(), n, seed);
    std::vector<float> values;
    values.reserve(n * ds.dim());
    std::optional<std::vector<std::string>> ids;
    if (ds.has_source_ids()) ids.emplace().reserve(n);
    for (std::size_t i : idx) {
        const auto r = ds.row(i);
        values.insert(values.end(), r.begin(), r.end());
        if (ids) ids->push_back((*ds.source_ids())[i]);
    }
    return VectorDataset(n, ds.dim(), std::move(values), ds.space_tag(), std::move(ids));
}

// ---------------------------------------------------------------------------
// Z-score

ChannelStats compute_channel_stats(const VectorDataset& raw, std::size_t channels) {
    if (channels == 0 || raw.dim() % channels != 0) {
        throw InvalidInput("dim " + std::to_string(raw.dim()) + " is not a multiple of " +
                           std::to_string(channels) + " channels");
    }
    ChannelStats stats{std::vector<double>(channels, 0.0), std::vector<double>(channels, 0.0)};
    const auto values = raw.values();
    const double per_channel = static_cast<double>(values.size() / channels);

    for (std::size_t j = 0; j < values.size(); ++j) stats.mean[j % channels] += values[j];
    for (auto& m : stats.mean) m /= per_channel;
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double d = values[j] - stats.mean[j % channels];
        stats.stddev[j % channels] += d * d;
    }
    for (auto& s : stats.stddev) s = std::sqrt(s / per_channel);
    return stats;
}

VectorDataset apply_channel_stats(const VectorDataset& raw, const ChannelStats& stats) {
    const std::size_t channels = stats.channels();
    if (channels == 0 || raw.dim() % channels != 0 || stats.stddev.size() != channels) {
        throw InvalidInput("channel stats do not match the dataset layout");
    }
    const auto in = raw.values();
    std::vector<float> out(in.size());
    for (std::size_t j = 0; j < in.size(); ++j) {
        const std::size_t c = j % channels;
        out[j] = stats.stddev[c] > 0.0
                     ? static_cast<float>((in[j] - stats.mean[c]) / stats.stddev[c])
                     : 0.0f;
    }
    return VectorDataset(raw.count(), raw.dim(), std::move(out), SpaceTag::pixel_zscored,
                         raw.source_ids());
}

VectorDataset invert_channel_stats(const VectorDataset& normalized, const ChannelStats& stats) {
    const std::size_t channels = stats.channels();
    if (channels == 0 || normalized.dim() % channels != 0 || stats.stddev.size() != channels) {
        throw InvalidInput("channel stats do not match the dataset layout");
    }
    const auto in = normalized.values();
    std::vector<float> out(in.size());
    for (std::size_t j = 0; j < in.size(); ++j) {
        const std::size_t c = j % channels;
        out[j] = static_cast<float>(in[j] * stats.stddev[c] + stats.mean[c]);
    }
    return VectorDataset(normalized.count(), normalized.dim(), std::move(out),
                         SpaceTag::pixel_raw_0_255, normalized.source_ids());
}

ZscoreResult zscore_normalize(const VectorDataset& raw, std::size_t channels) {
    if (raw.space_tag() != SpaceTag::pixel_raw_0_255) {
        throw InvalidInput("z-score normalization expects a pixel_raw_0_255 dataset, got " +
                           std::string(to_string(raw.space_tag())));
    }
    auto stats = compute_channel_stats(raw, channels);
    Warnings warnings;
    for (std::size_t c = 0; c < channels; ++c) {
        if (stats.stddev[c] == 0.0) {
            warnings.push_back("channel " + std::to_string(c) +
                               " has zero variance; mapped to all zeros");
        }
    }
    auto normalized = apply_channel_stats(raw, stats);
    return {std::move(normalized), std::move(stats), std::move(warnings)};
}

}  // namespace repliscope

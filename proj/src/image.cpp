#include "repliscope/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/core/utils/logger.hpp>
#include <opencv2/imgcodecs.hpp>

#include "repliscope/parallel.hpp"

namespace repliscope {

namespace {

struct AxisSample {
    std::size_t lo;
    std::size_t hi;
    double frac;
};

// Half-pixel-center mapping of `target` output samples onto `extent` source
// pixels starting at `offset`.
std::vector<AxisSample> axis_samples(std::size_t extent, std::size_t offset, std::size_t target) {
    std::vector<AxisSample> out(target);
    const double scale = static_cast<double>(extent) / static_cast<double>(target);
    const double max_pos = static_cast<double>(extent - 1);
    for (std::size_t i = 0; i < target; ++i) {
        double pos = (static_cast<double>(i) + 0.5) * scale - 0.5;
        pos = std::clamp(pos, 0.0, max_pos);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, extent - 1);
        out[i] = {offset + lo, offset + hi, pos - static_cast<double>(lo)};
    }
    return out;
}

}  // namespace

Image center_crop_resize(const Image& image, std::size_t target) {
    if (image.width == 0 || image.height == 0 || image.pixels.empty()) {
        throw InvalidInput("cannot crop an empty image");
    }
    if (image.channels != 1 && image.channels != 3) {
        throw InvalidInput("images must have 1 or 3 channels, got " +
                           std::to_string(image.channels));
    }
    if (image.pixels.size() != image.width * image.height * image.channels) {
        throw InvalidInput("image pixel buffer does not match its geometry");
    }
    if (target == 0) throw InvalidInput("target resolution must be >= 1");

    const std::size_t side = std::min(image.width, image.height);
    const auto xs = axis_samples(side, (image.width - side) / 2, target);
    const auto ys = axis_samples(side, (image.height - side) / 2, target);

    Image out{target, target, image.channels, std::vector<float>(target * target * image.channels)};
    for (std::size_t y = 0; y < target; ++y) {
        const auto& sy = ys[y];
        for (std::size_t x = 0; x < target; ++x) {
            const auto& sx = xs[x];
            for (std::size_t c = 0; c < image.channels; ++c) {
                const double top = image.at(sx.lo, sy.lo, c) * (1.0 - sx.frac) +
                                   image.at(sx.hi, sy.lo, c) * sx.frac;
                const double bottom = image.at(sx.lo, sy.hi, c) * (1.0 - sx.frac) +
                                      image.at(sx.hi, sy.hi, c) * sx.frac;
                out.pixels[(y * target + x) * image.channels + c] =
                    static_cast<float>(top * (1.0 - sy.frac) + bottom * sy.frac);
            }
        }
    }
    return out;
}

std::optional<SquareLayout> infer_square_layout(std::size_t dim) {
    auto exact_sqrt = [](std::size_t v) -> std::optional<std::size_t> {
        auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(v))));
        if (r * r == v) return r;
        return std::nullopt;
    };
    if (dim % 3 == 0) {
        if (auto r = exact_sqrt(dim / 3)) return SquareLayout{*r, 3};
    }
    if (auto r = exact_sqrt(dim)) return SquareLayout{*r, 1};
    return std::nullopt;
}

VectorDataset resize_dataset(const VectorDataset& ds, std::size_t target) {
    if (ds.space_tag() == SpaceTag::external_embedding) {
        throw InvalidInput("cannot resample an external_embedding dataset as images");
    }
    const auto layout = infer_square_layout(ds.dim());
    if (!layout) {
        throw InvalidInput("row length " + std::to_string(ds.dim()) +
                           " is not a square 1- or 3-channel image");
    }
    const std::size_t out_dim = target * target * layout->channels;
    std::vector<float> values;
    values.reserve(ds.count() * out_dim);
    for (std::size_t i = 0; i < ds.count(); ++i) {
        const auto r = ds.row(i);
        Image img{layout->side, layout->side, layout->channels, {r.begin(), r.end()}};
        const auto resized = center_crop_resize(img, target);
        values.insert(values.end(), resized.pixels.begin(), resized.pixels.end());
    }
    return VectorDataset(ds.count(), out_dim, std::move(values), ds.space_tag(), ds.source_ids());
}

VectorDataset dataset_for_id(const VectorDataset& ds, std::size_t id_resolution) {
    if (ds.space_tag() == SpaceTag::external_embedding) return ds;
    const auto layout = infer_square_layout(ds.dim());
    if (!layout || layout->side <= id_resolution) return ds;
    return resize_dataset(ds, id_resolution);
}

void PreprocessConfig::validate() const {
    if (target_resolution == 0 || id_resolution == 0) {
        throw InvalidInput("resolutions must be >= 1");
    }
    if (id_resolution > target_resolution) {
        throw InvalidInput("id_resolution " + std::to_string(id_resolution) +
                           " exceeds target_resolution " + std::to_string(target_resolution));
    }
}

std::optional<Image> decode_image(const std::filesystem::path& path) {
    cv::Mat mat;
    try {
        mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    } catch (const cv::Exception&) {
        return std::nullopt;
    }
    if (mat.empty() || mat.dims != 2) return std::nullopt;

    double scale = 1.0;
    if (mat.depth() == CV_16U) {
        scale = 1.0 / 257.0;
    } else if (mat.depth() != CV_8U) {
        return std::nullopt;
    }

    const int src_channels = mat.channels();
    Image img;
    img.width = static_cast<std::size_t>(mat.cols);
    img.height = static_cast<std::size_t>(mat.rows);
    img.channels = src_channels >= 3 ? 3 : 1;
    img.pixels.resize(img.width * img.height * img.channels);

    auto sample = [&](int y, int x, int c) -> float {
        const double v = mat.depth() == CV_8U
                             ? static_cast<double>(mat.ptr<std::uint8_t>(y)[x * src_channels + c])
                             : mat.ptr<std::uint16_t>(y)[x * src_channels + c] * scale;
        return static_cast<float>(v);
    };
    for (int y = 0; y < mat.rows; ++y) {
        for (int x = 0; x < mat.cols; ++x) {
            float* dst = &img.pixels[(static_cast<std::size_t>(y) * img.width + x) * img.channels];
            if (img.channels == 3) {
                // OpenCV stores BGR(A).
                dst[0] = sample(y, x, 2);
                dst[1] = sample(y, x, 1);
                dst[2] = sample(y, x, 0);
            } else {
                dst[0] = sample(y, x, 0);
            }
        }
    }
    return img;
}

namespace {

bool has_image_extension(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

Image to_rgb(const Image& gray) {
    Image rgb{gray.width, gray.height, 3, std::vector<float>(gray.pixels.size() * 3)};
    for (std::size_t i = 0; i < gray.pixels.size(); ++i) {
        rgb.pixels[3 * i] = rgb.pixels[3 * i + 1] = rgb.pixels[3 * i + 2] = gray.pixels[i];
    }
    return rgb;
}

}  // namespace

LoadedImages load_image_dir(const std::filesystem::path& dir, const PreprocessConfig& cfg) {
    namespace fs = std::filesystem;
    cfg.validate();
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw InvalidInput("not a readable directory: " + dir.string());
    }

    std::vector<std::string> files;
    fs::recursive_directory_iterator it(dir, ec), end;
    if (ec) throw InvalidInput("cannot list " + dir.string() + ": " + ec.message());
    for (; it != end; it.increment(ec)) {
        if (ec) throw InvalidInput("cannot list " + dir.string() + ": " + ec.message());
        if (it->is_regular_file() && has_image_extension(it->path())) {
            files.push_back(fs::relative(it->path(), dir).generic_string());
        }
    }
    std::sort(files.begin(), files.end());

    cv::utils::logging::setLogLevel(cv::utils::logging::LOG_LEVEL_SILENT);
    std::vector<std::optional<Image>> decoded(files.size());
    parallel_for(files.size(), cfg.threads, [&](std::size_t i) {
        decoded[i] = decode_image(dir / files[i]);
    });

    std::vector<SkippedFile> skipped;
    std::size_t channels = 1;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!decoded[i]) {
            skipped.push_back({files[i], "not a decodable PNG/JPEG image"});
        } else if (decoded[i]->channels == 3) {
            channels = 3;
        }
    }
    if (skipped.size() == files.size()) {
        throw InvalidInput("no decodable PNG/JPEG images under " + dir.string());
    }

    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (decoded[i]) kept.push_back(i);
    }
    const std::size_t row_len = cfg.target_resolution * cfg.target_resolution * channels;
    std::vector<float> values(kept.size() * row_len);
    parallel_for(kept.size(), cfg.threads, [&](std::size_t slot) {
        const Image& src = *decoded[kept[slot]];
        const Image resized = center_crop_resize(
            src.channels == channels ? src : to_rgb(src), cfg.target_resolution);
        std::copy(resized.pixels.begin(), resized.pixels.end(), values.begin() + slot * row_len);
    });

    std::vector<std::string> ids;
    ids.reserve(kept.size());
    for (std::size_t i : kept) ids.push_back(files[i]);

    Warnings warnings;
    for (const auto& s : skipped) warnings.push_back("skipped " + s.path + ": " + s.reason);

    VectorDataset raw(kept.size(), row_len, std::move(values), SpaceTag::pixel_raw_0_255,
                      std::move(ids));
    if (!cfg.zscore) {
        return {std::move(raw), channels, std::move(skipped), std::nullopt, std::move(warnings)};
    }
    auto z = zscore_normalize(raw, channels);
    warnings.insert(warnings.end(), z.warnings.begin(), z.warnings.end());
    return {std::move(z.dataset), channels, std::move(skipped), std::move(z.stats),
            std::move(warnings)};
}

}  // namespace repliscope

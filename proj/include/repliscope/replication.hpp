#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "repliscope/intrinsic_dim.hpp"
#include "repliscope/knn.hpp"
#include "repliscope/vecstore.hpp"

namespace repliscope {

/// Generated-sample count used when measuring replication.
inline constexpr std::size_t kDefaultGeneratedCount = 1024;
/// Threshold for 128x128x3 raw-pixel vectors.
inline constexpr double kDefaultAlpha = 8000.0;

struct SampleMatch {
    std::size_t generated_index;
    std::size_t nearest_training_index;
    double min_distance;
};

struct ReplicationReport {
    double alpha = 0.0;
    std::size_t n_generated = 0;
    std::size_t n_replicated = 0;
    /// 100 * n_replicated / n_generated.
    double percentage = 0.0;
    std::vector<SampleMatch> per_sample;
};

struct AlphaSweepPoint {
    double alpha;
    double percentage;
};
using AlphaSweep = std::vector<AlphaSweepPoint>;

/// Share of generated rows whose nearest training row lies within alpha
/// (inclusive), in percent.
ReplicationReport replication_percentage(const VectorDataset& generated,
                                         const VectorDataset& training, double alpha,
                                         const KnnOptions& opts = {});

/// Threshold a precomputed nearest-neighbor result.
ReplicationReport report_from_distances(const MinDistanceResult& nn, double alpha);

/// One nearest-neighbor pass, thresholded at every alpha (strictly ascending, >= 0).
AlphaSweep alpha_sweep(const VectorDataset& generated, const VectorDataset& training,
                       std::span<const double> alphas, const KnnOptions& opts = {});
AlphaSweep alpha_sweep(const MinDistanceResult& nn, std::span<const double> alphas);

/// One measurement of a subset level: complexity, size and replication.
struct ReplicationPoint {
    double mu1;
    double mu2;
    double percentage;

    bool operator==(const ReplicationPoint&) const = default;
};

struct ExperimentLevel {
    const VectorDataset* training;
    const VectorDataset* generated;
    double alpha;
};

struct PointOptions {
    IdConfig id;
    std::size_t id_resolution = 32;
    std::size_t threads = 0;
};

/// mu1 = ID of the training subset (at id_resolution), mu2 = its row count,
/// percentage = replication of the generated set against it.
std::vector<ReplicationPoint> sample_replication_points(std::span<const ExperimentLevel> levels,
                                                        const PointOptions& opts = {},
                                                        Warnings* warnings = nullptr);

/// CSV with header generated_id,nearest_training_id,min_distance,is_replication.
void write_replication_csv(const ReplicationReport& report, const VectorDataset& generated,
                           const VectorDataset& training, const std::filesystem::path& path);

/// CSV with header alpha,replication_pct.
void write_sweep_csv(const AlphaSweep& sweep, const std::filesystem::path& path);

/// CSV of (generated source, nearest training source) pairs for image-grid
/// tools; requires source ids on both datasets.
void write_montage_manifest(const ReplicationReport& report, const VectorDataset& generated,
                            const VectorDataset& training, const std::filesystem::path& path);

}  // namespace repliscope

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "repliscope/vecstore.hpp"

namespace repliscope {

struct Neighbor {
    std::size_t index;
    double distance;

    bool operator==(const Neighbor&) const = default;
};

/// Per-query k nearest references, sorted by (distance, index).
class NeighborTable {
public:
    NeighborTable(std::size_t query_count, std::size_t k, std::vector<Neighbor> entries);

    std::size_t query_count() const noexcept { return query_count_; }
    std::size_t k() const noexcept { return k_; }
    std::span<const Neighbor> row(std::size_t query) const noexcept {
        return {entries_.data() + query * k_, k_};
    }

    bool operator==(const NeighborTable&) const = default;

private:
    std::size_t query_count_;
    std::size_t k_;
    std::vector<Neighbor> entries_;
};

struct MinDistanceResult {
    std::vector<double> distance;
    std::vector<std::size_t> index;

    std::size_t size() const noexcept { return distance.size(); }
    bool operator==(const MinDistanceResult&) const = default;
};

struct KnnOptions {
    std::size_t threads = 0;  ///< 0 = hardware concurrency
};

/// Exact nearest reference of every query row (ties -> smallest index).
/// Requires equal dim and space tag.
MinDistanceResult min_distances(const VectorDataset& queries, const VectorDataset& refs,
                                const KnnOptions& opts = {});

/// The k_max nearest other rows of every row of `ds`.
NeighborTable knn_table(const VectorDataset& ds, std::size_t k_max, bool exclude_self,
                        const KnnOptions& opts = {});

/// CSV with header query_id,ref_id,distance.
void write_min_distance_csv(const MinDistanceResult& result, const VectorDataset& queries,
                            const VectorDataset& refs, const std::filesystem::path& path);

}  // namespace repliscope

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "repliscope/knn.hpp"
#include "repliscope/vecstore.hpp"

namespace repliscope {

enum class DuplicatePolicy { deduplicate_warn, error };

struct IdConfig {
    std::size_t k1 = 10;
    std::size_t k2 = 20;
    DuplicatePolicy duplicate_policy = DuplicatePolicy::deduplicate_warn;
    bool keep_per_point = false;
    std::size_t threads = 0;

    /// Throws InvalidInput unless 2 <= k1 <= k2.
    void validate() const;
};

struct IdEstimate {
    double value = 0.0;
    IdConfig config;
    std::size_t n_used = 0;
    /// Row index (in the input dataset) and mean m_hat over k in [k1, k2].
    std::optional<std::vector<std::pair<std::size_t, double>>> per_point;
    Warnings warnings;
};

/// Two distances along a neighbor list that are exactly zero (duplicate rows).
class DuplicateDistanceError : public DegenerateData {
public:
    using DegenerateData::DegenerateData;
};

/// Local maximum-likelihood dimension from the first k neighbor distances
/// (ascending, all > 0): the inverse mean of ln(T_k / T_j) over j < k.
double mk_hat(std::span<const double> distances, std::size_t k);

/// Mean of mk_hat over every point and every k in [k1, k2], using a
/// self-excluded k-NN table of depth k2. Exact duplicate rows are removed
/// (lowest index kept) or rejected per the configured policy.
IdEstimate estimate_id(const VectorDataset& ds, const IdConfig& cfg = {});

/// Groups of bitwise-identical rows: (kept index, duplicate index) pairs.
std::vector<std::pair<std::size_t, std::size_t>> find_duplicate_rows(const VectorDataset& ds);

/// CSV with header point_id,m_hat_mean.
void write_per_point_csv(const IdEstimate& est, const VectorDataset& ds,
                         const std::filesystem::path& path);

}  // namespace repliscope

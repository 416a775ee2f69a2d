#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "repliscope/decay_models.hpp"
#include "repliscope/replication.hpp"

namespace repliscope {

/// One GAN/dataset combination: its subset-level measurements, sorted by
/// dataset size (strictly increasing).
struct ComboRecord {
    std::string name;
    std::vector<ReplicationPoint> points;

    /// Sorts by mu2 and validates; throws InvalidInput on empty points or
    /// repeated sizes.
    static ComboRecord make(std::string name, std::vector<ReplicationPoint> points);

    std::vector<XY> id_replication() const;  ///< (mu1, percentage)
    std::vector<XY> id_size() const;         ///< (mu1, mu2)
};

enum class PredictionMode { one_shot, two_shot, full };

std::string_view to_string(PredictionMode mode);
std::optional<PredictionMode> prediction_mode_from_string(std::string_view text);

struct PredictionReport {
    std::string held_out;
    PredictionMode mode = PredictionMode::one_shot;
    DecayFit predicted_fit;
    GrowthFit growth_fit;
    std::size_t levels_used = 0;
    double r_squared = 0.0;   ///< NaN when the held-out percentages are constant
    double mae_f1 = 0.0;      ///< percentage points
    double mae_f2 = 0.0;      ///< percentage points
    double mae_f2_inv = 0.0;  ///< samples; NaN when no level has replication > 0
};

struct SharedParams {
    double a;
    double c;
};

/// Arithmetic means of a and c.
SharedParams pool_shared_params(std::span<const DecayFit> fits);

/// The b for which a^(b mu1 - c) passes exactly through `point` = (mu1, %).
double one_shot_b(double a, double c, XY point);

/// Least-squares slope through the origin of (mu1, log_a(p) + c) over two points.
double two_shot_b(double a, double c, XY first, XY second);

/// Median of |predicted - observed|; even counts average the middle pair.
double median_abs_error(std::span<const double> predicted, std::span<const double> observed);

/// Leave-one-combination-out: pool (a, c) over the remaining combos' full
/// fits, estimate b for the held-out combo from its smallest level(s) (or fit
/// it fully in `full` mode), and score predictions at every held-out level.
std::vector<PredictionReport> loocv(std::span<const ComboRecord> combos, PredictionMode mode);

/// CSV header combo,mode,r_squared,mae_f1_pct,mae_f2_pct,mae_f2inv_samples,
/// one row per report plus a final "median" row.
void write_loocv_csv(std::span<const PredictionReport> reports, const std::filesystem::path& path);

}  // namespace repliscope

#include "repliscope/replication.hpp"

#include <fstream>
#include <iomanip>

#include "repliscope/csv.hpp"
#include "repliscope/image.hpp"

namespace repliscope {

namespace {

void check_alpha(double alpha) {
    if (!(alpha >= 0.0)) throw InvalidInput("replication threshold alpha must be >= 0");
}

void check_sweep(std::span<const double> alphas) {
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        check_alpha(alphas[i]);
        if (i > 0 && !(alphas[i] > alphas[i - 1])) {
            throw InvalidInput("alpha sweep values must be strictly ascending");
        }
    }
}

double percent(std::size_t hits, std::size_t total) {
    return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << std::setprecision(6);
    return out;
}

}  // namespace

ReplicationReport report_from_distances(const MinDistanceResult& nn, double alpha) {
    check_alpha(alpha);
    if (nn.size() == 0) throw InvalidInput("no generated samples");
    ReplicationReport report;
    report.alpha = alpha;
    report.n_generated = nn.size();
    report.per_sample.reserve(nn.size());
    for (std::size_t i = 0; i < nn.size(); ++i) {
        report.per_sample.push_back({i, nn.index[i], nn.distance[i]});
        if (nn.distance[i] <= alpha) ++report.n_replicated;
    }
    report.percentage = percent(report.n_replicated, report.n_generated);
    return report;
}

ReplicationReport replication_percentage(const VectorDataset& generated,
                                         const VectorDataset& training, double alpha,
                                         const KnnOptions& opts) {
    check_alpha(alpha);
    return report_from_distances(min_distances(generated, training, opts), alpha);
}

AlphaSweep alpha_sweep(const MinDistanceResult& nn, std::span<const double> alphas) {
    check_sweep(alphas);
    if (nn.size() == 0) throw InvalidInput("no generated samples");
    AlphaSweep sweep;
    sweep.reserve(alphas.size());
    for (double alpha : alphas) {
        std::size_t hits = 0;
        for (double d : nn.distance) hits += d <= alpha ? 1 : 0;
        sweep.push_back({alpha, percent(hits, nn.size())});
    }
    return sweep;
}

AlphaSweep alpha_sweep(const VectorDataset& generated, const VectorDataset& training,
                       std::span<const double> alphas, const KnnOptions& opts) {
    check_sweep(alphas);
    return alpha_sweep(min_distances(generated, training, opts), alphas);
}

std::vector<ReplicationPoint> sample_replication_points(std::span<const ExperimentLevel> levels,
                                                        const PointOptions& opts,
                                                        Warnings* warnings) {
    std::vector<ReplicationPoint> points;
    points.reserve(levels.size());
    IdConfig id_cfg = opts.id;
    id_cfg.threads = opts.threads;
    for (const auto& level : levels) {
        if (!level.training || !level.generated) throw InvalidInput("experiment level is missing data");
        const auto id = estimate_id(dataset_for_id(*level.training, opts.id_resolution), id_cfg);
        if (warnings) warnings->insert(warnings->end(), id.warnings.begin(), id.warnings.end());
        const auto rep = replication_percentage(*level.generated, *level.training, level.alpha,
                                                KnnOptions{opts.threads});
        points.push_back({id.value, static_cast<double>(level.training->count()), rep.percentage});
    }
    return points;
}

void write_replication_csv(const ReplicationReport& report, const VectorDataset& generated,
                           const VectorDataset& training, const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "generated_id,nearest_training_id,min_distance,is_replication\n";
    for (const auto& s : report.per_sample) {
        out << csv_field(generated.label(s.generated_index)) << ','
            << csv_field(training.label(s.nearest_training_index)) << ',' << s.min_distance << ','
            << (s.min_distance <= report.alpha ? 1 : 0) << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
}

void write_sweep_csv(const AlphaSweep& sweep, const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "alpha,replication_pct\n";
    for (const auto& p : sweep) out << p.alpha << ',' << p.percentage << '\n';
    if (!out) throw Error("failed writing " + path.string());
}

void write_montage_manifest(const ReplicationReport& report, const VectorDataset& generated,
                            const VectorDataset& training, const std::filesystem::path& path) {
    if (!generated.has_source_ids() || !training.has_source_ids()) {
        throw InvalidInput("montage manifest needs source ids on both datasets");
    }
    auto out = open_csv(path);
    out << "generated_path,training_path,min_distance\n";
    for (const auto& s : report.per_sample) {
        out << csv_field(generated.label(s.generated_index)) << ','
            << csv_field(training.label(s.nearest_training_index)) << ',' << s.min_distance
            << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace repliscope

#include "repliscope/intrinsic_dim.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "repliscope/csv.hpp"

namespace repliscope {

void IdConfig::validate() const {
    if (k1 < 2 || k1 > k2) {
        throw InvalidInput("ID neighborhood range requires 2 <= k1 <= k2, got k1=" +
                           std::to_string(k1) + " k2=" + std::to_string(k2));
    }
}

double mk_hat(std::span<const double> distances, std::size_t k) {
    if (k < 2) throw InvalidInput("mk_hat needs k >= 2");
    if (distances.size() < k) {
        throw InvalidInput("mk_hat needs " + std::to_string(k) + " distances, got " +
                           std::to_string(distances.size()));
    }
    const double tk = distances[k - 1];
    double log_sum = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j) {
        if (!(distances[j] > 0.0)) {
            throw DuplicateDistanceError("neighbor distance T_" + std::to_string(j + 1) +
                                         " is zero (duplicate point)");
        }
        log_sum += std::log(tk / distances[j]);
    }
    if (!(log_sum > 0.0)) {
        throw DegenerateData("all " + std::to_string(k) +
                             " neighbor distances are equal; local dimension is undefined");
    }
    return static_cast<double>(k - 1) / log_sum;
}

std::vector<std::pair<std::size_t, std::size_t>> find_duplicate_rows(const VectorDataset& ds) {
    auto key_of = [&](std::size_t i) {
        std::string key(ds.dim() * sizeof(float), '\0');
        const auto r = ds.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            const float v = r[j] == 0.0f ? 0.0f : r[j];  // fold -0 into +0
            std::memcpy(key.data() + j * sizeof(float), &v, sizeof(float));
        }
        return key;
    };

    std::unordered_map<std::string, std::size_t> first_seen;
    std::vector<std::pair<std::size_t, std::size_t>> dups;
    for (std::size_t i = 0; i < ds.count(); ++i) {
        auto [it, inserted] = first_seen.try_emplace(key_of(i), i);
        if (!inserted) dups.emplace_back(it->second, i);
    }
    return dups;
}

IdEstimate estimate_id(const VectorDataset& ds, const IdConfig& cfg) {
    cfg.validate();
    IdEstimate est;
    est.config = cfg;

    const auto dups = find_duplicate_rows(ds);
    std::vector<std::size_t> kept_rows;
    if (!dups.empty()) {
        if (cfg.duplicate_policy == DuplicatePolicy::error) {
            std::ostringstream msg;
            msg << dups.size() << " duplicate rows found:";
            for (std::size_t i = 0; i < dups.size() && i < 10; ++i) {
                msg << " (" << dups[i].first << ", " << dups[i].second << ")";
            }
            if (dups.size() > 10) msg << " ...";
            throw InvalidInput(msg.str());
        }
        est.warnings.push_back("removed " + std::to_string(dups.size()) +
                               " exact duplicate rows before ID estimation");
    }
    std::vector<bool> dropped(ds.count(), false);
    for (const auto& d : dups) dropped[d.second] = true;
    for (std::size_t i = 0; i < ds.count(); ++i) {
        if (!dropped[i]) kept_rows.push_back(i);
    }

    est.n_used = kept_rows.size();
    if (est.n_used < cfg.k2 + 1) {
        throw InvalidInput("ID estimation with k2=" + std::to_string(cfg.k2) + " needs at least " +
                           std::to_string(cfg.k2 + 1) + " distinct points, have " +
                           std::to_string(est.n_used));
    }

    const VectorDataset* work = &ds;
    std::optional<VectorDataset> deduped;
    if (!dups.empty()) {
        std::vector<float> values;
        values.reserve(kept_rows.size() * ds.dim());
        for (std::size_t i : kept_rows) {
            const auto r = ds.row(i);
            values.insert(values.end(), r.begin(), r.end());
        }
        deduped.emplace(kept_rows.size(), ds.dim(), std::move(values), ds.space_tag());
        work = &*deduped;
    }

    const auto table = knn_table(*work, cfg.k2, true, KnnOptions{cfg.threads});
    const std::size_t n_k = cfg.k2 - cfg.k1 + 1;
    std::vector<double> dist(cfg.k2);
    std::vector<std::pair<std::size_t, double>> per_point;
    if (cfg.keep_per_point) per_point.reserve(est.n_used);

    double total = 0.0;
    for (std::size_t p = 0; p < est.n_used; ++p) {
        const auto row = table.row(p);
        for (std::size_t j = 0; j < cfg.k2; ++j) dist[j] = row[j].distance;
        double point_sum = 0.0;
        for (std::size_t k = cfg.k1; k <= cfg.k2; ++k) point_sum += mk_hat(dist, k);
        total += point_sum;
        if (cfg.keep_per_point) {
            per_point.emplace_back(kept_rows[p], point_sum / static_cast<double>(n_k));
        }
    }
    est.value = total / (static_cast<double>(est.n_used) * static_cast<double>(n_k));
    if (cfg.keep_per_point) est.per_point = std::move(per_point);
    return est;
}

void write_per_point_csv(const IdEstimate& est, const VectorDataset& ds,
                         const std::filesystem::path& path) {
    if (!est.per_point) throw InvalidInput("estimate carries no per-point values");
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << std::setprecision(6) << "point_id,m_hat_mean\n";
    for (const auto& [row, value] : *est.per_point) out << csv_field(ds.label(row)) << ',' << value << '\n';
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace repliscope

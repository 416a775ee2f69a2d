#include "repliscope/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "repliscope/csv.hpp"

namespace repliscope {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_in_base(double value, double a) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidInput("shared decay base a must lie in (0, 1)");
    if (!(value > 0.0)) {
        throw InvalidInput(
            "replication percentage must be > 0 to estimate b (log of a non-positive value)");
    }
    return std::log(value) / std::log(a);
}

double median_ignoring_nan(std::vector<double> values) {
    std::erase_if(values, [](double v) { return std::isnan(v); });
    if (values.empty()) return kNaN;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

ComboRecord ComboRecord::make(std::string name, std::vector<ReplicationPoint> points) {
    if (points.empty()) throw InvalidInput("combo '" + name + "' has no levels");
    std::sort(points.begin(), points.end(),
              [](const ReplicationPoint& l, const ReplicationPoint& r) { return l.mu2 < r.mu2; });
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].mu2 > points[i - 1].mu2)) {
            throw InvalidInput("combo '" + name + "' repeats dataset size " +
                               std::to_string(points[i].mu2));
        }
    }
    return ComboRecord{std::move(name), std::move(points)};
}

std::vector<XY> ComboRecord::id_replication() const {
    std::vector<XY> out;
    for (const auto& p : points) out.push_back({p.mu1, p.percentage});
    return out;
}

std::vector<XY> ComboRecord::id_size() const {
    std::vector<XY> out;
    for (const auto& p : points) out.push_back({p.mu1, p.mu2});
    return out;
}

std::string_view to_string(PredictionMode mode) {
    switch (mode) {
        case PredictionMode::one_shot: return "one-shot";
        case PredictionMode::two_shot: return "two-shot";
        case PredictionMode::full: return "full";
    }
    return "unknown";
}

std::optional<PredictionMode> prediction_mode_from_string(std::string_view text) {
    if (text == "one-shot") return PredictionMode::one_shot;
    if (text == "two-shot") return PredictionMode::two_shot;
    if (text == "full") return PredictionMode::full;
    return std::nullopt;
}

SharedParams pool_shared_params(std::span<const DecayFit> fits) {
    if (fits.empty()) throw InvalidInput("cannot pool shared parameters from zero fits");
    double a = 0.0, c = 0.0;
    for (const auto& f : fits) {
        a += f.a;
        c += f.c;
    }
    const double n = static_cast<double>(fits.size());
    return {a / n, c / n};
}

double one_shot_b(double a, double c, XY point) {
    const double y = log_in_base(point.y, a) + c;
    if (point.x == 0.0) throw InvalidInput("one-shot estimate needs a non-zero ID");
    return y / point.x;
}

double two_shot_b(double a, double c, XY first, XY second) {
    if (first.x == second.x) throw InvalidInput("two-shot estimate needs two distinct IDs");
    const double y1 = log_in_base(first.y, a) + c;
    const double y2 = log_in_base(second.y, a) + c;
    return (first.x * y1 + second.x * y2) / (first.x * first.x + second.x * second.x);
}

double median_abs_error(std::span<const double> predicted, std::span<const double> observed) {
    if (predicted.empty() || predicted.size() != observed.size()) {
        throw InvalidInput("median absolute error needs two equal, non-empty series");
    }
    std::vector<double> errors(predicted.size());
    for (std::size_t i = 0; i < errors.size(); ++i) errors[i] = std::abs(predicted[i] - observed[i]);
    std::sort(errors.begin(), errors.end());
    const std::size_t mid = errors.size() / 2;
    return errors.size() % 2 ? errors[mid] : 0.5 * (errors[mid - 1] + errors[mid]);
}

std::vector<PredictionReport> loocv(std::span<const ComboRecord> combos, PredictionMode mode) {
    if (combos.size() < 2) {
        throw InvalidInput("LOOCV needs at least 2 combos, got " + std::to_string(combos.size()));
    }
    for (const auto& combo : combos) {
        if (combo.points.size() < 2) {
            throw InvalidInput("LOOCV needs at least 2 levels per combo; '" + combo.name +
                               "' has " + std::to_string(combo.points.size()));
        }
    }

    std::vector<DecayFit> full_fits;
    full_fits.reserve(combos.size());
    for (const auto& combo : combos) full_fits.push_back(fit_f1(combo.id_replication()));

    std::vector<PredictionReport> reports;
    for (std::size_t h = 0; h < combos.size(); ++h) {
        const auto& held = combos[h];
        PredictionReport report;
        report.held_out = held.name;
        report.mode = mode;

        if (mode == PredictionMode::full) {
            report.predicted_fit = full_fits[h];
            report.levels_used = held.points.size();
        } else {
            std::vector<DecayFit> others;
            for (std::size_t i = 0; i < combos.size(); ++i) {
                if (i != h) others.push_back(full_fits[i]);
            }
            const auto shared = pool_shared_params(others);
            const auto& p0 = held.points[0];
            double b = 0.0;
            try {
                if (mode == PredictionMode::one_shot) {
                    b = one_shot_b(shared.a, shared.c, {p0.mu1, p0.percentage});
                    report.levels_used = 1;
                } else {
                    const auto& p1 = held.points[1];
                    b = two_shot_b(shared.a, shared.c, {p0.mu1, p0.percentage},
                                   {p1.mu1, p1.percentage});
                    report.levels_used = 2;
                }
            } catch (const InvalidInput& e) {
                throw InvalidInput("cannot estimate b for '" + held.name + "': " + e.what());
            }
            report.predicted_fit = DecayFit::from_parameters(shared.a, b, shared.c);
            report.predicted_fit.n_points = report.levels_used;
        }

        report.growth_fit = fit_g(held.id_size());
        const CompositeModel model{report.predicted_fit, report.growth_fit};

        std::vector<double> observed, pred_f1, pred_f2;
        std::vector<double> size_pred, size_obs;
        for (const auto& p : held.points) {
            observed.push_back(p.percentage);
            pred_f1.push_back(eval_f1(report.predicted_fit, p.mu1));
            pred_f2.push_back(eval_f2(model, p.mu2));
            if (p.percentage > 0.0) {
                size_pred.push_back(invert_f2(model, p.percentage));
                size_obs.push_back(p.mu2);
            }
        }
        try {
            report.r_squared = r_squared(observed, pred_f1);
        } catch (const DegenerateData&) {
            report.r_squared = kNaN;
        }
        report.mae_f1 = median_abs_error(pred_f1, observed);
        report.mae_f2 = median_abs_error(pred_f2, observed);
        report.mae_f2_inv = size_pred.empty() ? kNaN : median_abs_error(size_pred, size_obs);
        reports.push_back(std::move(report));
    }
    return reports;
}

void write_loocv_csv(std::span<const PredictionReport> reports, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << std::setprecision(6);
    out << "combo,mode,r_squared,mae_f1_pct,mae_f2_pct,mae_f2inv_samples\n";
    std::vector<double> r2, f1, f2, f2inv;
    for (const auto& r : reports) {
        out << csv_field(r.held_out) << ',' << to_string(r.mode) << ',' << r.r_squared << ','
            << r.mae_f1 << ',' << r.mae_f2 << ',' << r.mae_f2_inv << '\n';
        r2.push_back(r.r_squared);
        f1.push_back(r.mae_f1);
        f2.push_back(r.mae_f2);
        f2inv.push_back(r.mae_f2_inv);
    }
    if (!reports.empty()) {
        out << "median," << to_string(reports.front().mode) << ',' << median_ignoring_nan(r2) << ','
            << median_ignoring_nan(f1) << ',' << median_ignoring_nan(f2) << ','
            << median_ignoring_nan(f2inv) << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace repliscope

#include "repliscope/decay_models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>

namespace repliscope {

namespace {

constexpr double kCanonicalTranslation = 100.0;
constexpr double kFallbackBase = 0.97;
constexpr int kMaxIterations = 200;
constexpr int kMaxHalvings = 60;
constexpr double kRelativeTolerance = 1e-10;

struct Line {
    double slope;
    double intercept;
};

Line ols(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

std::size_t distinct_count(std::span<const double> x) {
    return std::set<double>(x.begin(), x.end()).size();
}

void require_finite(std::span<const XY> points) {
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw InvalidInput("fit input contains a non-finite value");
        }
    }
}

double log_base(double a) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidInput("decay base a must lie in (0, 1)");
    return std::log(a);
}

}  // namespace

// ---------------------------------------------------------------------------
// f1

DecayFit DecayFit::from_parameters(double a, double b, double c) {
    const double ln_a = log_base(a);
    DecayFit fit;
    fit.a = a;
    fit.b = b;
    fit.c = c;
    fit.B = b * ln_a;
    fit.C = -c * ln_a;
    return fit;
}

DecayFit DecayFit::from_identifiable(double B, double C) {
    DecayFit fit;
    fit.B = B;
    fit.C = C;
    if (C != 0.0) {
        fit.c = C > 0.0 ? kCanonicalTranslation : -kCanonicalTranslation;
        const double ln_a = -C / fit.c;
        fit.a = std::exp(ln_a);
        fit.b = B / ln_a;
    } else {
        fit.c = 0.0;
        fit.a = kFallbackBase;
        fit.b = B / std::log(kFallbackBase);
    }
    return fit;
}

double eval_f1(const DecayFit& fit, double mu1) {
    return std::pow(fit.a, fit.b * mu1 - fit.c);
}

DecayFit fit_f1(std::span<const XY> points) {
    require_finite(points);
    std::vector<double> x, y;
    for (const auto& p : points) {
        if (p.y < 0.0) throw InvalidInput("replication percentages must be >= 0");
        x.push_back(p.x);
        y.push_back(p.y);
    }
    if (distinct_count(x) < 2) {
        throw InvalidInput("f1 fit needs at least 2 points with distinct ID values");
    }
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
        throw DegenerateData("all replication percentages are equal; decay slope is undefined");
    }

    std::vector<double> init_x, init_log_y;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] > 0.0) {
            init_x.push_back(x[i]);
            init_log_y.push_back(std::log(y[i]));
        }
    }
    if (distinct_count(init_x) < 2) {
        throw DegenerateData("f1 fit needs at least 2 positive percentages at distinct IDs");
    }

    // Work in centered coordinates, p = exp(B (x - xm) + D), for conditioning.
    double xm = 0.0;
    for (double v : x) xm += v;
    xm /= static_cast<double>(x.size());

    const Line start = ols(init_x, init_log_y);
    double B = start.slope;
    double D = start.intercept + B * xm;

    auto sse = [&](double b_, double d_) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = std::exp(b_ * (x[i] - xm) + d_) - y[i];
            s += r * r;
        }
        return s;
    };

    double current = sse(B, D);
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double u = x[i] - xm;
            const double e = std::exp(B * u + D);
            const double r = e - y[i];
            jtj00 += u * u * e * e;
            jtj01 += u * e * e;
            jtj11 += e * e;
            jtr0 += u * e * r;
            jtr1 += e * r;
        }
        const double det = jtj00 * jtj11 - jtj01 * jtj01;
        if (!(std::abs(det) > 0.0) || !std::isfinite(det)) break;
        const double dB = -(jtj11 * jtr0 - jtj01 * jtr1) / det;
        const double dD = -(jtj00 * jtr1 - jtj01 * jtr0) / det;

        double step = 1.0;
        bool improved = false;
        for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
            const double trial = sse(B + step * dB, D + step * dD);
            if (std::isfinite(trial) && trial <= current) {
                improved = true;
                current = trial;
                break;
            }
        }
        if (!improved) break;
        B += step * dB;
        D += step * dD;
        const double change = std::max(std::abs(step * dB) / std::max(std::abs(B), 1e-300),
                                       std::abs(step * dD) / std::max(std::abs(D), 1e-300));
        if (change < kRelativeTolerance) break;
    }

    DecayFit fit = DecayFit::from_identifiable(B, D - B * xm);
    fit.n_points = x.size();
    std::vector<double> predicted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) predicted[i] = eval_f1(fit, x[i]);
    fit.r_squared = r_squared(y, predicted);
    return fit;
}

// ---------------------------------------------------------------------------
// g and f2

double eval_g(const GrowthFit& fit, double mu1) { return fit.s * std::exp(fit.beta * mu1); }

double invert_g(const GrowthFit& fit, double size) {
    if (!(size > 0.0)) throw InvalidInput("dataset size must be > 0");
    if (fit.beta == 0.0) throw DegenerateData("growth rate beta is zero; g is not invertible");
    return std::log(size / fit.s) / fit.beta;
}

GrowthFit fit_g(std::span<const XY> points) {
    require_finite(points);
    std::vector<double> x, log_size;
    for (const auto& p : points) {
        if (!(p.y > 0.0)) throw InvalidInput("dataset sizes must be > 0 for the growth fit");
        x.push_back(p.x);
        log_size.push_back(std::log(p.y));
    }
    if (distinct_count(x) < 2) {
        throw InvalidInput("growth fit needs at least 2 points with distinct ID values");
    }
    const Line line = ols(x, log_size);
    GrowthFit fit{std::exp(line.intercept), line.slope, 0.0, x.size()};
    std::vector<double> predicted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) predicted[i] = line.intercept + line.slope * x[i];
    fit.r_squared = r_squared(log_size, predicted);
    return fit;
}

double eval_f2(const CompositeModel& model, double size) {
    if (!(size > 0.0)) throw InvalidInput("dataset size must be > 0");
    if (model.growth.beta == 0.0) throw DegenerateData("growth rate beta is zero");
    const auto& d = model.decay;
    return std::pow(d.a, (d.b / model.growth.beta) * std::log(size / model.growth.s) - d.c);
}

double invert_f2(const CompositeModel& model, double percent) {
    if (!(percent > 0.0)) {
        throw InvalidInput("replication percentage must be > 0 to invert (log of non-positive)");
    }
    const auto& d = model.decay;
    const double ln_a = log_base(d.a);
    if (d.b == 0.0 || model.growth.beta == 0.0) {
        throw DegenerateData("b and beta must be non-zero to invert f2");
    }
    const double log_a_p = std::log(percent) / ln_a;
    return model.growth.s * std::exp((model.growth.beta / d.b) * (log_a_p + d.c));
}

double r_squared(std::span<const double> observed, std::span<const double> predicted) {
    if (observed.size() != predicted.size() || observed.size() < 2) {
        throw InvalidInput("R^2 needs two equal-length series of at least 2 values");
    }
    double mean = 0.0;
    for (double v : observed) mean += v;
    mean /= static_cast<double>(observed.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        ss_res += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
        ss_tot += (observed[i] - mean) * (observed[i] - mean);
    }
    if (ss_tot == 0.0) throw DegenerateData("observed values are constant; R^2 is undefined");
    return 1.0 - ss_res / ss_tot;
}

std::vector<XY> sample_curve(const std::function<double(double)>& f, double lo, double hi,
                             std::size_t n, bool log_spacing) {
    if (n < 2 || !(hi > lo)) throw InvalidInput("curve sampling needs n >= 2 and hi > lo");
    if (log_spacing && !(lo > 0.0)) throw InvalidInput("log-spaced curve needs lo > 0");
    std::vector<XY> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        const double x = log_spacing ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                                     : lo + t * (hi - lo);
        out.push_back({x, f(x)});
    }
    return out;
}

void write_curve_csv(std::span<const XY> curve, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << std::setprecision(6) << "x,y\n";
    for (const auto& p : curve) out << p.x << ',' << p.y << '\n';
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace repliscope

#pragma once

// Independent reference implementations and data builders shared by the unit
// and acceptance suites. Nothing here calls into the library's numerics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <span>
#include <random>
#include <utility>
#include <vector>

#include "repliscope/vecstore.hpp"

namespace oracle {

using repliscope::SpaceTag;
using repliscope::VectorDataset;

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double gaussian(std::mt19937_64& rng) {
    const double u1 = 1.0 - unit(rng);
    const double u2 = unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline VectorDataset random_dataset(std::size_t n, std::size_t dim, std::uint64_t seed,
                                    double lo = 0.0, double hi = 255.0,
                                    SpaceTag tag = SpaceTag::pixel_raw_0_255) {
    std::mt19937_64 rng(seed);
    std::vector<float> v(n * dim);
    for (auto& x : v) x = static_cast<float>(lo + (hi - lo) * unit(rng));
    return VectorDataset(n, dim, std::move(v), tag);
}

/// Haar-ish random orthogonal matrix (row-major, n x n) by Gram-Schmidt on Gaussians.
inline std::vector<double> random_rotation(std::size_t n, std::mt19937_64& rng) {
    std::vector<double> q(n * n);
    for (auto& x : q) x = gaussian(rng);
    for (std::size_t r = 0; r < n; ++r) {
        double* v = &q[r * n];
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t p = 0; p < r; ++p) {
                const double* u = &q[p * n];
                double d = 0.0;
                for (std::size_t j = 0; j < n; ++j) d += u[j] * v[j];
                for (std::size_t j = 0; j < n; ++j) v[j] -= d * u[j];
            }
        }
        double norm = 0.0;
        for (std::size_t j = 0; j < n; ++j) norm += v[j] * v[j];
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < n; ++j) v[j] /= norm;
    }
    return q;
}

/// n points uniform in [0,1]^d, zero-padded to `ambient` dims and rotated.
inline VectorDataset rotated_cube(std::size_t n, std::size_t d, std::size_t ambient,
                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto rot = random_rotation(ambient, rng);
    std::vector<float> v(n * ambient);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& c : x) c = unit(rng);
        for (std::size_t j = 0; j < ambient; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += rot[j * ambient + c] * x[c];
            v[i * ambient + j] = static_cast<float>(s);
        }
    }
    return VectorDataset(n, ambient, std::move(v), SpaceTag::external_embedding);
}

/// Applies y = R x + t to every row.
inline VectorDataset transform(const VectorDataset& ds, const std::vector<double>& rot,
                               const std::vector<double>& shift) {
    const std::size_t n = ds.dim();
    std::vector<float> v(ds.count() * n);
    for (std::size_t i = 0; i < ds.count(); ++i) {
        const auto r = ds.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            double s = shift.empty() ? 0.0 : shift[j];
            if (rot.empty()) {
                s += r[j];
            } else {
                for (std::size_t c = 0; c < n; ++c) s += rot[j * n + c] * r[c];
            }
            v[i * n + j] = static_cast<float>(s);
        }
    }
    return VectorDataset(ds.count(), n, std::move(v), ds.space_tag());
}

inline long double distance(std::span<const float> a, std::span<const float> b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const long double d = static_cast<long double>(a[i]) - static_cast<long double>(b[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

struct Nearest {
    std::size_t index;
    double distance;
};

/// Plain double loop, ties resolved to the smaller index.
inline std::vector<Nearest> naive_min(const VectorDataset& q, const VectorDataset& r) {
    std::vector<Nearest> out(q.count());
    for (std::size_t i = 0; i < q.count(); ++i) {
        long double best = INFINITY;
        std::size_t arg = 0;
        for (std::size_t j = 0; j < r.count(); ++j) {
            const long double d = distance(q.row(i), r.row(j));
            if (d < best) {
                best = d;
                arg = j;
            }
        }
        out[i] = {arg, static_cast<double>(best)};
    }
    return out;
}

/// Full sort of all distances per row.
inline std::vector<std::vector<Nearest>> naive_knn(const VectorDataset& ds, std::size_t k,
                                                   bool exclude_self) {
    std::vector<std::vector<Nearest>> out(ds.count());
    for (std::size_t i = 0; i < ds.count(); ++i) {
        std::vector<std::pair<long double, std::size_t>> all;
        for (std::size_t j = 0; j < ds.count(); ++j) {
            if (exclude_self && i == j) continue;
            all.emplace_back(distance(ds.row(i), ds.row(j)), j);
        }
        std::sort(all.begin(), all.end());
        for (std::size_t m = 0; m < k; ++m) {
            out[i].push_back({all[m].second, static_cast<double>(all[m].first)});
        }
    }
    return out;
}

/// Intrinsic dimension straight from the definition: for each point, the
/// sorted distances to all others, then the averaged local estimates.
inline double naive_id(const VectorDataset& ds, std::size_t k1, std::size_t k2) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < ds.count(); ++i) {
        std::vector<long double> d;
        for (std::size_t j = 0; j < ds.count(); ++j) {
            if (j != i) d.push_back(distance(ds.row(i), ds.row(j)));
        }
        std::sort(d.begin(), d.end());
        for (std::size_t k = k1; k <= k2; ++k) {
            long double s = 0.0L;
            for (std::size_t j = 0; j + 1 < k; ++j) s += std::log(d[k - 1] / d[j]);
            total += static_cast<long double>(k - 1) / s;
        }
    }
    return static_cast<double>(total / (ds.count() * (k2 - k1 + 1)));
}

/// Root of a monotone f on [lo, hi] by bisection in log space (lo > 0).
inline double bisect_log(const std::function<double(double)>& f, double target, double lo,
                         double hi, int iters = 200) {
    double llo = std::log(lo), lhi = std::log(hi);
    const bool increasing = f(hi) > f(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (llo + lhi);
        const bool below = f(std::exp(mid)) < target;
        if (below == increasing) {
            llo = mid;
        } else {
            lhi = mid;
        }
    }
    return std::exp(0.5 * (llo + lhi));
}

/// Simple OLS slope/intercept by normal equations in long double.
inline std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y) {
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const long double n = static_cast<long double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += static_cast<long double>(x[i]) * x[i];
        sxy += static_cast<long double>(x[i]) * y[i];
    }
    const long double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const long double intercept = (sy - slope * sx) / n;
    return {static_cast<double>(slope), static_cast<double>(intercept)};
}

inline double rel_err(double got, double want) {
    if (want == 0.0) return std::fabs(got);
    return std::fabs(got - want) / std::fabs(want);
}

}  // namespace oracle

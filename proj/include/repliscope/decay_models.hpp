#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "repliscope/error.hpp"

namespace repliscope {

/// An (x, y) observation: (ID, replication %) for f1, (ID, size) for g.
struct XY {
    double x;
    double y;
};

/// Replication % = a^(b * mu1 - c).
///
/// Only B = b ln a and C = -c ln a are determined by data; fits report the
/// canonical decomposition with |c| = 100 (c = 0, a = 0.97 when C = 0).
struct DecayFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double B = 0.0;
    double C = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;

    /// Takes (a, b, c) as given; a must lie in (0, 1).
    static DecayFit from_parameters(double a, double b, double c);
    /// Canonical (a, b, c) for a log-linear slope/intercept pair.
    static DecayFit from_identifiable(double B, double C);
};

/// Dataset size = s * exp(beta * mu1).
struct GrowthFit {
    double s = 0.0;
    double beta = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
};

/// f2 = f1 o g^-1, replication as a function of dataset size.
struct CompositeModel {
    DecayFit decay;
    GrowthFit growth;
};

double eval_f1(const DecayFit& fit, double mu1);

/// Least squares in percentage space, Gauss-Newton on (B, C) with step
/// halving, started from OLS on ln(p) over the positive observations.
DecayFit fit_f1(std::span<const XY> points);

double eval_g(const GrowthFit& fit, double mu1);

/// ID at which g reaches `size`.
double invert_g(const GrowthFit& fit, double size);

/// OLS on ln(size); r_squared is computed in log-size space.
GrowthFit fit_g(std::span<const XY> points);

/// a^((b / beta) ln(size / s) - c).
double eval_f2(const CompositeModel& model, double size);

/// Dataset size at which f2 equals `percent`: s exp((beta / b)(log_a(percent) + c)).
double invert_f2(const CompositeModel& model, double percent);

/// 1 - SS_res / SS_tot. Throws DegenerateData when observed is constant.
double r_squared(std::span<const double> observed, std::span<const double> predicted);

/// n samples of f over [lo, hi], evenly spaced in x or in log x.
std::vector<XY> sample_curve(const std::function<double(double)>& f, double lo, double hi,
                             std::size_t n, bool log_spacing = false);

/// CSV with header x,y.
void write_curve_csv(std::span<const XY> curve, const std::filesystem::path& path);

}  // namespace repliscope

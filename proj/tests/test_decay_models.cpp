#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "repliscope/decay_models.hpp"
#include "support/oracles.hpp"

using namespace repliscope;

namespace {

// Values computed once with an independent OLS-on-logs script.
constexpr double kFlowerBeta = 0.25396633306961086;
constexpr double kFlowerS = 3.75723936735525;
constexpr double kFlowerR2 = 0.9997619395752112;

const std::vector<XY> kFlower{{22.02, 1000}, {24.70, 2000}, {27.41, 4000}, {28.99, 6000},
                              {30.34, 8189}};

std::vector<XY> on_curve(double B, double C, const std::vector<double>& xs) {
    std::vector<XY> pts;
    for (double x : xs) pts.push_back({x, std::exp(B * x + C)});
    return pts;
}

}  // namespace

TEST_CASE("f1 evaluation") {
    const auto fit = DecayFit::from_parameters(0.96, 62.93, 100.0);
    CHECK(eval_f1(fit, 100.0 / 62.93) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eval_f1(fit, 0.0) == doctest::Approx(59.27570063902996).epsilon(1e-12));
    CHECK(eval_f1(DecayFit::from_parameters(0.96, 3.0, 100.0), 0.0) ==
          doctest::Approx(59.27570063902996).epsilon(1e-12));
    const auto mid = DecayFit::from_parameters(0.9, 4.0, 20.0);
    CHECK(eval_f1(mid, 5.0) == 1.0);
    CHECK_THROWS_AS(DecayFit::from_parameters(1.0, 1.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(DecayFit::from_parameters(0.0, 1.0, 1.0), InvalidInput);
}

TEST_CASE("decompositions with equal (B, C) agree everywhere") {
    const auto f = DecayFit::from_parameters(0.96, 50.0, 100.0);
    const auto canon = DecayFit::from_identifiable(f.B, f.C);
    CHECK(canon.c == 100.0);
    CHECK(canon.a == doctest::Approx(0.96).epsilon(1e-14));
    const double k = 0.7;
    const double a2 = std::exp(std::log(0.96) / k);
    const auto g = DecayFit::from_parameters(a2, 50.0 * k, 100.0 * k);
    for (double mu = -10; mu <= 40; mu += 2.5) {
        const double want = std::exp(f.B * mu + f.C);
        CHECK(oracle::rel_err(eval_f1(f, mu), want) < 1e-9);
        CHECK(oracle::rel_err(eval_f1(g, mu), want) < 1e-9);
        CHECK(oracle::rel_err(eval_f1(canon, mu), want) < 1e-9);
    }

    const auto neg = DecayFit::from_identifiable(-0.2, -3.0);
    CHECK(neg.c == -100.0);
    CHECK(neg.a > 0.0);
    CHECK(neg.a < 1.0);
    CHECK(oracle::rel_err(eval_f1(neg, 2.0), std::exp(-0.4 - 3.0)) < 1e-12);
    const auto zero = DecayFit::from_identifiable(-0.2, 0.0);
    CHECK(zero.c == 0.0);
    CHECK(zero.a == 0.97);
    CHECK(oracle::rel_err(eval_f1(zero, 2.0), std::exp(-0.4)) < 1e-12);
}

TEST_CASE("f1 is decreasing exactly when B < 0") {
    const auto down = DecayFit::from_identifiable(-0.3, 2.0);
    const auto up = DecayFit::from_identifiable(0.3, 2.0);
    for (double mu = 0; mu < 20; mu += 1) {
        CHECK(eval_f1(down, mu + 1) < eval_f1(down, mu));
        CHECK(eval_f1(up, mu + 1) > eval_f1(up, mu));
    }
}

TEST_CASE("f1 fit recovers noiseless curves") {
    for (auto [B, C] : {std::pair{-0.5, 4.0}, {-0.05, 1.0}, {-1.3, 12.0}, {0.2, -1.0}}) {
        const auto pts = on_curve(B, C, {1, 2.5, 4, 6, 7.5});
        const auto fit = fit_f1(pts);
        CHECK(oracle::rel_err(fit.B, B) < 1e-6);
        CHECK(oracle::rel_err(fit.C, C) < 1e-6);
        CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fit.n_points == 5);
        CHECK(std::fabs(fit.c) == 100.0);
    }
    // Two points are interpolated exactly.
    const auto two = fit_f1(on_curve(-0.4, 3.0, {2, 5}));
    CHECK(oracle::rel_err(two.B, -0.4) < 1e-9);
}

TEST_CASE("f1 fit keeps zero observations in refinement") {
    auto pts = on_curve(-0.5, 4.0, {1, 2, 3, 4});
    pts.push_back({60, 0.0});
    const auto fit = fit_f1(pts);
    CHECK(oracle::rel_err(fit.B, -0.5) < 1e-6);
    CHECK(fit.n_points == 5);
}

TEST_CASE("f1 fit errors") {
    const std::vector<XY> one{{1, 5}};
    CHECK_THROWS_AS(fit_f1(one), InvalidInput);
    const std::vector<XY> same_x{{1, 5}, {1, 3}};
    CHECK_THROWS_AS(fit_f1(same_x), InvalidInput);
    const std::vector<XY> flat{{1, 5}, {2, 5}, {3, 5}};
    CHECK_THROWS_AS(fit_f1(flat), DegenerateData);
    const std::vector<XY> neg{{1, 5}, {2, -1}};
    CHECK_THROWS_AS(fit_f1(neg), InvalidInput);
    const std::vector<XY> one_positive{{1, 5}, {2, 0}, {3, 0}};
    CHECK_THROWS_AS(fit_f1(one_positive), DegenerateData);
}

TEST_CASE("g fit on the published Flower ID/size pairs") {
    const auto g = fit_g(kFlower);
    CHECK(g.beta == doctest::Approx(kFlowerBeta).epsilon(1e-10));
    CHECK(g.s == doctest::Approx(kFlowerS).epsilon(1e-9));
    CHECK(g.r_squared == doctest::Approx(kFlowerR2).epsilon(1e-10));
    CHECK(g.beta == doctest::Approx(0.254).epsilon(0.02 / 0.254));

    std::vector<double> x, y;
    for (const auto& p : kFlower) {
        x.push_back(p.x);
        y.push_back(std::log(p.y));
    }
    const auto [slope, intercept] = oracle::ols(x, y);
    CHECK(oracle::rel_err(g.beta, slope) < 1e-10);
    CHECK(oracle::rel_err(std::log(g.s), intercept) < 1e-9);
}

TEST_CASE("g fit exactness and errors") {
    std::vector<XY> pts;
    for (double mu : {3.0, 5.0, 11.0}) pts.push_back({mu, 7.0 * std::exp(0.4 * mu)});
    const auto g = fit_g(pts);
    CHECK(g.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(oracle::rel_err(g.s, 7.0) < 1e-10);
    CHECK(oracle::rel_err(invert_g(g, eval_g(g, 4.2)), 4.2) < 1e-12);

    const std::vector<XY> two{{1, 10}, {2, 30}};
    CHECK(fit_g(two).r_squared == doctest::Approx(1.0));
    const std::vector<XY> zero{{1, 0}, {2, 30}};
    CHECK_THROWS_AS(fit_g(zero), InvalidInput);
    const std::vector<XY> one{{1, 10}};
    CHECK_THROWS_AS(fit_g(one), InvalidInput);
}

TEST_CASE("f2 composition and inverse") {
    const CompositeModel m{DecayFit::from_parameters(0.97, 8.0, 100.0), GrowthFit{3.7, 0.25, 1, 5}};
    CHECK(oracle::rel_err(eval_f2(m, 3.7), std::pow(0.97, -100.0)) < 1e-12);
    for (double mu : {5.0, 12.5, 30.0}) {
        CHECK(oracle::rel_err(eval_f2(m, eval_g(m.growth, mu)), eval_f1(m.decay, mu)) < 1e-9);
    }
    for (double n : {1e2, 1e4, 1e6}) CHECK(oracle::rel_err(invert_f2(m, eval_f2(m, n)), n) < 1e-6);
    for (double p : {0.1, 1.0, 10.0, 50.0}) {
        CHECK(oracle::rel_err(eval_f2(m, invert_f2(m, p)), p) < 1e-6);
    }
    CHECK(oracle::rel_err(invert_f2(m, std::pow(0.97, -100.0)), 3.7) < 1e-9);

    const double target = 5.0;
    const double root = oracle::bisect_log([&](double n) { return eval_f2(m, n); }, target, 1e-3, 1e12);
    CHECK(oracle::rel_err(invert_f2(m, target), root) < 1e-4);

    double prev = eval_f2(m, 10.0);
    for (double n = 20; n <= 1e6; n *= 2) {
        const double cur = eval_f2(m, n);
        CHECK(cur < prev);
        prev = cur;
    }

    CHECK_THROWS_AS(eval_f2(m, 0.0), InvalidInput);
    CHECK_THROWS_AS(invert_f2(m, 0.0), InvalidInput);
    CHECK_THROWS_AS(invert_f2(m, -1.0), InvalidInput);
}

TEST_CASE("R squared") {
    const std::vector<double> obs{1, 2, 3, 4};
    CHECK(r_squared(obs, obs) == 1.0);
    const std::vector<double> mean(4, 2.5);
    CHECK(r_squared(obs, mean) == 0.0);
    const std::vector<double> o2{0, 1}, p2{1, 0};
    CHECK(r_squared(o2, p2) == -3.0);
    const std::vector<double> flat{2, 2};
    CHECK_THROWS_AS(r_squared(flat, p2), DegenerateData);
    const std::vector<double> short_{1};
    CHECK_THROWS_AS(r_squared(short_, short_), InvalidInput);
}

TEST_CASE("curve sampling and CSV") {
    const auto lin = sample_curve([](double x) { return 2 * x; }, 0, 1, 3);
    REQUIRE(lin.size() == 3);
    CHECK(lin[1].x == 0.5);
    CHECK(lin[1].y == 1.0);
    const auto lg = sample_curve([](double x) { return x; }, 10, 1000, 3, true);
    CHECK(lg[1].x == doctest::Approx(100.0));
    CHECK_THROWS_AS(sample_curve([](double x) { return x; }, 0, 1, 3, true), InvalidInput);

    const auto path = std::filesystem::temp_directory_path() / "repliscope_curve.csv";
    write_curve_csv(lin, path);
    std::ifstream in(path);
    std::string all((std::istreambuf_iterator<char>(in)), {});
    CHECK(all == "x,y\n0,0\n0.5,1\n1,2\n");
}

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "repliscope/vecstore.hpp"
#include "support/oracles.hpp"

using namespace repliscope;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> header_bytes(std::uint8_t dtype, std::uint8_t tag, std::uint32_t dim,
                                       std::uint64_t count) {
    std::vector<std::uint8_t> b{'V', 'D', 'S', '1', dtype, tag, 0, 0};
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(dim >> (8 * i)));
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(count >> (8 * i)));
    return b;
}

VdsErrorKind decode_kind(const std::vector<std::uint8_t>& bytes) {
    try {
        decode_vds(bytes);
    } catch (const VdsFormatError& e) {
        return e.kind();
    }
    FAIL("decode unexpectedly succeeded");
    return VdsErrorKind::io;
}

}  // namespace

TEST_CASE("dataset invariants are enforced") {
    CHECK_THROWS_AS(VectorDataset(0, 3, {}, SpaceTag::pixel_raw_0_255), InvalidInput);
    CHECK_THROWS_AS(VectorDataset(1, 0, {}, SpaceTag::pixel_raw_0_255), InvalidInput);
    CHECK_THROWS_AS(VectorDataset(2, 2, {1, 2, 3}, SpaceTag::pixel_raw_0_255), InvalidInput);
    CHECK_THROWS_AS(VectorDataset(1, 2, {1, std::numeric_limits<float>::quiet_NaN()},
                                  SpaceTag::pixel_raw_0_255),
                    InvalidInput);
    CHECK_THROWS_AS(VectorDataset(1, 1, {std::numeric_limits<float>::infinity()},
                                  SpaceTag::pixel_raw_0_255),
                    InvalidInput);
    CHECK_THROWS_AS(VectorDataset(2, 1, {1, 2}, SpaceTag::pixel_raw_0_255,
                                  std::vector<std::string>{"a"}),
                    InvalidInput);
    CHECK_THROWS_AS(VectorDataset(1, 1, {1}, SpaceTag::pixel_raw_0_255,
                                  std::vector<std::string>{"a\nb"}),
                    InvalidInput);

    const VectorDataset ds(2, 2, {1, 2, 3, 4}, SpaceTag::pixel_zscored,
                           std::vector<std::string>{"x.png", "y.png"});
    CHECK(ds.row(1)[0] == 3.0f);
    CHECK(ds.label(1) == "y.png");
    const VectorDataset anon(2, 1, {5, 6}, SpaceTag::external_embedding);
    CHECK(anon.label(1) == "1");
}

TEST_CASE("VDS byte layout is little-endian with the documented header") {
    const VectorDataset ds(1, 2, {1.0f, -2.5f}, SpaceTag::pixel_zscored);
    const auto bytes = encode_vds(ds);
    auto expected = header_bytes(1, 1, 2, 1);
    for (float f : {1.0f, -2.5f}) {
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        for (int i = 0; i < 4; ++i) expected.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
    }
    for (int i = 0; i < 4; ++i) expected.push_back(0);
    CHECK(bytes == expected);

    const VectorDataset named(2, 1, {0.0f, 1.0f}, SpaceTag::external_embedding,
                              std::vector<std::string>{"a", "bc"});
    const auto nb = encode_vds(named);
    const std::size_t id_off = 20 + 8;
    CHECK(nb[4 + 1] == 2);
    CHECK(nb[id_off] == 4);
    CHECK(std::string(nb.begin() + id_off + 4, nb.end()) == "a\nbc");
}

TEST_CASE("VDS round trip is bit exact") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng() % 9, d = 1 + rng() % 17;
        std::vector<float> v(n * d);
        for (auto& x : v) {
            std::uint32_t u = static_cast<std::uint32_t>(rng());
            std::memcpy(&x, &u, 4);
            if (!std::isfinite(x)) x = -0.0f;
        }
        std::optional<std::vector<std::string>> ids;
        if (trial % 2) {
            ids.emplace();
            for (std::size_t i = 0; i < n; ++i) ids->push_back("img/" + std::to_string(rng()));
        }
        const VectorDataset ds(n, d, v, static_cast<SpaceTag>(trial % 3), ids);
        const auto back = decode_vds(encode_vds(ds));
        CHECK(back == ds);
        CHECK(std::memcmp(back.values().data(), ds.values().data(), n * d * 4) == 0);
    }
}

TEST_CASE("VDS decode rejects malformed input with a specific kind") {
    const VectorDataset ds(2, 3, {1, 2, 3, 4, 5, 6}, SpaceTag::pixel_raw_0_255,
                           std::vector<std::string>{"p", "q"});
    const auto good = encode_vds(ds);

    auto bad = good;
    bad[0] = 'X';
    CHECK(decode_kind(bad) == VdsErrorKind::bad_magic);

    bad = good;
    bad[4] = 2;
    CHECK(decode_kind(bad) == VdsErrorKind::unsupported_dtype);

    bad = good;
    bad[5] = 9;
    CHECK(decode_kind(bad) == VdsErrorKind::unknown_space_tag);

    bad = good;
    bad.resize(good.size() - 6);
    CHECK(decode_kind(bad) == VdsErrorKind::truncated);
    try {
        decode_vds(bad);
    } catch (const VdsFormatError& e) {
        CHECK(std::string(e.what()).find("bytes") != std::string::npos);
    }

    bad = good;
    bad.push_back(0);
    CHECK(decode_kind(bad) == VdsErrorKind::trailing_bytes);

    // Three ids for two rows.
    bad.assign(good.begin(), good.begin() + 20 + 24);
    const std::string ids = "p\nq\nr";
    for (int i = 0; i < 4; ++i) bad.push_back(static_cast<std::uint8_t>(ids.size() >> (8 * i)));
    bad.insert(bad.end(), ids.begin(), ids.end());
    CHECK(decode_kind(bad) == VdsErrorKind::id_count_mismatch);

    auto zero_dim = header_bytes(1, 0, 0, 1);
    CHECK(decode_kind(zero_dim) == VdsErrorKind::bad_header);

    CHECK(decode_kind({'V', 'D'}) == VdsErrorKind::truncated);
}

TEST_CASE("write_vds and read_vds go through the filesystem") {
    const auto path = fs::temp_directory_path() / "repliscope_vecstore_test.vds";
    const auto ds = oracle::random_dataset(5, 4, 3);
    write_vds(ds, path);
    CHECK(read_vds(path) == ds);
    fs::remove(path);
    try {
        read_vds(path);
        FAIL("expected io error");
    } catch (const VdsFormatError& e) {
        CHECK(e.kind() == VdsErrorKind::io);
    }
}

TEST_CASE("subsample is seeded, ascending and without replacement") {
    const auto a = subsample_indices(1000, 100, 42);
    CHECK(a == subsample_indices(1000, 100, 42));
    CHECK(a != subsample_indices(1000, 100, 43));
    CHECK(a.size() == 100);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(std::adjacent_find(a.begin(), a.end()) == a.end());
    CHECK(a.back() < 1000);
    CHECK(subsample_indices(5, 5, 1) == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK_THROWS_AS(subsample_indices(5, 6, 1), InvalidInput);

    const VectorDataset ds(4, 1, {10, 11, 12, 13}, SpaceTag::external_embedding,
                           std::vector<std::string>{"a", "b", "c", "d"});
    const auto sub = subsample(ds, 2, 9);
    const auto idx = subsample_indices(4, 2, 9);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(sub.row(i)[0] == ds.row(idx[i])[0]);
        CHECK(sub.label(i) == ds.label(idx[i]));
    }
}

TEST_CASE("z-score statistics match a direct computation and invert") {
    // Two RGB pixels per row, two rows.
    const VectorDataset raw(2, 6, {0, 10, 20, 2, 10, 40, 4, 10, 60, 6, 10, 80},
                            SpaceTag::pixel_raw_0_255);
    const auto z = zscore_normalize(raw, 3);
    CHECK(z.dataset.space_tag() == SpaceTag::pixel_zscored);
    CHECK(z.stats.mean[0] == doctest::Approx(3.0));
    CHECK(z.stats.stddev[0] == doctest::Approx(std::sqrt(5.0)));
    CHECK(z.stats.mean[2] == doctest::Approx(50.0));
    CHECK(z.stats.stddev[1] == 0.0);
    CHECK(z.dataset.row(0)[1] == 0.0f);
    REQUIRE(z.warnings.size() == 1);

    double sum = 0, sq = 0;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t p = 0; p < 2; ++p) {
            const double v = z.dataset.row(i)[p * 3];
            sum += v;
            sq += v * v;
        }
    }
    CHECK(sum / 4 == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(sq / 4 == doctest::Approx(1.0).epsilon(1e-6));

    const auto back = invert_channel_stats(z.dataset, z.stats);
    for (std::size_t j = 0; j < raw.values().size(); ++j) {
        CHECK(back.values()[j] == doctest::Approx(raw.values()[j]).epsilon(1e-5));
    }

    const VectorDataset emb(1, 3, {1, 2, 3}, SpaceTag::external_embedding);
    CHECK_THROWS_AS(zscore_normalize(emb, 3), InvalidInput);
    CHECK_THROWS_AS(zscore_normalize(raw, 4), InvalidInput);
}

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <fewview/phantom.hpp>

using namespace fewview;

namespace {

ImageGrid random_image(std::size_t h, std::size_t w, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    ImageGrid img(h, w);
    for (float& v : img.values()) v = u(rng);
    return img;
}

} // namespace

TEST(Phantom, UniformDiskIsRadius40At128)
{
    const auto img = make_phantom({PhantomKind::uniform_disk, 0, 128});
    ASSERT_EQ(img.height(), 128u);
    ASSERT_EQ(img.width(), 128u);
    for (std::size_t i = 0; i < 128; ++i)
        for (std::size_t j = 0; j < 128; ++j) {
            const double dy = i - 63.5, dx = j - 63.5;
            EXPECT_EQ(img(i, j), dx * dx + dy * dy <= 1600.0 ? 1.0f : 0.0f);
        }
}

TEST(Phantom, RandomEllipsesDeterministicPerSeed)
{
    const PhantomSpec spec{PhantomKind::random_ellipses, 42, 128};
    EXPECT_EQ(make_phantom(spec), make_phantom(spec));
    EXPECT_NE(make_phantom(spec), make_phantom({PhantomKind::random_ellipses, 43, 128}));
}

TEST(Phantom, ValuesInUnitRange)
{
    for (auto kind : {PhantomKind::shepp_logan, PhantomKind::random_ellipses, PhantomKind::uniform_disk})
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto img = make_phantom({kind, seed, 64});
            for (float v : img.values()) {
                EXPECT_GE(v, 0.0f);
                EXPECT_LE(v, 1.0f);
            }
            EXPECT_GT(img.sum(), 0.0);
        }
}

TEST(Phantom, SheppLoganOuterEllipsesMirrorSymmetric)
{
    const auto table = shepp_logan_ellipses();
    const auto outer = rasterize({table[0], table[1]}, 128);
    for (std::size_t i = 0; i < 128; ++i) {
        double left = 0.0, right = 0.0;
        for (std::size_t j = 0; j < 64; ++j) {
            left += outer(i, j);
            right += outer(i, 127 - j);
        }
        EXPECT_NEAR(left, right, 1e-6) << "row " << i;
    }
    // The full phantom shares the outer support.
    const auto full = make_phantom({PhantomKind::shepp_logan, 0, 128});
    for (std::size_t k = 0; k < full.size(); ++k) {
        if (outer.values()[k] == 0.0f) {
            EXPECT_EQ(full.values()[k], 0.0f);
        }
    }
}

TEST(Phantom, RejectsTinySize)
{
    EXPECT_THROW(make_phantom({PhantomKind::shepp_logan, 0, 15}), Error);
    EXPECT_NO_THROW(make_phantom({PhantomKind::shepp_logan, 0, 16}));
}

TEST(Phantom, IdsArePadded)
{
    EXPECT_EQ(phantom_id({PhantomKind::random_ellipses, 7, 128}), "random_ellipses_0007");
}

TEST(Downsample, ConstantStaysConstant)
{
    const auto img = ImageGrid::filled(24, 24, 0.375f);
    for (std::size_t f : {1u, 2u, 3u, 4u, 6u, 12u}) {
        const auto out = downsample(img, f);
        EXPECT_EQ(out.height(), 24 / f);
        for (float v : out.values()) EXPECT_FLOAT_EQ(v, 0.375f);
    }
}

TEST(Downsample, FullSliceToWorkingResolution)
{
    const auto out = downsample(random_image(512, 512, 1), 4);
    EXPECT_EQ(out.height(), 128u);
    EXPECT_EQ(out.width(), 128u);
}

TEST(Downsample, TwoByTwoMean)
{
    const ImageGrid img(2, 2, {0.0f, 1.0f, 1.0f, 0.0f});
    const auto out = downsample(img, 2);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out.values()[0], 0.5f);
}

TEST(Downsample, RejectsNonDividingFactor)
{
    EXPECT_THROW(downsample(ImageGrid(10, 12), 4), DimensionError);
    EXPECT_THROW(downsample(ImageGrid(12, 10), 4), DimensionError);
    EXPECT_THROW(downsample(ImageGrid(12, 12), 0), DimensionError);
}

TEST(Downsample, ComposesMultiplicatively)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto img = random_image(72, 72, seed);
        for (auto [a, b] : {std::pair{2u, 2u}, {2u, 3u}, {3u, 4u}, {6u, 2u}}) {
            const auto twice = downsample(downsample(img, a), b);
            const auto once = downsample(img, a * b);
            ASSERT_TRUE(twice.same_shape(once));
            for (std::size_t k = 0; k < once.size(); ++k) EXPECT_NEAR(twice.values()[k], once.values()[k], 1e-6);
        }
    }
}

TEST(Normalize, MapsToUnitRange)
{
    const ImageGrid img(1, 4, {10.0f, 20.0f, 15.0f, 30.0f});
    const auto out = normalize_unit_range(img);
    EXPECT_FLOAT_EQ(out.values()[0], 0.0f);
    EXPECT_FLOAT_EQ(out.values()[1], 0.5f);
    EXPECT_FLOAT_EQ(out.values()[2], 0.25f);
    EXPECT_FLOAT_EQ(out.values()[3], 1.0f);
    const auto flat = normalize_unit_range(ImageGrid::filled(3, 3, 7.0f));
    for (float v : flat.values()) EXPECT_EQ(v, 0.0f);
}

TEST(Grid, RejectsBadConstruction)
{
    EXPECT_THROW(ImageGrid(2, 2, std::vector<float>(3)), DimensionError);
    EXPECT_THROW(ImageGrid(1, 1, {std::nanf("")}), Error);
    EXPECT_THROW(Sinogram({0.0, 0.0}, 4), Error);
    EXPECT_THROW(Sinogram({10.0, 5.0}, 4), Error);
    EXPECT_THROW(Sinogram({180.0}, 4), Error);
    EXPECT_THROW(Sinogram({0.0, 90.0}, 4, std::vector<float>(7)), DimensionError);
}

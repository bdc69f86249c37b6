#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include <fewview/metrics.hpp>

#include "oracles.hpp"

using namespace fewview;

namespace {

ImageGrid random_image(std::size_t h, std::size_t w, std::mt19937_64& rng)
{
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    ImageGrid img(h, w);
    for (float& v : img.values()) v = u(rng);
    return img;
}

ImageGrid add_noise(const ImageGrid& img, float amplitude, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(-amplitude, amplitude);
    ImageGrid out = img;
    for (float& v : out.values()) v += u(rng);
    return out;
}

} // namespace

TEST(Psnr, IdenticalImagesHitTheCap)
{
    std::mt19937_64 rng(1);
    const auto a = random_image(20, 20, rng);
    EXPECT_EQ(psnr(a, a), kPsnrCapDb);
}

TEST(Psnr, UniformOffsetOfOneTenthIsTwentyDb)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> a(64 * 64), b(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] = u(rng);
        b[k] = a[k] + 0.1;
    }
    EXPECT_NEAR(psnr(std::span<const double>(a), std::span<const double>(b), 1.0), 20.0, 1e-10);
}

TEST(Psnr, MatchesExtendedPrecisionOracle)
{
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const auto a = random_image(32, 40, rng), b = random_image(32, 40, rng);
        const double range = t % 2 ? 1.0 : 2.5;
        EXPECT_NEAR(psnr(a, b, range), static_cast<double>(oracle::psnr(a.values(), b.values(), range)), 1e-9);
    }
}

TEST(Psnr, ShiftInvariance)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> a(256), b(256), as(256), bs(256);
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] = u(rng);
        b[k] = u(rng);
        as[k] = a[k] + 0.75;
        bs[k] = b[k] + 0.75;
    }
    EXPECT_NEAR(psnr(std::span<const double>(as), std::span<const double>(bs), 1.0),
                psnr(std::span<const double>(a), std::span<const double>(b), 1.0), 1e-9);
}

TEST(Psnr, Errors)
{
    EXPECT_THROW(psnr(ImageGrid(4, 4), ImageGrid(4, 5)), DimensionError);
    EXPECT_THROW(psnr(ImageGrid(4, 4), ImageGrid(4, 4), 0.0), Error);
}

TEST(Ssim, IdenticalImagesScoreExactlyOne)
{
    std::mt19937_64 rng(5);
    for (int t = 0; t < 5; ++t) {
        const auto a = random_image(24, 31, rng);
        EXPECT_EQ(ssim(a, a), 1.0);
    }
}

TEST(Ssim, ConstantImagesFollowLuminanceFormula)
{
    for (auto [p, q] : {std::pair{0.25f, 0.75f}, {0.0f, 1.0f}, {0.5f, 0.5f}, {0.9f, 0.1f}})
        for (double range : {1.0, 2.0}) {
            const auto a = ImageGrid::filled(16, 16, p), b = ImageGrid::filled(16, 16, q);
            const double c1 = (0.01 * range) * (0.01 * range);
            const double expect = (2.0 * p * q + c1) / (double(p) * p + double(q) * q + c1);
            EXPECT_NEAR(ssim(a, b, range), expect, 1e-10);
        }
}

TEST(Ssim, MatchesIndependentImplementation)
{
    std::mt19937_64 rng(6);
    for (int t = 0; t < 10; ++t) {
        const auto a = random_image(32, 32, rng);
        const auto b = add_noise(a, 0.05f * (t + 1), 100 + t);
        EXPECT_NEAR(ssim(a, b), static_cast<double>(oracle::ssim(a.values(), b.values(), 32, 32, 1.0L)), 1e-4);
        const auto c = random_image(32, 32, rng);
        EXPECT_NEAR(ssim(a, c), static_cast<double>(oracle::ssim(a.values(), c.values(), 32, 32, 1.0L)), 1e-4);
    }
}

TEST(Ssim, SymmetricAndBoundedAbove)
{
    std::mt19937_64 rng(7);
    for (int t = 0; t < 10; ++t) {
        const auto a = random_image(20, 20, rng), b = random_image(20, 20, rng);
        EXPECT_EQ(ssim(a, b), ssim(b, a));
        EXPECT_LE(ssim(a, b), 1.0);
        EXPECT_GE(ssim(a, b), -1.0);
    }
}

TEST(Ssim, DecreasesWithNoiseAmplitude)
{
    std::mt19937_64 rng(8);
    const auto a = random_image(48, 48, rng);
    const double s1 = ssim(a, add_noise(a, 0.02f, 9));
    const double s2 = ssim(a, add_noise(a, 0.1f, 9));
    const double s3 = ssim(a, add_noise(a, 0.3f, 9));
    EXPECT_LT(s1, 1.0);
    EXPECT_GT(s1, s2);
    EXPECT_GT(s2, s3);
}

TEST(Ssim, Errors)
{
    EXPECT_THROW(ssim(ImageGrid(11, 11), ImageGrid(11, 12)), DimensionError);
    EXPECT_THROW(ssim(ImageGrid(10, 20), ImageGrid(10, 20)), DimensionError);
    EXPECT_NO_THROW(ssim(ImageGrid(11, 11), ImageGrid(11, 11)));
}

TEST(MetricCsv, HeaderAndRoundTrip)
{
    const std::vector<MetricRecord> rows{{"fbp", 3, "shepp_logan_0000", 12.5, 0.25},
                                         {"rls_warm", 18, "random_ellipses_0001", 33.123456, 0.987654}};
    std::ostringstream out;
    write_metric_csv(out, rows);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "method,num_views,sample_id,psnr_db,ssim");
    std::istringstream in(out.str());
    EXPECT_EQ(read_metric_csv(in), rows);

    std::istringstream bad("method,views\nfbp,3\n");
    EXPECT_THROW(read_metric_csv(bad), Error);
}

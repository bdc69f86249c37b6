#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <fewview/io.hpp>
#include <fewview/phantom.hpp>
#include <fewview/png.hpp>

using namespace fewview;
namespace fs = std::filesystem;

namespace {

class IoTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("fewview_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path dir_;
};

std::vector<float> random_values(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> d(0.0f, 3.0f);
    std::vector<float> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

} // namespace

TEST_F(IoTest, ImageRoundTripIsBitExact)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ImageGrid img(37, 53, random_values(37 * 53, seed));
        save_image(dir_ / "img", img);
        EXPECT_EQ(load_image(dir_ / "img"), img);
        EXPECT_EQ(load_image(dir_ / "img.json"), img);
    }
}

TEST_F(IoTest, SinogramRoundTripKeepsAngles)
{
    std::vector<double> angles{0.0, 0.1, 1.0 / 3.0, 20.0, 179.99999};
    const Sinogram sino(angles, 11, random_values(55, 9));
    save_sinogram(dir_ / "s", sino);
    const auto back = load_sinogram(dir_ / "s");
    EXPECT_EQ(back, sino);
    EXPECT_EQ(back.angles_deg(), angles);
}

TEST_F(IoTest, SidecarMatchesPublishedSchema)
{
    save_image(dir_ / "img", ImageGrid(4, 3));
    std::ifstream in(dir_ / "img.json");
    const auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j, (nlohmann::json{{"kind", "image"}, {"height", 4}, {"width", 3}, {"dtype", "f32le"}}));

    save_sinogram(dir_ / "s", Sinogram({0.0, 90.0}, 3));
    std::ifstream sin(dir_ / "s.json");
    const auto js = nlohmann::json::parse(sin);
    EXPECT_EQ(js, (nlohmann::json{{"kind", "sinogram"},
                                  {"num_views", 2},
                                  {"num_bins", 3},
                                  {"angles_deg", {0.0, 90.0}},
                                  {"dtype", "f32le"}}));
}

TEST_F(IoTest, PayloadIsLittleEndianFloat32)
{
    save_image(dir_ / "img", ImageGrid(1, 2, {1.0f, -2.5f}));
    std::ifstream in(dir_ / "img.raw", std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    // 1.0f = 0x3F800000, -2.5f = 0xC0200000
    EXPECT_EQ(bytes, (std::vector<unsigned char>{0x00, 0x00, 0x80, 0x3F, 0x00, 0x00, 0x20, 0xC0}));
}

TEST_F(IoTest, FullSinogramPayloadSize)
{
    save_sinogram(dir_ / "dense", Sinogram(uniform_angles(180), 128));
    EXPECT_EQ(fs::file_size(dir_ / "dense.raw"), 180u * 128u * 4u);
}

TEST_F(IoTest, SidecarPayloadMismatchIsRejected)
{
    save_image(dir_ / "img", ImageGrid(128, 127));
    std::ofstream(dir_ / "img.json") << R"({"kind":"image","height":128,"width":128,"dtype":"f32le"})";
    EXPECT_THROW(load_image(dir_ / "img"), DimensionError);

    save_sinogram(dir_ / "s", Sinogram({0.0, 45.0}, 4));
    std::ofstream(dir_ / "s.json") << R"({"kind":"sinogram","num_views":2,"num_bins":5,"angles_deg":[0,45],"dtype":"f32le"})";
    EXPECT_THROW(load_sinogram(dir_ / "s"), DimensionError);
    std::ofstream(dir_ / "s.json") << R"({"kind":"sinogram","num_views":3,"num_bins":4,"angles_deg":[0,45],"dtype":"f32le"})";
    EXPECT_THROW(load_sinogram(dir_ / "s"), DimensionError);
}

TEST_F(IoTest, MissingFilesAndNonFiniteValuesAreRejected)
{
    EXPECT_THROW(load_image(dir_ / "nothing"), Error);
    save_image(dir_ / "img", ImageGrid(1, 1));
    fs::remove(dir_ / "img.raw");
    EXPECT_THROW(load_image(dir_ / "img"), Error);

    save_image(dir_ / "nan", ImageGrid(1, 1));
    {
        std::ofstream raw(dir_ / "nan.raw", std::ios::binary | std::ios::trunc);
        const unsigned char quiet_nan[4] = {0x00, 0x00, 0xC0, 0x7F};
        raw.write(reinterpret_cast<const char*>(quiet_nan), 4);
    }
    EXPECT_THROW(load_image(dir_ / "nan"), Error);
}

TEST_F(IoTest, WrongKindIsRejected)
{
    save_image(dir_ / "img", ImageGrid(2, 2));
    EXPECT_THROW(load_sinogram(dir_ / "img"), Error);
}

TEST_F(IoTest, PngGrayRoundTrip)
{
    ImageGrid img(16, 16);
    for (std::size_t k = 0; k < img.size(); ++k) img.values()[k] = static_cast<float>(k % 256) / 255.0f;
    write_png_gray(dir_ / "a.png", img);
    const auto back = read_png_gray(dir_ / "a.png");
    ASSERT_TRUE(back.same_shape(img));
    for (std::size_t k = 0; k < img.size(); ++k) EXPECT_EQ(back.values()[k], static_cast<float>(k % 256));
}

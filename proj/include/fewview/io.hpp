#pragma once

// On-disk formats: a JSON sidecar `<name>.json` plus a little-endian float32
// payload `<name>.raw`. Images are row-major; sinograms are view-major.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "grid.hpp"

namespace fewview {

namespace fs = std::filesystem;

namespace detail {

/// Accepts "dir/name", "dir/name.json" or "dir/name.raw".
inline fs::path base_path(const fs::path& path)
{
    const auto ext = path.extension();
    if (ext == ".json" || ext == ".raw") return fs::path(path).replace_extension();
    return path;
}

inline fs::path with_suffix(const fs::path& base, const char* suffix)
{
    return fs::path(base.string() + suffix);
}

inline void write_f32le(const fs::path& path, std::span<const float> values)
{
    std::vector<char> bytes(values.size() * 4);
    for (std::size_t k = 0; k < values.size(); ++k) {
        auto bits = std::bit_cast<std::uint32_t>(values[k]);
        for (int b = 0; b < 4; ++b) bytes[4 * k + b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline std::vector<float> read_f32le(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % 4 != 0)
        throw DimensionError("'" + path.string() + "' size is not a multiple of 4 bytes");
    std::vector<float> values(bytes.size() / 4);
    for (std::size_t k = 0; k < values.size(); ++k) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b)
            bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * k + b])) << (8 * b);
        values[k] = std::bit_cast<float>(bits);
        if (!std::isfinite(values[k])) throw Error("'" + path.string() + "' holds a non-finite value");
    }
    return values;
}

inline nlohmann::json read_sidecar(const fs::path& path, const char* kind)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed sidecar '" + path.string() + "': " + e.what());
    }
    if (j.value("kind", "") != kind)
        throw Error("'" + path.string() + "' is not a " + kind + " sidecar");
    if (j.value("dtype", "") != "f32le") throw Error("'" + path.string() + "': unsupported dtype");
    return j;
}

inline void write_sidecar(const fs::path& path, const nlohmann::json& j)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << j.dump() << '\n';
}

} // namespace detail

inline void save_image(const fs::path& path, const ImageGrid& img)
{
    const auto base = detail::base_path(path);
    nlohmann::json j = {{"kind", "image"}, {"height", img.height()}, {"width", img.width()}, {"dtype", "f32le"}};
    detail::write_sidecar(detail::with_suffix(base, ".json"), j);
    detail::write_f32le(detail::with_suffix(base, ".raw"), img.values());
}

inline ImageGrid load_image(const fs::path& path)
{
    const auto base = detail::base_path(path);
    const auto sidecar = detail::with_suffix(base, ".json");
    const auto j = detail::read_sidecar(sidecar, "image");
    const auto h = j.at("height").get<std::size_t>();
    const auto w = j.at("width").get<std::size_t>();
    auto values = detail::read_f32le(detail::with_suffix(base, ".raw"));
    if (values.size() != h * w)
        throw DimensionError("'" + sidecar.string() + "' declares " + std::to_string(h) + "x" + std::to_string(w) +
                             " but payload holds " + std::to_string(values.size()) + " values");
    return ImageGrid(h, w, std::move(values));
}

inline void save_sinogram(const fs::path& path, const Sinogram& sino)
{
    const auto base = detail::base_path(path);
    nlohmann::json j = {{"kind", "sinogram"},
                        {"num_views", sino.num_views()},
                        {"num_bins", sino.num_bins()},
                        {"angles_deg", sino.angles_deg()},
                        {"dtype", "f32le"}};
    detail::write_sidecar(detail::with_suffix(base, ".json"), j);
    detail::write_f32le(detail::with_suffix(base, ".raw"), sino.values());
}

inline Sinogram load_sinogram(const fs::path& path)
{
    const auto base = detail::base_path(path);
    const auto sidecar = detail::with_suffix(base, ".json");
    const auto j = detail::read_sidecar(sidecar, "sinogram");
    const auto views = j.at("num_views").get<std::size_t>();
    const auto bins = j.at("num_bins").get<std::size_t>();
    auto angles = j.at("angles_deg").get<std::vector<double>>();
    if (angles.size() != views)
        throw DimensionError("'" + sidecar.string() + "' lists " + std::to_string(angles.size()) +
                             " angles for " + std::to_string(views) + " views");
    auto values = detail::read_f32le(detail::with_suffix(base, ".raw"));
    if (values.size() != views * bins)
        throw DimensionError("'" + sidecar.string() + "' declares " + std::to_string(views) + "x" +
                             std::to_string(bins) + " but payload holds " + std::to_string(values.size()) +
                             " values");
    return Sinogram(std::move(angles), bins, std::move(values));
}

} // namespace fewview

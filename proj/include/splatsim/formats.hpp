#pragma once

#include "splatsim/splat_renderer.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace splatsim {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes `bytes` to a sibling temp file and renames it over `path`, so a
/// reader never sees a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// 8-bit binary PPM (P6).
std::string encode_ppm(const Framebuffer& fb);

struct Image8 {
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb;
};
Image8 decode_ppm(std::string_view bytes);

/// ASCII PLY with double x,y,z and uchar red,green,blue.
std::string encode_ply(std::span<const ColoredPoint> points);

/// Reads x,y,z and optional red,green,blue vertex properties from ASCII or
/// binary_little_endian PLY.
std::vector<ColoredPoint> decode_ply(std::string_view bytes);

} // namespace splatsim

#include "splatsim/formats.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace splatsim {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    static thread_local std::mt19937_64 tag_rng{std::random_device{}()};
    fs::path tmp = path;
    tmp += ".tmp-" + hex64(tag_rng());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw FormatError("write failed for " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw FormatError("cannot rename into " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string encode_ppm(const Framebuffer& fb) {
    std::string out = "P6\n" + std::to_string(fb.width) + " " + std::to_string(fb.height) + "\n255\n";
    const std::size_t header = out.size();
    out.resize(header + fb.rgb.size() * 3);
    for (std::size_t i = 0; i < fb.rgb.size(); ++i)
        for (int c = 0; c < 3; ++c) out[header + 3 * i + c] = static_cast<char>(to_byte(fb.rgb[i][c]));
    return out;
}

namespace {

// Splits the next whitespace-delimited header token of a PPM, skipping comments.
std::string next_ppm_token(std::string_view bytes, std::size_t& pos) {
    for (;;) {
        while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
        if (pos < bytes.size() && bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            continue;
        }
        break;
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return std::string(bytes.substr(start, pos - start));
}

} // namespace

Image8 decode_ppm(std::string_view bytes) {
    std::size_t pos = 0;
    if (next_ppm_token(bytes, pos) != "P6") throw FormatError("not a binary PPM (P6)");
    Image8 img;
    try {
        img.width = std::stoi(next_ppm_token(bytes, pos));
        img.height = std::stoi(next_ppm_token(bytes, pos));
        if (std::stoi(next_ppm_token(bytes, pos)) != 255) throw FormatError("only 8-bit PPM is supported");
    } catch (const std::logic_error&) {
        throw FormatError("malformed PPM header");
    }
    ++pos;  // single whitespace after maxval
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height * 3;
    if (img.width <= 0 || img.height <= 0 || bytes.size() < pos + n) throw FormatError("truncated PPM data");
    img.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                   bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
    return img;
}

std::string encode_ply(std::span<const ColoredPoint> points) {
    std::string out;
    out.reserve(160 + points.size() * 64);
    out += "ply\nformat ascii 1.0\nelement vertex " + std::to_string(points.size()) +
           "\nproperty double x\nproperty double y\nproperty double z\n"
           "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
    char line[160];
    for (const auto& p : points) {
        std::snprintf(line, sizeof line, "%.17g %.17g %.17g %u %u %u\n", p.position.x(), p.position.y(),
                      p.position.z(), p.rgb[0], p.rgb[1], p.rgb[2]);
        out += line;
    }
    return out;
}

namespace {

struct PlyProperty {
    std::string type;
    std::string name;
};

std::size_t ply_type_size(const std::string& t) {
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "float" || t == "int32" || t == "uint32" || t == "float32") return 4;
    if (t == "double" || t == "float64") return 8;
    throw FormatError("unsupported PLY property type '" + t + "'");
}

double read_binary_le(const char* p, const std::string& t) {
    auto get = [p](auto v) {
        std::memcpy(&v, p, sizeof v);
        return static_cast<double>(v);
    };
    if (t == "char" || t == "int8") return get(std::int8_t{});
    if (t == "uchar" || t == "uint8") return get(std::uint8_t{});
    if (t == "short" || t == "int16") return get(std::int16_t{});
    if (t == "ushort" || t == "uint16") return get(std::uint16_t{});
    if (t == "int" || t == "int32") return get(std::int32_t{});
    if (t == "uint" || t == "uint32") return get(std::uint32_t{});
    if (t == "float" || t == "float32") return get(float{});
    return get(double{});
}

} // namespace

std::vector<ColoredPoint> decode_ply(std::string_view bytes) {
    std::size_t pos = 0;
    auto next_line = [&]() -> std::string {
        if (pos >= bytes.size()) throw FormatError("unexpected end of PLY header");
        std::size_t end = bytes.find('\n', pos);
        if (end == std::string_view::npos) end = bytes.size();
        std::string line(bytes.substr(pos, end - pos));
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };
    if (next_line() != "ply") throw FormatError("missing 'ply' magic");
    std::string format;
    std::size_t vertex_count = 0;
    bool in_vertex = false, seen_vertex = false;
    std::vector<PlyProperty> props;
    for (;;) {
        std::istringstream ls(next_line());
        std::string kw;
        ls >> kw;
        if (kw == "end_header") break;
        if (kw == "format") {
            ls >> format;
        } else if (kw == "element") {
            std::string name;
            std::size_t count = 0;
            ls >> name >> count;
            if (seen_vertex && name != "vertex") {
                in_vertex = false;  // trailing elements (faces) are ignored
                continue;
            }
            if (name != "vertex") throw FormatError("PLY elements before 'vertex' are not supported");
            in_vertex = seen_vertex = true;
            vertex_count = count;
        } else if (kw == "property" && in_vertex) {
            PlyProperty p;
            ls >> p.type;
            if (p.type == "list") throw FormatError("list properties on vertices are not supported");
            ls >> p.name;
            props.push_back(p);
        }
    }
    if (!seen_vertex) throw FormatError("PLY has no vertex element");
    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
    for (int i = 0; i < static_cast<int>(props.size()); ++i) {
        const auto& n = props[static_cast<std::size_t>(i)].name;
        if (n == "x") ix = i;
        else if (n == "y") iy = i;
        else if (n == "z") iz = i;
        else if (n == "red") ir = i;
        else if (n == "green") ig = i;
        else if (n == "blue") ib = i;
    }
    if (ix < 0 || iy < 0 || iz < 0) throw FormatError("PLY vertex lacks x/y/z");

    std::vector<double> values(props.size());
    std::vector<ColoredPoint> pts;
    pts.reserve(vertex_count);
    auto emit = [&] {
        ColoredPoint cp;
        cp.position = {values[static_cast<std::size_t>(ix)], values[static_cast<std::size_t>(iy)],
                       values[static_cast<std::size_t>(iz)]};
        if (ir >= 0 && ig >= 0 && ib >= 0) {
            cp.rgb = {static_cast<std::uint8_t>(values[static_cast<std::size_t>(ir)]),
                      static_cast<std::uint8_t>(values[static_cast<std::size_t>(ig)]),
                      static_cast<std::uint8_t>(values[static_cast<std::size_t>(ib)])};
        } else {
            cp.rgb = {255, 255, 255};
        }
        pts.push_back(cp);
    };

    if (format == "ascii") {
        for (std::size_t v = 0; v < vertex_count; ++v) {
            std::istringstream ls(next_line());
            for (auto& x : values)
                if (!(ls >> x)) throw FormatError("malformed PLY vertex line " + std::to_string(v));
            emit();
        }
    } else if (format == "binary_little_endian") {
        std::size_t stride = 0;
        for (const auto& p : props) stride += ply_type_size(p.type);
        if (bytes.size() < pos + stride * vertex_count) throw FormatError("truncated binary PLY");
        for (std::size_t v = 0; v < vertex_count; ++v) {
            const char* row = bytes.data() + pos + v * stride;
            for (std::size_t i = 0; i < props.size(); ++i) {
                values[i] = read_binary_le(row, props[i].type);
                row += ply_type_size(props[i].type);
            }
            emit();
        }
    } else {
        throw FormatError("unsupported PLY format '" + format + "'");
    }
    return pts;
}

} // namespace splatsim

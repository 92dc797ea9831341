#pragma once

// Image file I/O: binary PGM (P5) and PNG.
//
// Grayscale inputs must be 8-bit single channel; colour inputs are rejected
// rather than converted. Label maps are written as paletted PNG when every
// id fits in one byte and as 16-bit grayscale PNG otherwise.

#include "asrg/image.hpp"
#include "asrg/png.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string_view>
#include <string>
#include <vector>

namespace asrg {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
    return bytes;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error while writing '" + path.string() + "'");
}

namespace pgm {

struct Header {
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::size_t data_offset = 0;
};

inline bool has_magic(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5';
}

inline Header parse_header(std::span<const std::uint8_t> bytes) {
    if (!has_magic(bytes)) throw FormatError("pgm: expected binary P5 magic");
    std::size_t pos = 2;
    auto read_int = [&]() -> int {
        for (;;) {
            while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
            if (pos < bytes.size() && bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
                continue;
            }
            break;
        }
        if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw FormatError("pgm: malformed header");
        long long v = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos++] - '0');
            if (v > (1 << 30)) throw FormatError("pgm: header value out of range");
        }
        return static_cast<int>(v);
    };
    Header h;
    h.width = read_int();
    h.height = read_int();
    h.maxval = read_int();
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw FormatError("pgm: malformed header");
    h.data_offset = pos + 1;
    if (h.width <= 0 || h.height <= 0) throw FormatError("pgm: non-positive dimensions");
    if (h.maxval <= 0 || h.maxval > 65535) throw FormatError("pgm: invalid maxval");
    return h;
}

inline std::vector<std::uint16_t> read_samples(std::span<const std::uint8_t> bytes, const Header& h) {
    const std::size_t n = static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height);
    const std::size_t bps = h.maxval > 255 ? 2 : 1;
    const std::size_t have = bytes.size() - h.data_offset;
    if (have != n * bps) {
        throw FormatError("pgm: dimension mismatch: header declares " + std::to_string(n) + " pixels (" +
                          std::to_string(n * bps) + " bytes) but file carries " + std::to_string(have) +
                          " bytes");
    }
    std::vector<std::uint16_t> out(n);
    const auto* p = bytes.data() + h.data_offset;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = bps == 1 ? p[i] : static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]);
    }
    return out;
}

inline std::vector<std::uint8_t> encode(const GrayImage& img) {
    const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

}  // namespace pgm

inline GrayImage decode_gray(std::span<const std::uint8_t> bytes) {
    if (pgm::has_magic(bytes)) {
        const auto h = pgm::parse_header(bytes);
        if (h.maxval != 255) {
            throw FormatError("pgm: unsupported maxval " + std::to_string(h.maxval) + " (only 255)");
        }
        const auto samples = pgm::read_samples(bytes, h);
        return GrayImage(h.width, h.height, std::vector<std::uint8_t>(samples.begin(), samples.end()));
    }
    if (png::has_signature(bytes)) {
        const auto d = png::decode(bytes);
        if (d.color_type != png::ColorType::gray) {
            throw FormatError("png: expected 8-bit grayscale, got a paletted image");
        }
        if (d.bit_depth != 8) {
            throw FormatError("png: unsupported bit depth " + std::to_string(d.bit_depth) + " (only 8-bit gray)");
        }
        return GrayImage(d.width, d.height, std::vector<std::uint8_t>(d.samples.begin(), d.samples.end()));
    }
    throw FormatError("unrecognised image format (expected binary PGM or PNG)");
}

inline GrayImage load_gray(const std::filesystem::path& path) {
    try {
        return decode_gray(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

namespace detail {

inline bool has_extension(const std::filesystem::path& path, std::string_view ext) {
    auto e = path.extension().string();
    for (auto& ch : e) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return e == ext;
}

}  // namespace detail

inline std::vector<std::uint8_t> encode_gray_png(const GrayImage& img) {
    const std::vector<std::uint16_t> samples(img.pixels().begin(), img.pixels().end());
    return png::encode(img.width(), img.height(), 8, png::ColorType::gray, samples);
}

/// Writes binary PGM for a `.pgm` extension and 8-bit grayscale PNG otherwise.
inline void save_gray(const GrayImage& img, const std::filesystem::path& path) {
    if (detail::has_extension(path, ".pgm")) {
        write_file(path, pgm::encode(img));
    } else {
        write_file(path, encode_gray_png(img));
    }
}

/// Colour table for label previews. Index 0 (background) is black; the
/// colour is cosmetic, the index is the label.
inline std::vector<png::Rgb> label_palette(std::size_t entries) {
    std::vector<png::Rgb> pal(entries);
    for (std::size_t i = 1; i < entries; ++i) {
        pal[i] = {static_cast<std::uint8_t>(64 + (i * 97) % 192), static_cast<std::uint8_t>(64 + (i * 57) % 192),
                  static_cast<std::uint8_t>(64 + (i * 151) % 192)};
    }
    return pal;
}

inline std::vector<std::uint8_t> encode_label_png(const LabelMap& map) {
    const auto top = max_label(map);
    if (top > 65535) throw std::invalid_argument("label map has more than 65535 regions");
    const std::vector<std::uint16_t> samples(map.pixels().begin(), map.pixels().end());
    if (top <= 255) {
        const auto pal = label_palette(static_cast<std::size_t>(top) + 1);
        return png::encode(map.width(), map.height(), 8, png::ColorType::palette, samples, pal);
    }
    return png::encode(map.width(), map.height(), 16, png::ColorType::gray, samples);
}

inline void save_label_png(const LabelMap& map, const std::filesystem::path& path) {
    write_file(path, encode_label_png(map));
}

/// Reads a label map from a paletted PNG (index = label), an 8- or 16-bit
/// grayscale PNG (value = label), or a P5 PGM.
inline LabelMap decode_labels(std::span<const std::uint8_t> bytes) {
    std::vector<std::uint16_t> samples;
    int width = 0;
    int height = 0;
    if (pgm::has_magic(bytes)) {
        const auto h = pgm::parse_header(bytes);
        samples = pgm::read_samples(bytes, h);
        width = h.width;
        height = h.height;
    } else if (png::has_signature(bytes)) {
        auto d = png::decode(bytes);
        samples = std::move(d.samples);
        width = d.width;
        height = d.height;
    } else {
        throw FormatError("unrecognised label map format (expected PNG or PGM)");
    }
    return LabelMap(width, height, std::vector<std::uint32_t>(samples.begin(), samples.end()));
}

inline LabelMap load_labels(const std::filesystem::path& path) {
    try {
        return decode_labels(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace asrg

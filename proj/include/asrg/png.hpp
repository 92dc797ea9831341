#pragma once

// Minimal PNG codec for the single-channel formats this project exchanges:
// 8-bit grayscale, 16-bit grayscale and 8-bit paletted images. Deflate and
// CRC come from zlib; everything else (chunk layout, scanline filters) is
// handled here.

#include <zlib.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace asrg {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that could be read but is not in a supported layout.
class FormatError : public IoError {
public:
    using IoError::IoError;
};

namespace png {

enum class ColorType : std::uint8_t {
    gray = 0,
    rgb = 2,
    palette = 3,
    gray_alpha = 4,
    rgba = 6,
};

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

/// Decoded single-channel PNG. For paletted images `samples` holds palette
/// indices; `palette` carries the colour table.
struct Decoded {
    int width = 0;
    int height = 0;
    int bit_depth = 0;
    ColorType color_type = ColorType::gray;
    std::vector<std::uint16_t> samples;
    std::vector<Rgb> palette;
};

inline constexpr std::array<std::uint8_t, 8> kSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

inline bool has_signature(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= kSignature.size() &&
           std::memcmp(bytes.data(), kSignature.data(), kSignature.size()) == 0;
}

namespace detail {

inline std::uint32_t read_be32(const std::uint8_t* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
           std::uint32_t{p[3]};
}

inline void append_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void append_chunk(std::vector<std::uint8_t>& out, const char (&type)[5],
                         std::span<const std::uint8_t> data) {
    append_be32(out, static_cast<std::uint32_t>(data.size()));
    const auto type_begin = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const auto crc = ::crc32(0L, out.data() + type_begin, static_cast<uInt>(4 + data.size()));
    append_be32(out, static_cast<std::uint32_t>(crc));
}

inline std::vector<std::uint8_t> inflate_exact(std::span<const std::uint8_t> in, std::size_t expected) {
    std::vector<std::uint8_t> out(expected);
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) throw IoError("png: zlib initialisation failed");
    zs.next_in = const_cast<Bytef*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = ::inflate(&zs, Z_FINISH);
    const auto produced = zs.total_out;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || produced != expected) {
        throw FormatError("png: image data does not match declared dimensions");
    }
    return out;
}

inline std::uint8_t paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = p > a ? p - a : a - p;
    const int pb = p > b ? p - b : b - p;
    const int pc = p > c ? p - c : c - p;
    if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
    if (pb <= pc) return static_cast<std::uint8_t>(b);
    return static_cast<std::uint8_t>(c);
}

// Reverses the per-scanline filters in place; `raw` holds height rows of
// (1 + row_bytes) bytes, the result is height * row_bytes bytes.
inline std::vector<std::uint8_t> unfilter(const std::vector<std::uint8_t>& raw, std::size_t row_bytes,
                                          int height, int bpp) {
    std::vector<std::uint8_t> out(row_bytes * static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        const std::uint8_t* src = raw.data() + static_cast<std::size_t>(y) * (row_bytes + 1);
        const std::uint8_t filter = src[0];
        ++src;
        std::uint8_t* cur = out.data() + static_cast<std::size_t>(y) * row_bytes;
        const std::uint8_t* prev = y > 0 ? cur - row_bytes : nullptr;
        for (std::size_t i = 0; i < row_bytes; ++i) {
            const int a = i >= static_cast<std::size_t>(bpp) ? cur[i - bpp] : 0;
            const int b = prev ? prev[i] : 0;
            const int c = (prev && i >= static_cast<std::size_t>(bpp)) ? prev[i - bpp] : 0;
            int v = src[i];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw FormatError("png: invalid scanline filter " + std::to_string(filter));
            }
            cur[i] = static_cast<std::uint8_t>(v);
        }
    }
    return out;
}

}  // namespace detail

inline Decoded decode(std::span<const std::uint8_t> bytes) {
    using detail::read_be32;
    if (!has_signature(bytes)) throw FormatError("png: missing signature");

    Decoded img;
    bool have_header = false;
    bool have_end = false;
    int interlace = 0;
    std::vector<std::uint8_t> idat;

    std::size_t pos = kSignature.size();
    while (pos + 12 <= bytes.size() && !have_end) {
        const std::uint32_t len = read_be32(bytes.data() + pos);
        if (len > bytes.size() - pos - 12) throw FormatError("png: truncated chunk");
        const std::uint8_t* type = bytes.data() + pos + 4;
        const std::uint8_t* data = type + 4;
        const std::uint32_t crc = read_be32(data + len);
        if (static_cast<std::uint32_t>(::crc32(0L, type, len + 4)) != crc) {
            throw FormatError("png: chunk CRC mismatch");
        }
        const std::string name(reinterpret_cast<const char*>(type), 4);
        if (name == "IHDR") {
            if (len != 13) throw FormatError("png: malformed IHDR");
            img.width = static_cast<int>(read_be32(data));
            img.height = static_cast<int>(read_be32(data + 4));
            img.bit_depth = data[8];
            img.color_type = static_cast<ColorType>(data[9]);
            if (data[10] != 0 || data[11] != 0) throw FormatError("png: unknown compression or filter method");
            interlace = data[12];
            have_header = true;
        } else if (name == "PLTE") {
            if (len % 3 != 0 || len == 0) throw FormatError("png: malformed palette");
            for (std::uint32_t i = 0; i < len; i += 3) img.palette.push_back({data[i], data[i + 1], data[i + 2]});
        } else if (name == "IDAT") {
            idat.insert(idat.end(), data, data + len);
        } else if (name == "IEND") {
            have_end = true;
        } else if ((type[0] & 0x20) == 0) {
            throw FormatError("png: unsupported critical chunk " + name);
        }
        pos += 12 + len;
    }
    if (!have_header) throw FormatError("png: missing IHDR");
    if (!have_end) throw FormatError("png: truncated file (no IEND)");
    if (img.width <= 0 || img.height <= 0) throw FormatError("png: non-positive dimensions");

    switch (img.color_type) {
        case ColorType::gray:
            if (img.bit_depth != 8 && img.bit_depth != 16) {
                throw FormatError("png: unsupported grayscale bit depth " + std::to_string(img.bit_depth));
            }
            break;
        case ColorType::palette:
            if (img.bit_depth != 8) {
                throw FormatError("png: unsupported palette bit depth " + std::to_string(img.bit_depth));
            }
            if (img.palette.empty()) throw FormatError("png: paletted image without PLTE");
            break;
        default:
            throw FormatError("png: multi-channel images are not supported (colour type " +
                              std::to_string(static_cast<int>(img.color_type)) + ")");
    }
    if (interlace != 0) throw FormatError("png: interlaced images are not supported");

    const int bpp = img.bit_depth / 8;
    const std::size_t row_bytes = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(bpp);
    const auto raw = detail::inflate_exact(idat, (row_bytes + 1) * static_cast<std::size_t>(img.height));
    const auto plain = detail::unfilter(raw, row_bytes, img.height, bpp);

    const std::size_t n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
    img.samples.resize(n);
    if (bpp == 1) {
        for (std::size_t i = 0; i < n; ++i) img.samples[i] = plain[i];
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            img.samples[i] = static_cast<std::uint16_t>((plain[2 * i] << 8) | plain[2 * i + 1]);
        }
    }
    if (img.color_type == ColorType::palette) {
        for (auto s : img.samples) {
            if (s >= img.palette.size()) throw FormatError("png: palette index out of range");
        }
    }
    return img;
}

/// Encodes single-channel samples. Rows are written unfiltered so the
/// output depends only on the samples and the zlib build.
inline std::vector<std::uint8_t> encode(int width, int height, int bit_depth, ColorType color_type,
                                        std::span<const std::uint16_t> samples,
                                        std::span<const Rgb> palette = {}) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("png: non-positive dimensions");
    if (samples.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw std::invalid_argument("png: sample count does not match dimensions");
    }
    if (!((color_type == ColorType::gray && (bit_depth == 8 || bit_depth == 16)) ||
          (color_type == ColorType::palette && bit_depth == 8))) {
        throw std::invalid_argument("png: unsupported encoder format");
    }
    if (color_type == ColorType::palette && (palette.empty() || palette.size() > 256)) {
        throw std::invalid_argument("png: palette must have 1..256 entries");
    }

    const int bpp = bit_depth / 8;
    const std::size_t row_bytes = static_cast<std::size_t>(width) * static_cast<std::size_t>(bpp);
    std::vector<std::uint8_t> raw;
    raw.reserve((row_bytes + 1) * static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);
        for (int x = 0; x < width; ++x) {
            const auto s = samples[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                                   static_cast<std::size_t>(x)];
            if (bpp == 2) raw.push_back(static_cast<std::uint8_t>(s >> 8));
            raw.push_back(static_cast<std::uint8_t>(s & 0xff));
        }
    }

    uLongf packed_len = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> packed(packed_len);
    if (compress2(packed.data(), &packed_len, raw.data(), static_cast<uLong>(raw.size()), Z_BEST_COMPRESSION) !=
        Z_OK) {
        throw IoError("png: deflate failed");
    }
    packed.resize(packed_len);

    std::vector<std::uint8_t> out(kSignature.begin(), kSignature.end());
    std::vector<std::uint8_t> ihdr;
    detail::append_be32(ihdr, static_cast<std::uint32_t>(width));
    detail::append_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(static_cast<std::uint8_t>(bit_depth));
    ihdr.push_back(static_cast<std::uint8_t>(color_type));
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    detail::append_chunk(out, "IHDR", ihdr);
    if (color_type == ColorType::palette) {
        std::vector<std::uint8_t> plte;
        for (const auto& c : palette) {
            plte.push_back(c.r);
            plte.push_back(c.g);
            plte.push_back(c.b);
        }
        detail::append_chunk(out, "PLTE", plte);
    }
    detail::append_chunk(out, "IDAT", packed);
    detail::append_chunk(out, "IEND", {});
    return out;
}

}  // namespace png
}  // namespace asrg

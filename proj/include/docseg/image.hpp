#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>

#include "docseg/errors.hpp"

namespace docseg {

/// 8-bit raster page image, 1 (gray) or 3 (RGB) channels, row-major,
/// interleaved channels.
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> data;

    bool valid() const {
        return width >= 1 && height >= 1 && (channels == 1 || channels == 3) &&
               data.size() == static_cast<std::size_t>(width) * height * channels;
    }
};

/// Single-channel luminance image; the working channel for every feature.
struct LumaImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    std::uint8_t at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    bool valid() const {
        return width >= 1 && height >= 1 &&
               data.size() == static_cast<std::size_t>(width) * height;
    }
};

// ---------------------------------------------------------------------------
// PNM (PGM P5 / PPM P6, binary, maxval <= 255)
// ---------------------------------------------------------------------------

namespace detail {

inline int pnm_next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c = in.get();
    while (c != EOF) {
        if (c == '#') { // comment to end of line
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            if (!tok.empty()) return 0;
        } else {
            tok.push_back(static_cast<char>(c));
        }
        c = in.get();
    }
    return tok.empty() ? -1 : 0;
}

inline long pnm_int_token(std::istream& in, const char* what) {
    std::string tok;
    if (pnm_next_token(in, tok) != 0) throw FormatError(std::string("truncated PNM header: missing ") + what);
    for (char ch : tok)
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw FormatError(std::string("bad PNM header field: ") + what);
    return std::strtol(tok.c_str(), nullptr, 10);
}

inline RasterImage load_pnm(std::istream& in) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
        throw FormatError("not a binary PGM/PPM file");
    const int channels = magic[1] == '5' ? 1 : 3;
    const long w = pnm_int_token(in, "width");
    const long h = pnm_int_token(in, "height");
    const long maxval = pnm_int_token(in, "maxval");
    if (w < 1 || h < 1) throw FormatError("bad PNM dimensions");
    if (maxval < 1 || maxval > 255) throw FormatError("only 8-bit PNM supported (maxval <= 255)");
    // header terminates with exactly one whitespace byte, already consumed
    RasterImage img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.channels = channels;
    img.data.resize(static_cast<std::size_t>(w) * h * channels);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.data.size()))
        throw FormatError("truncated PNM pixel data");
    return img;
}

inline void save_pnm(const RasterImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open for writing: " + path.string());
    out << (img.channels == 1 ? "P5" : "P6") << "\n"
        << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    if (!out) throw IOError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// PNG, via the libpng simplified API (8-bit gray / RGB)
// ---------------------------------------------------------------------------

inline RasterImage load_png(const std::filesystem::path& path) {
    png_image pimg;
    std::memset(&pimg, 0, sizeof(pimg));
    pimg.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&pimg, path.string().c_str()))
        throw FormatError("not a readable PNG: " + path.string());
    if (pimg.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&pimg);
        throw FormatError("16-bit PNG not supported: " + path.string());
    }
    const bool color = (pimg.format & PNG_FORMAT_FLAG_COLOR) != 0;
    pimg.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    RasterImage img;
    img.width = static_cast<int>(pimg.width);
    img.height = static_cast<int>(pimg.height);
    img.channels = color ? 3 : 1;
    img.data.resize(PNG_IMAGE_SIZE(pimg));
    if (!png_image_finish_read(&pimg, nullptr, img.data.data(), 0, nullptr)) {
        png_image_free(&pimg);
        throw FormatError("PNG decode failed: " + path.string());
    }
    return img;
}

inline void save_png(const RasterImage& img, const std::filesystem::path& path) {
    png_image pimg;
    std::memset(&pimg, 0, sizeof(pimg));
    pimg.version = PNG_IMAGE_VERSION;
    pimg.width = static_cast<png_uint_32>(img.width);
    pimg.height = static_cast<png_uint_32>(img.height);
    pimg.format = img.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&pimg, path.string().c_str(), 0, img.data.data(), 0, nullptr))
        throw IOError("PNG write failed: " + path.string());
}

} // namespace detail

/// Loads a PGM (P5), PPM (P6) or 8-bit PNG page image.
inline RasterImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open: " + path.string());
    unsigned char magic[2] = {0, 0};
    in.read(reinterpret_cast<char*>(magic), 2);
    if (in.gcount() < 2) throw FormatError("file too short: " + path.string());
    in.seekg(0);
    if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6'))
        return detail::load_pnm(in);
    if (magic[0] == 0x89 && magic[1] == 'P') {
        in.close();
        return detail::load_png(path);
    }
    throw FormatError("unsupported image format: " + path.string());
}

/// Writes an image; format chosen by extension (.pgm / .ppm / .png).
inline void save_image(const RasterImage& img, const std::filesystem::path& path) {
    if (!img.valid()) throw GeometryError("invalid image");
    const std::string ext = path.extension().string();
    if (ext == ".pgm") {
        if (img.channels != 1) throw FormatError("PGM requires a 1-channel image");
        detail::save_pnm(img, path);
    } else if (ext == ".ppm") {
        if (img.channels != 3) throw FormatError("PPM requires a 3-channel image");
        detail::save_pnm(img, path);
    } else if (ext == ".png") {
        detail::save_png(img, path);
    } else {
        throw FormatError("unknown image extension: " + ext);
    }
}

/// ITU-R BT.601 luminance. Grayscale input is copied unchanged.
inline LumaImage to_luminance(const RasterImage& img) {
    if (!img.valid()) throw GeometryError("invalid image");
    LumaImage out;
    out.width = img.width;
    out.height = img.height;
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    out.data.resize(n);
    if (img.channels == 1) {
        out.data = img.data;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double r = img.data[3 * i + 0];
        const double g = img.data[3 * i + 1];
        const double b = img.data[3 * i + 2];
        const long y = std::lround(0.299 * r + 0.587 * g + 0.114 * b);
        out.data[i] = static_cast<std::uint8_t>(std::clamp(y, 0L, 255L));
    }
    return out;
}

/// Wraps a luminance image as a 1-channel RasterImage (copy).
inline RasterImage to_raster(const LumaImage& img) {
    RasterImage out;
    out.width = img.width;
    out.height = img.height;
    out.channels = 1;
    out.data = img.data;
    return out;
}

} // namespace docseg

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "docseg/errors.hpp"
#include "docseg/image.hpp"
#include "docseg/label_map.hpp"

namespace docseg {

/// Per-pixel text mask at source-image resolution (block padding cropped).
struct TextMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits; // 0 / 1

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
};

/// Axis-aligned pixel bounding box of one 4-connected group of text blocks.
struct TextRegion {
    int id = 0;
    int x = 0, y = 0, w = 0, h = 0;
    int block_count = 0;
};

inline bool is_text_label(BlockLabel l, bool include_graphics) {
    return l == BlockLabel::Text || (include_graphics && l == BlockLabel::Graphics);
}

/// Pixel mask of all Text (and optionally Graphics) blocks, cropped to the
/// source image dimensions.
inline TextMask text_mask(const LabelMap& map, bool include_graphics, int image_width,
                          int image_height) {
    if (!map.valid() || !map.covers(image_width, image_height))
        throw GeometryError("label map does not cover image");
    TextMask m;
    m.width = image_width;
    m.height = image_height;
    m.bits.assign(static_cast<std::size_t>(image_width) * image_height, 0);
    for (int y = 0; y < image_height; ++y) {
        const int r = y / map.block_size;
        for (int x = 0; x < image_width; ++x) {
            const int c = x / map.block_size;
            if (is_text_label(map.at(r, c), include_graphics))
                m.bits[static_cast<std::size_t>(y) * image_width + x] = 1;
        }
    }
    return m;
}

/// Maximal 4-connected components of text blocks, reported as pixel bounding
/// boxes clipped to the image, sorted top-to-bottom then left-to-right.
inline std::vector<TextRegion> extract_regions(const LabelMap& map, bool include_graphics,
                                               int image_width, int image_height) {
    if (!map.valid() || !map.covers(image_width, image_height))
        throw GeometryError("label map does not cover image");
    const int B = map.block_size;
    std::vector<int> comp(static_cast<std::size_t>(map.rows) * map.cols, -1);
    std::vector<TextRegion> regions;

    for (int r0 = 0; r0 < map.rows; ++r0)
        for (int c0 = 0; c0 < map.cols; ++c0) {
            const std::size_t i0 = static_cast<std::size_t>(r0) * map.cols + c0;
            if (comp[i0] >= 0 || !is_text_label(map.at(r0, c0), include_graphics)) continue;

            const int cid = static_cast<int>(regions.size());
            int rmin = r0, rmax = r0, cmin = c0, cmax = c0, count = 0;
            std::deque<std::pair<int, int>> queue{{r0, c0}};
            comp[i0] = cid;
            while (!queue.empty()) {
                const auto [r, c] = queue.front();
                queue.pop_front();
                ++count;
                rmin = std::min(rmin, r);
                rmax = std::max(rmax, r);
                cmin = std::min(cmin, c);
                cmax = std::max(cmax, c);
                static constexpr int dr[4] = {-1, 1, 0, 0};
                static constexpr int dc[4] = {0, 0, -1, 1};
                for (int d = 0; d < 4; ++d) {
                    const int nr = r + dr[d], nc = c + dc[d];
                    if (nr < 0 || nr >= map.rows || nc < 0 || nc >= map.cols) continue;
                    const std::size_t ni = static_cast<std::size_t>(nr) * map.cols + nc;
                    if (comp[ni] >= 0 || !is_text_label(map.at(nr, nc), include_graphics)) continue;
                    comp[ni] = cid;
                    queue.emplace_back(nr, nc);
                }
            }
            TextRegion reg;
            reg.x = cmin * B;
            reg.y = rmin * B;
            reg.w = std::min((cmax + 1) * B, image_width) - reg.x;
            reg.h = std::min((rmax + 1) * B, image_height) - reg.y;
            reg.block_count = count;
            regions.push_back(reg);
        }

    std::sort(regions.begin(), regions.end(), [](const TextRegion& a, const TextRegion& b) {
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    for (std::size_t i = 0; i < regions.size(); ++i) regions[i].id = static_cast<int>(i);
    return regions;
}

inline nlohmann::json regions_to_json(const std::vector<TextRegion>& regions) {
    nlohmann::json j;
    auto& arr = j["regions"] = nlohmann::json::array();
    for (const auto& r : regions)
        arr.push_back({{"id", r.id},
                       {"x", r.x},
                       {"y", r.y},
                       {"w", r.w},
                       {"h", r.h},
                       {"blocks", r.block_count}});
    return j;
}

/// Crops a region from an image.
inline RasterImage crop(const RasterImage& img, int x, int y, int w, int h) {
    if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > img.width || y + h > img.height)
        throw GeometryError("crop outside image bounds");
    RasterImage out;
    out.width = w;
    out.height = h;
    out.channels = img.channels;
    out.data.resize(static_cast<std::size_t>(w) * h * img.channels);
    for (int row = 0; row < h; ++row) {
        const auto* src = img.data.data() +
                          (static_cast<std::size_t>(y + row) * img.width + x) * img.channels;
        std::copy(src, src + static_cast<std::size_t>(w) * img.channels,
                  out.data.data() + static_cast<std::size_t>(row) * w * img.channels);
    }
    return out;
}

/// Writes one image per region (region_<id>.<ext>) plus a regions.json
/// manifest into out_dir. Returns the written file paths, manifest last.
inline std::vector<std::filesystem::path> export_regions(const RasterImage& img,
                                                         const std::vector<TextRegion>& regions,
                                                         const std::filesystem::path& out_dir,
                                                         const std::string& ext = ".pgm") {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!std::filesystem::is_directory(out_dir))
        throw IOError("cannot create output directory: " + out_dir.string());

    std::vector<std::filesystem::path> written;
    for (const auto& r : regions) {
        const RasterImage piece = crop(img, r.x, r.y, r.w, r.h);
        const auto path = out_dir / ("region_" + std::to_string(r.id) + ext);
        save_image(piece, path);
        written.push_back(path);
    }
    const auto manifest = out_dir / "regions.json";
    const auto tmp = out_dir / "regions.json.tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw IOError("cannot write manifest: " + manifest.string());
        out << regions_to_json(regions).dump(2) << "\n";
    }
    std::filesystem::rename(tmp, manifest);
    written.push_back(manifest);
    return written;
}

inline std::vector<std::filesystem::path> export_regions(const LumaImage& img,
                                                         const std::vector<TextRegion>& regions,
                                                         const std::filesystem::path& out_dir,
                                                         const std::string& ext = ".pgm") {
    return export_regions(to_raster(img), regions, out_dir, ext);
}

} // namespace docseg

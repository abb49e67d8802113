#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "docseg/errors.hpp"
#include "docseg/image.hpp"

namespace docseg {

/// Tiling of a LumaImage into fixed-size square blocks, raster order.
/// Edge blocks are padded by replicating the last row/column; pad_right and
/// pad_bottom record how much padding was applied.
struct BlockGrid {
    int block_size = 0;
    int cols = 0;
    int rows = 0;
    int pad_right = 0;
    int pad_bottom = 0;
    std::vector<std::uint8_t> tiles; // rows*cols tiles, each block_size^2 bytes

    int block_count() const { return rows * cols; }
    int image_width() const { return cols * block_size - pad_right; }
    int image_height() const { return rows * block_size - pad_bottom; }

    std::span<const std::uint8_t> tile(int s) const {
        const std::size_t n = static_cast<std::size_t>(block_size) * block_size;
        return {tiles.data() + static_cast<std::size_t>(s) * n, n};
    }
    std::span<const std::uint8_t> tile(int r, int c) const { return tile(r * cols + c); }
};

/// Splits img into block_size x block_size tiles, replicating the last
/// row/column into edge padding so the grid covers the image exactly.
inline BlockGrid tile_blocks(const LumaImage& img, int block_size) {
    if (block_size == 0) throw ConfigError("block size must be >= 1");
    if (block_size < 0) throw ConfigError("block size must be >= 1");
    if (!img.valid()) throw GeometryError("invalid luminance image");

    BlockGrid g;
    g.block_size = block_size;
    g.cols = (img.width + block_size - 1) / block_size;
    g.rows = (img.height + block_size - 1) / block_size;
    g.pad_right = g.cols * block_size - img.width;
    g.pad_bottom = g.rows * block_size - img.height;
    g.tiles.resize(static_cast<std::size_t>(g.rows) * g.cols * block_size * block_size);

    const std::size_t tile_px = static_cast<std::size_t>(block_size) * block_size;
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            std::uint8_t* dst = g.tiles.data() + (static_cast<std::size_t>(r) * g.cols + c) * tile_px;
            for (int y = 0; y < block_size; ++y) {
                const int sy = std::min(r * block_size + y, img.height - 1);
                for (int x = 0; x < block_size; ++x) {
                    const int sx = std::min(c * block_size + x, img.width - 1);
                    dst[y * block_size + x] = img.at(sx, sy);
                }
            }
        }
    }
    return g;
}

/// Inverse of tile_blocks: reassembles the original image, dropping padding.
inline LumaImage reassemble(const BlockGrid& g) {
    LumaImage img;
    img.width = g.image_width();
    img.height = g.image_height();
    img.data.resize(static_cast<std::size_t>(img.width) * img.height);
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            auto t = g.tile(r, c);
            for (int y = 0; y < g.block_size; ++y) {
                const int py = r * g.block_size + y;
                if (py >= img.height) break;
                for (int x = 0; x < g.block_size; ++x) {
                    const int px = c * g.block_size + x;
                    if (px >= img.width) break;
                    img.data[static_cast<std::size_t>(py) * img.width + px] =
                        t[y * g.block_size + x];
                }
            }
        }
    }
    return img;
}

} // namespace docseg

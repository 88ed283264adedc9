// tensor.hpp — binary spike maps, multibit images, bit planes and tiling.
//
// Layout is row-major (t, c, row, col) throughout so that consecutive
// addresses walk the columns of a row. All types are plain value types;
// operations are pure functions.
#pragma once

#include <cstdint>
#include <vector>

#include "snn/errors.hpp"

namespace snn {

// Binary activation map over (time step, channel, row, col). Elements are
// strictly 0 or 1; T >= 1 and all dims positive.
struct SpikeTensor {
    int t = 0, c = 0, h = 0, w = 0;
    std::vector<uint8_t> data; // 0/1 values, row-major (t, c, h, w)

    SpikeTensor() = default;
    SpikeTensor(int t_, int c_, int h_, int w_)
        : t(t_), c(c_), h(h_), w(w_) {
        if (t <= 0 || c <= 0 || h <= 0 || w <= 0)
            throw ParamError("SpikeTensor dims must be positive");
        data.assign(static_cast<size_t>(t) * c * h * w, 0);
    }

    size_t idx(int ti, int ci, int y, int x) const {
        return ((static_cast<size_t>(ti) * c + ci) * h + y) * w + x;
    }
    uint8_t at(int ti, int ci, int y, int x) const { return data[idx(ti, ci, y, x)]; }
    void set(int ti, int ci, int y, int x, uint8_t v) { data[idx(ti, ci, y, x)] = v ? 1 : 0; }

    size_t size() const { return data.size(); }
};

// 8-bit image over (channel, row, col).
struct MultibitTensor {
    int c = 0, h = 0, w = 0;
    std::vector<uint8_t> data; // row-major (c, h, w)

    MultibitTensor() = default;
    MultibitTensor(int c_, int h_, int w_) : c(c_), h(h_), w(w_) {
        if (c <= 0 || h <= 0 || w <= 0)
            throw ParamError("MultibitTensor dims must be positive");
        data.assign(static_cast<size_t>(c) * h * w, 0);
    }

    size_t idx(int ci, int y, int x) const {
        return (static_cast<size_t>(ci) * h + y) * w + x;
    }
    uint8_t at(int ci, int y, int x) const { return data[idx(ci, y, x)]; }
    void set(int ci, int y, int x, uint8_t v) { data[idx(ci, y, x)] = v; }
};

// Small 2-D binary buffer: one channel of one tile, an enable map, ...
struct Grid {
    int h = 0, w = 0;
    std::vector<uint8_t> v;

    Grid() = default;
    Grid(int h_, int w_) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, 0) {}

    uint8_t at(int y, int x) const { return v[static_cast<size_t>(y) * w + x]; }
    void set(int y, int x, uint8_t b) { v[static_cast<size_t>(y) * w + x] = b ? 1 : 0; }
};

// One tile of the non-overlapping partition of a parent map.
// Full tiles are tile_w x tile_h (32 x 18 by default); edge tiles may be
// smaller when the parent dims are not multiples.
struct TileRect {
    int row0 = 0, col0 = 0; // origin in the parent map
    int h = 0, w = 0;

    bool operator==(const TileRect &) const = default;
};

inline constexpr int kTileH = 18;
inline constexpr int kTileW = 32;

// Splits an 8-bit image into 8 binary planes, least-significant bit first.
// Plane b holds bit b of every pixel; sum(2^b * plane_b) reconstructs the
// image exactly.
std::vector<SpikeTensor> bit_plane_split(const MultibitTensor &img);

// Partitions an (h x w) map into non-overlapping tiles, row-major over the
// tile grid. Every cell belongs to exactly one tile.
std::vector<TileRect> tile_partition(int map_h, int map_w,
                                     int tile_h = kTileH, int tile_w = kTileW);
std::vector<TileRect> tile_partition(const SpikeTensor &map,
                                     int tile_h = kTileH, int tile_w = kTileW);

// Pads a tile by `pad` cells on every side, copying the nearest edge value.
Grid replicate_pad(const Grid &tile, int pad);

// Copies one (t, c) channel of a tile out of the parent map.
Grid extract_tile(const SpikeTensor &map, int t, int c, const TileRect &r);
Grid extract_tile_plane(const MultibitTensor &img, int c, int bit, const TileRect &r);

} // namespace snn

#include "snn/tensor.hpp"

#include <algorithm>

namespace snn {

std::vector<SpikeTensor> bit_plane_split(const MultibitTensor &img) {
    std::vector<SpikeTensor> planes;
    planes.reserve(8);
    for (int b = 0; b < 8; ++b) {
        SpikeTensor plane(1, img.c, img.h, img.w);
        for (size_t i = 0; i < img.data.size(); ++i)
            plane.data[i] = (img.data[i] >> b) & 1;
        planes.push_back(std::move(plane));
    }
    return planes;
}

std::vector<TileRect> tile_partition(int map_h, int map_w, int tile_h, int tile_w) {
    if (map_h <= 0 || map_w <= 0)
        throw ParamError("tile_partition: map dims must be positive");
    if (tile_h <= 0 || tile_w <= 0)
        throw ParamError("tile_partition: tile dims must be positive");
    std::vector<TileRect> tiles;
    for (int r0 = 0; r0 < map_h; r0 += tile_h) {
        for (int c0 = 0; c0 < map_w; c0 += tile_w) {
            TileRect t;
            t.row0 = r0;
            t.col0 = c0;
            t.h = std::min(tile_h, map_h - r0);
            t.w = std::min(tile_w, map_w - c0);
            tiles.push_back(t);
        }
    }
    return tiles;
}

std::vector<TileRect> tile_partition(const SpikeTensor &map, int tile_h, int tile_w) {
    return tile_partition(map.h, map.w, tile_h, tile_w);
}

Grid replicate_pad(const Grid &tile, int pad) {
    if (pad < 0) throw ParamError("replicate_pad: pad must be >= 0");
    if (pad == 0) return tile;
    Grid out(tile.h + 2 * pad, tile.w + 2 * pad);
    for (int y = 0; y < out.h; ++y) {
        int sy = std::min(std::max(y - pad, 0), tile.h - 1);
        for (int x = 0; x < out.w; ++x) {
            int sx = std::min(std::max(x - pad, 0), tile.w - 1);
            out.set(y, x, tile.at(sy, sx));
        }
    }
    return out;
}

Grid extract_tile(const SpikeTensor &map, int t, int c, const TileRect &r) {
    Grid g(r.h, r.w);
    for (int y = 0; y < r.h; ++y)
        for (int x = 0; x < r.w; ++x)
            g.set(y, x, map.at(t, c, r.row0 + y, r.col0 + x));
    return g;
}

Grid extract_tile_plane(const MultibitTensor &img, int c, int bit, const TileRect &r) {
    Grid g(r.h, r.w);
    for (int y = 0; y < r.h; ++y)
        for (int x = 0; x < r.w; ++x)
            g.set(y, x, (img.at(c, r.row0 + y, r.col0 + x) >> bit) & 1);
    return g;
}

} // namespace snn

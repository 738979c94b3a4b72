#pragma once

#include "slicesort/volume.hpp"

namespace slicesort {

/// Half-open axis-aligned voxel box.
struct CropBox {
    std::array<std::int64_t, 3> lo{0, 0, 0};
    std::array<std::int64_t, 3> hi{0, 0, 0};

    [[nodiscard]] std::int64_t volume() const {
        return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
    }
    [[nodiscard]] bool contains(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return i >= lo[0] && i < hi[0] && j >= lo[1] && j < hi[1] && k >= lo[2] && k < hi[2];
    }
};

/// Keeps only the largest 6-connected component of the nonzero voxels; ties
/// go to the component with the smallest minimum linear index. Throws
/// data_error on an all-zero input.
Volume largest_component(const Volume& binary);

/// Rasterized convex hull of the nonzero voxel centers: a voxel belongs to
/// the output iff its center lies in the hull (boundary included). Exact for
/// integer voxel coordinates. Throws data_error on an empty input.
Volume convex_hull_mask(const Volume& mask);

/// Tight axis-aligned bounds of the nonzero voxels.
CropBox tight_crop(const Volume& mask);

} // namespace slicesort

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "slicesort/errors.hpp"

namespace slicesort {

/// Dense 3D intensity grid. Values are stored as float32 in C order (last
/// axis fastest); after windowing to (0,255) they are integer-valued.
/// `ordering_axis` names the axis along which slice content determines slice
/// order, and `axis_direction` (+1/-1) asserts the co-direction convention
/// shared by all volumes of a dataset.
struct Volume {
    std::vector<float> data;
    std::array<std::int64_t, 3> dims{0, 0, 0};
    int ordering_axis = 0;
    int axis_direction = +1;
    std::string volume_id;
    std::string bit_depth = "float32";

    [[nodiscard]] std::int64_t size() const { return dims[0] * dims[1] * dims[2]; }
    [[nodiscard]] std::int64_t num_slices() const { return dims[ordering_axis]; }

    [[nodiscard]] std::int64_t index(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return (i * dims[1] + j) * dims[2] + k;
    }
    [[nodiscard]] float& at(std::int64_t i, std::int64_t j, std::int64_t k) {
        return data[index(i, j, k)];
    }
    [[nodiscard]] float at(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return data[index(i, j, k)];
    }

    void validate() const {
        if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
            throw data_error("volume '" + volume_id + "' has an empty axis");
        if (static_cast<std::int64_t>(data.size()) != size())
            throw data_error("volume '" + volume_id + "' data size does not match dims");
        if (ordering_axis < 0 || ordering_axis > 2)
            throw data_error("volume '" + volume_id + "' ordering_axis out of range");
        if (axis_direction != 1 && axis_direction != -1)
            throw data_error("volume '" + volume_id + "' axis_direction must be +1 or -1");
    }
};

} // namespace slicesort

#include "slicesort/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace slicesort {

void SamplingSpec::validate() const {
    if (k < 2) throw config_error("sampling spec requires k >= 2");
    if (distribution == SamplingDistribution::custom) {
        if (weights.empty()) throw config_error("custom sampling requires weights");
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0 || !std::isfinite(w))
                throw config_error("sampling weights must be finite and non-negative");
            total += w;
        }
        if (total <= 0.0) throw config_error("sampling weights must not all be zero");
    }
    if (crop && (crop->first < 1 || crop->second < 1))
        throw config_error("crop size must be positive");
}

std::vector<int> ranks_from_positions(const std::vector<std::int64_t>& positions, int direction) {
    if (direction != 1 && direction != -1)
        throw config_error("direction must be +1 or -1");
    std::set<std::int64_t> unique(positions.begin(), positions.end());
    if (unique.size() != positions.size())
        throw config_error("positions must be distinct");

    const int n = static_cast<int>(positions.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return positions[static_cast<std::size_t>(a)] < positions[static_cast<std::size_t>(b)];
    });
    std::vector<int> ranks(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos) {
        const int idx = order[static_cast<std::size_t>(pos)];
        ranks[static_cast<std::size_t>(idx)] = direction == 1 ? pos : n - 1 - pos;
    }
    return ranks;
}

cv::Mat extract_slice(const Volume& v, std::int64_t pos) {
    const int axis = v.ordering_axis;
    if (pos < 0 || pos >= v.dims[axis])
        throw data_error("slice position out of range for volume '" + v.volume_id + "'");
    // Remaining axes in ascending order give (rows, cols).
    int rows_axis = axis == 0 ? 1 : 0;
    int cols_axis = axis == 2 ? 1 : 2;
    const auto rows = static_cast<int>(v.dims[rows_axis]);
    const auto cols = static_cast<int>(v.dims[cols_axis]);
    cv::Mat out(rows, cols, CV_8UC1);
    for (int r = 0; r < rows; ++r) {
        auto* dst = out.ptr<std::uint8_t>(r);
        for (int c = 0; c < cols; ++c) {
            std::int64_t idx[3];
            idx[axis] = pos;
            idx[rows_axis] = r;
            idx[cols_axis] = c;
            dst[c] = cv::saturate_cast<std::uint8_t>(v.at(idx[0], idx[1], idx[2]));
        }
    }
    return out;
}

SliceBatch sample_batch(const Volume& v, const SamplingSpec& spec, std::mt19937_64& rng) {
    spec.validate();
    v.validate();
    const std::int64_t n = v.num_slices();
    if (n < spec.k)
        throw data_error("volume '" + v.volume_id + "' has " + std::to_string(n) +
                         " slices, fewer than k=" + std::to_string(spec.k));

    std::vector<double> weights;
    if (spec.distribution == SamplingDistribution::custom) {
        if (static_cast<std::int64_t>(spec.weights.size()) != n)
            throw config_error("custom weights length must equal the slice count");
        weights = spec.weights;
        const std::int64_t positive =
            std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; });
        if (positive < spec.k)
            throw data_error("volume '" + v.volume_id + "' has fewer than k slices with positive weight");
    } else {
        weights.assign(static_cast<std::size_t>(n), 1.0);
    }

    // Sequential draws without replacement: chosen indices get weight zero.
    SliceBatch batch;
    batch.volume_id = v.volume_id;
    for (int i = 0; i < spec.k; ++i) {
        std::discrete_distribution<std::int64_t> dist(weights.begin(), weights.end());
        const std::int64_t pos = dist(rng);
        weights[static_cast<std::size_t>(pos)] = 0.0;
        batch.positions.push_back(pos);
    }
    batch.ranks = ranks_from_positions(batch.positions, v.axis_direction);

    std::optional<std::pair<int, int>> crop_origin;
    for (std::int64_t pos : batch.positions) {
        cv::Mat slice = extract_slice(v, pos);
        if (spec.crop) {
            const int ch = spec.crop->first, cw = spec.crop->second;
            if (ch > slice.rows || cw > slice.cols)
                throw config_error("crop size exceeds slice size");
            if (!crop_origin) {
                // One shared crop location per batch.
                std::uniform_int_distribution<int> dr(0, slice.rows - ch);
                std::uniform_int_distribution<int> dc(0, slice.cols - cw);
                const int r0 = dr(rng);
                const int c0 = dc(rng);
                crop_origin = {r0, c0};
            }
            slice = slice(cv::Rect(crop_origin->second, crop_origin->first, cw, ch)).clone();
        }
        batch.slices.push_back(slice);
    }
    return batch;
}

} // namespace slicesort

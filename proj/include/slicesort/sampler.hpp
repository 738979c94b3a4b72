#pragma once

#include <optional>
#include <random>
#include <vector>

#include <opencv2/core.hpp>

#include "slicesort/volume.hpp"

namespace slicesort {

/// k slices drawn without replacement from one volume, with their true
/// positions along the ordering axis and the ranks induced by those
/// positions in the co-directed orientation. Slices are 8-bit grayscale;
/// volumes are expected to be preprocessed (values integral in [0,255]).
struct SliceBatch {
    std::vector<cv::Mat> slices; // CV_8UC1
    std::vector<std::int64_t> positions;
    std::vector<int> ranks;
    std::string volume_id;

    [[nodiscard]] int batch_size() const { return static_cast<int>(slices.size()); }
};

enum class SamplingDistribution { uniform, custom };

struct SamplingSpec {
    int k = 16;
    SamplingDistribution distribution = SamplingDistribution::uniform;
    std::vector<double> weights;                        // per slice index, custom only
    std::optional<std::pair<int, int>> crop;            // (height, width)

    void validate() const;
};

/// Rank of each position after ascending sort; reversed when direction = -1.
std::vector<int> ranks_from_positions(const std::vector<std::int64_t>& positions, int direction);

/// Extracts the 2D slice at `pos` perpendicular to the ordering axis, as
/// CV_8UC1 (values rounded and saturated to [0,255]).
cv::Mat extract_slice(const Volume& v, std::int64_t pos);

SliceBatch sample_batch(const Volume& v, const SamplingSpec& spec, std::mt19937_64& rng);

} // namespace slicesort

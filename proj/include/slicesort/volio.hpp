#pragma once

#include <filesystem>
#include <optional>

#include "slicesort/volume.hpp"

namespace slicesort {

enum class WindowKind { hounsfield_window, percentile_window };

/// Windowing recipe: clip to [low, high] (Hounsfield units or per-volume
/// percentiles), rescale linearly to (0,255) and round half-to-even. An
/// optional block-mean downsample runs before the window.
struct PreprocessSpec {
    WindowKind kind = WindowKind::hounsfield_window;
    double low = -900.0;
    double high = 500.0;
    int downsample_factor = 1;

    void validate() const;
};

/// Ordering-axis metadata applied when the container itself carries none
/// (image-stack directories). Raw sidecars override these fields.
struct VolumeMeta {
    int ordering_axis = 0;
    int axis_direction = +1;
    std::string volume_id;
};

/// Loads either a directory of equally sized grayscale PNG/TIFF slices
/// (lexicographic order) or a raw little-endian array with a `.rawh` text
/// sidecar. No value transformation is applied.
Volume load_volume(const std::filesystem::path& path, const VolumeMeta& meta = {});

/// Writes `base.raw` (little-endian, C order) plus the `base.rawh` sidecar.
/// dtype is one of uint8, int16, uint16, float32; uint8 requires the data to
/// already be integral in [0,255].
void save_volume_raw(const Volume& v, const std::filesystem::path& base,
                     const std::string& dtype = "float32");

Volume preprocess_hounsfield(const Volume& v, const PreprocessSpec& spec);
Volume preprocess_percentile(const Volume& v, const PreprocessSpec& spec);

/// Block-mean downsample: each output voxel is the mean of a factor^3 input
/// block; trailing voxels that do not fill a block are dropped.
Volume downsample(const Volume& v, int factor);

/// Full pipeline helper: optional downsample then the spec's window.
Volume preprocess(const Volume& v, const PreprocessSpec& spec);

/// Percentile with linear interpolation between order statistics, computed
/// over the whole volume. p in [0,100].
double volume_percentile(const Volume& v, double p);

} // namespace slicesort

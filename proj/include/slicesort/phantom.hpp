#pragma once

#include <random>
#include <utility>
#include <vector>

#include "slicesort/volume.hpp"

namespace slicesort {

/// One internal structure of the synthetic sample: an axis-band along z with
/// an in-plane footprint fixed in the body frame.
struct OrganSpec {
    int class_id = 1;
    double z0 = 0.0, z1 = 1.0;   // relative interval along the ordering axis
    double u = 0.0, v = 0.0;     // in-plane center, body frame, [-1,1] units
    double ru = 0.14, rv = 0.14; // in-plane semi-axes
    std::string shape = "ellipsoid"; // ellipsoid | box
    double intensity = 180.0;
};

/// Procedural volume whose slice content encodes z: the body cross-section
/// aspect ratio ramps monotonically, a marker structure migrates radially,
/// the interior intensity ramps, and organs occupy fixed z bands. Random
/// per-volume rotation about the ordering axis, global scale, and small tilt
/// exercise the allowed sample variations without breaking orderability.
struct PhantomSpec {
    std::array<std::int64_t, 3> shape{64, 64, 64}; // (n_z, h, w)
    std::vector<OrganSpec> organs;                 // empty -> default 3-organ layout
    std::pair<double, double> scale_range{0.85, 1.15};
    double tilt_max_deg = 3.0;
    double noise_std = 2.0;
    bool rotate = true;

    void validate() const;
    static std::vector<OrganSpec> default_organs();
};

/// Returns (intensity volume, label volume). Intensities are integral in
/// [0,255]; labels are {0..C} with 0 = background/body.
std::pair<Volume, Volume> generate_phantom(const PhantomSpec& spec, std::mt19937_64& rng,
                                           const std::string& volume_id = "phantom");

/// Convenience: `count` volumes with ids phantom_000.. derived from one seed.
std::vector<std::pair<Volume, Volume>> generate_phantom_dataset(const PhantomSpec& spec, int count,
                                                                std::uint64_t seed);

} // namespace slicesort

#include "slicesort/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "slicesort/rng.hpp"

namespace slicesort {

std::vector<OrganSpec> PhantomSpec::default_organs() {
    return {
        {1, 0.12, 0.32, 0.20, 0.08, 0.16, 0.10, "ellipsoid", 150.0},
        {2, 0.40, 0.60, -0.16, 0.14, 0.13, 0.13, "box", 185.0},
        {3, 0.68, 0.88, 0.02, -0.20, 0.10, 0.17, "ellipsoid", 215.0},
    };
}

void PhantomSpec::validate() const {
    if (shape[0] < 2 || shape[1] < 4 || shape[2] < 4)
        throw config_error("phantom shape too small");
    if (scale_range.first <= 0.0 || scale_range.second < scale_range.first)
        throw config_error("phantom scale range must be positive and ordered");
    if (noise_std < 0.0) throw config_error("phantom noise std must be >= 0");
    auto organs_eff = organs.empty() ? default_organs() : organs;
    std::sort(organs_eff.begin(), organs_eff.end(),
              [](const OrganSpec& a, const OrganSpec& b) { return a.z0 < b.z0; });
    constexpr double overlap_tol = 0.02;
    for (std::size_t i = 0; i < organs_eff.size(); ++i) {
        const auto& o = organs_eff[i];
        if (o.z0 < 0.0 || o.z1 > 1.0 || o.z0 >= o.z1)
            throw config_error("organ z-interval must satisfy 0 <= z0 < z1 <= 1");
        if (o.class_id < 1) throw config_error("organ class ids start at 1");
        if (i > 0 && organs_eff[i - 1].z1 - o.z0 > overlap_tol)
            throw config_error("organ z-intervals overlap beyond tolerance");
    }
}

namespace {

struct BodyFrame {
    double cos_t, sin_t; // inverse rotation
    double inv_scale;
    double tilt_u, tilt_v; // center drift per unit z01, in u/v units
};

// Body cross-section semi-axes: the aspect ratio a/b ramps monotonically in
// z, a scale-invariant ordering cue.
inline double body_a(double z01) { return 0.34 + 0.40 * z01; }
inline double body_b(double z01) { return 0.74 - 0.30 * z01; }
inline double body_intensity(double z01) { return 90.0 + 70.0 * z01; }

constexpr double kMarkerAngle = 0.8;
constexpr double kMarkerRadius = 0.06;
constexpr double kMarkerIntensity = 235.0;

struct Sample {
    double intensity;
    int label;
};

Sample evaluate(double u, double v, double z01, const BodyFrame& f,
                const std::vector<OrganSpec>& organs) {
    const double du = u - f.tilt_u * (z01 - 0.5);
    const double dv = v - f.tilt_v * (z01 - 0.5);
    const double ub = (f.cos_t * du + f.sin_t * dv) * f.inv_scale;
    const double vb = (-f.sin_t * du + f.cos_t * dv) * f.inv_scale;

    const double a = body_a(z01), b = body_b(z01);
    const double re = (ub / a) * (ub / a) + (vb / b) * (vb / b);
    Sample s{0.0, 0};
    if (re > 1.0) return s;
    s.intensity = body_intensity(z01);

    // Marker satellite at a z-dependent fraction of the boundary radius.
    const double frac = 0.30 + 0.55 * z01;
    const double mu = frac * a * std::cos(kMarkerAngle);
    const double mv = frac * b * std::sin(kMarkerAngle);
    const double md = (ub - mu) * (ub - mu) + (vb - mv) * (vb - mv);
    if (md <= kMarkerRadius * kMarkerRadius) s.intensity = kMarkerIntensity;

    for (const auto& o : organs) {
        const double zc = 0.5 * (o.z0 + o.z1);
        const double hz = 0.5 * (o.z1 - o.z0);
        const double dz = (z01 - zc) / hz;
        if (dz < -1.0 || dz > 1.0) continue;
        bool inside = false;
        if (o.shape == "box") {
            inside = std::abs(ub - o.u) <= o.ru && std::abs(vb - o.v) <= o.rv && std::abs(dz) <= 1.0;
        } else {
            const double q = dz * dz + ((ub - o.u) / o.ru) * ((ub - o.u) / o.ru) +
                             ((vb - o.v) / o.rv) * ((vb - o.v) / o.rv);
            inside = q <= 1.0;
        }
        if (inside) {
            s.intensity = o.intensity;
            s.label = o.class_id;
        }
    }
    return s;
}

} // namespace

std::pair<Volume, Volume> generate_phantom(const PhantomSpec& spec, std::mt19937_64& rng,
                                           const std::string& volume_id) {
    spec.validate();
    const auto organs = spec.organs.empty() ? PhantomSpec::default_organs() : spec.organs;
    const auto [nz, ny, nx] = std::tuple(spec.shape[0], spec.shape[1], spec.shape[2]);

    std::uniform_real_distribution<double> angle_d(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> scale_d(spec.scale_range.first, spec.scale_range.second);
    const double tilt_lim = std::tan(spec.tilt_max_deg * M_PI / 180.0);
    std::uniform_real_distribution<double> tilt_d(-tilt_lim, tilt_lim);

    // Draw order is part of the reproducibility contract: angle, scale, tilts.
    const double theta = spec.rotate ? angle_d(rng) : 0.0;
    const double scale = scale_d(rng);
    BodyFrame f;
    f.cos_t = std::cos(theta);
    f.sin_t = std::sin(theta);
    f.inv_scale = 1.0 / scale;
    const double z_extent = static_cast<double>(nz);
    f.tilt_u = tilt_d(rng) * z_extent * 2.0 / static_cast<double>(nx);
    f.tilt_v = tilt_d(rng) * z_extent * 2.0 / static_cast<double>(ny);

    Volume vol, labels;
    vol.dims = labels.dims = spec.shape;
    vol.ordering_axis = labels.ordering_axis = 0;
    vol.axis_direction = labels.axis_direction = +1;
    vol.volume_id = volume_id;
    labels.volume_id = volume_id + "_labels";
    vol.bit_depth = labels.bit_depth = "uint8";
    vol.data.resize(static_cast<std::size_t>(vol.size()));
    labels.data.resize(static_cast<std::size_t>(labels.size()));

    const bool add_noise = spec.noise_std > 0.0;
    std::normal_distribution<double> noise(0.0, add_noise ? spec.noise_std : 1.0);
    // 2x2 in-plane supersampling for sub-voxel edge placement.
    constexpr double off[2] = {-0.25, 0.25};

    for (std::int64_t z = 0; z < nz; ++z) {
        const double z01 = (static_cast<double>(z) + 0.5) / static_cast<double>(nz);
        for (std::int64_t y = 0; y < ny; ++y) {
            for (std::int64_t x = 0; x < nx; ++x) {
                double acc = 0.0;
                for (double oy : off)
                    for (double ox : off) {
                        const double u =
                            (static_cast<double>(x) + 0.5 + ox - static_cast<double>(nx) / 2.0) /
                            (static_cast<double>(nx) / 2.0);
                        const double v =
                            (static_cast<double>(y) + 0.5 + oy - static_cast<double>(ny) / 2.0) /
                            (static_cast<double>(ny) / 2.0);
                        acc += evaluate(u, v, z01, f, organs).intensity;
                    }
                double value = acc / 4.0;
                const double uc = (static_cast<double>(x) + 0.5 - static_cast<double>(nx) / 2.0) /
                                  (static_cast<double>(nx) / 2.0);
                const double vc = (static_cast<double>(y) + 0.5 - static_cast<double>(ny) / 2.0) /
                                  (static_cast<double>(ny) / 2.0);
                const Sample center = evaluate(uc, vc, z01, f, organs);
                if (add_noise) value += noise(rng);
                value = std::clamp(value, 0.0, 255.0);
                vol.at(z, y, x) = static_cast<float>(std::nearbyint(value));
                labels.at(z, y, x) = static_cast<float>(center.label);
            }
        }
    }
    return {std::move(vol), std::move(labels)};
}

std::vector<std::pair<Volume, Volume>> generate_phantom_dataset(const PhantomSpec& spec, int count,
                                                                std::uint64_t seed) {
    std::vector<std::pair<Volume, Volume>> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        auto rng = make_stream(seed, static_cast<std::uint64_t>(i));
        char id[32];
        std::snprintf(id, sizeof(id), "phantom_%03d", i);
        out.push_back(generate_phantom(spec, rng, id));
    }
    return out;
}

} // namespace slicesort

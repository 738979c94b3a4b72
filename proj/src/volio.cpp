#include "slicesort/volio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <opencv2/imgcodecs.hpp>

namespace fs = std::filesystem;

namespace slicesort {

void PreprocessSpec::validate() const {
    if (!(low < high))
        throw config_error("preprocess window requires low < high");
    if (kind == WindowKind::percentile_window && (low < 0.0 || high > 100.0))
        throw config_error("percentile window must lie in [0, 100]");
    if (downsample_factor < 1)
        throw config_error("downsample_factor must be >= 1");
}

namespace {

// Round-half-to-even 8-bit map; the window endpoints land exactly on 0/255.
inline float window_value(double x, double low, double high) {
    double c = std::clamp(x, low, high);
    double scaled = (c - low) * 255.0 / (high - low);
    return static_cast<float>(std::nearbyint(scaled));
}

Volume windowed(const Volume& v, double low, double high) {
    Volume out = v;
    for (auto& x : out.data) x = window_value(x, low, high);
    out.bit_depth = "uint8";
    return out;
}

struct RawHeader {
    std::array<std::int64_t, 3> dims{};
    std::string dtype;
    int ordering_axis = 0;
    int axis_direction = +1;
    std::string volume_id;
};

RawHeader parse_sidecar(const fs::path& sidecar, const VolumeMeta& meta) {
    std::ifstream in(sidecar);
    if (!in) throw data_error("cannot open sidecar " + sidecar.string());
    RawHeader h;
    h.ordering_axis = meta.ordering_axis;
    h.axis_direction = meta.axis_direction;
    h.volume_id = meta.volume_id;
    bool have_dims = false, have_dtype = false;
    std::string line;
    while (std::getline(in, line)) {
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = line.substr(0, colon);
        std::string val = line.substr(colon + 1);
        auto trim = [](std::string& s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
        };
        trim(key);
        trim(val);
        if (key == "dims") {
            std::istringstream ss(val);
            if (!(ss >> h.dims[0] >> h.dims[1] >> h.dims[2]))
                throw data_error("sidecar " + sidecar.string() + ": bad dims '" + val + "'");
            have_dims = true;
        } else if (key == "dtype") {
            h.dtype = val;
            have_dtype = true;
        } else if (key == "ordering_axis") {
            h.ordering_axis = std::stoi(val);
        } else if (key == "axis_direction") {
            h.axis_direction = std::stoi(val);
        } else if (key == "volume_id") {
            h.volume_id = val;
        }
    }
    if (!have_dims || !have_dtype)
        throw data_error("sidecar " + sidecar.string() + " must declare dims and dtype");
    return h;
}

template <typename T>
void read_raw_as_float(std::ifstream& in, std::vector<float>& out, std::int64_t n,
                       const std::string& path) {
    std::vector<T> buf(static_cast<std::size_t>(n));
    in.read(reinterpret_cast<char*>(buf.data()), n * static_cast<std::int64_t>(sizeof(T)));
    if (!in) throw data_error("raw file " + path + " truncated");
    out.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = static_cast<float>(buf[static_cast<std::size_t>(i)]);
}

Volume load_raw(const fs::path& path, const VolumeMeta& meta) {
    fs::path sidecar = path;
    fs::path rawfile = path;
    if (path.extension() == ".rawh") {
        rawfile.replace_extension(".raw");
    } else {
        sidecar.replace_extension(".rawh");
    }
    if (!fs::exists(sidecar)) throw data_error("missing sidecar " + sidecar.string());
    if (!fs::exists(rawfile)) throw data_error("missing raw file " + rawfile.string());

    RawHeader h = parse_sidecar(sidecar, meta);
    Volume v;
    v.dims = h.dims;
    v.ordering_axis = h.ordering_axis;
    v.axis_direction = h.axis_direction;
    v.volume_id = h.volume_id.empty() ? rawfile.stem().string() : h.volume_id;
    v.bit_depth = h.dtype;

    std::ifstream in(rawfile, std::ios::binary);
    if (!in) throw data_error("cannot open raw file " + rawfile.string());
    std::int64_t n = v.size();
    if (h.dtype == "uint8")
        read_raw_as_float<std::uint8_t>(in, v.data, n, rawfile.string());
    else if (h.dtype == "int16")
        read_raw_as_float<std::int16_t>(in, v.data, n, rawfile.string());
    else if (h.dtype == "uint16")
        read_raw_as_float<std::uint16_t>(in, v.data, n, rawfile.string());
    else if (h.dtype == "float32")
        read_raw_as_float<float>(in, v.data, n, rawfile.string());
    else
        throw data_error("unsupported dtype '" + h.dtype + "' in " + sidecar.string());
    v.validate();
    return v;
}

Volume load_image_stack(const fs::path& dir, const VolumeMeta& meta) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        auto ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
        if (ext == ".png" || ext == ".tif" || ext == ".tiff") files.push_back(e.path());
    }
    if (files.empty()) throw data_error("no image slices found in " + dir.string());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    std::vector<cv::Mat> slices;
    int rows = 0, cols = 0;
    std::string depth;
    for (const auto& f : files) {
        cv::Mat m = cv::imread(f.string(), cv::IMREAD_UNCHANGED);
        if (m.empty()) throw data_error("cannot read image " + f.string());
        if (m.channels() != 1)
            throw data_error("unsupported format (non-grayscale) in " + f.string());
        if (m.depth() != CV_8U && m.depth() != CV_16U)
            throw data_error("unsupported bit depth in " + f.string());
        if (slices.empty()) {
            rows = m.rows;
            cols = m.cols;
            depth = m.depth() == CV_8U ? "uint8" : "uint16";
        } else if (m.rows != rows || m.cols != cols) {
            throw data_error("slice shape mismatch in " + f.string() + ": expected " +
                             std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                             std::to_string(m.rows) + "x" + std::to_string(m.cols));
        }
        cv::Mat f32;
        m.convertTo(f32, CV_32F);
        slices.push_back(f32);
    }

    const int axis = meta.ordering_axis;
    if (axis < 0 || axis > 2) throw config_error("ordering_axis must be in {0,1,2}");
    const auto n = static_cast<std::int64_t>(slices.size());

    Volume v;
    v.ordering_axis = axis;
    v.axis_direction = meta.axis_direction;
    v.volume_id = meta.volume_id.empty() ? dir.filename().string() : meta.volume_id;
    v.bit_depth = depth;
    // Remaining axes, in ascending order, take (rows, cols).
    if (axis == 0)
        v.dims = {n, rows, cols};
    else if (axis == 1)
        v.dims = {rows, n, cols};
    else
        v.dims = {rows, cols, n};
    v.data.resize(static_cast<std::size_t>(v.size()));
    for (std::int64_t s = 0; s < n; ++s) {
        const auto& m = slices[static_cast<std::size_t>(s)];
        for (int r = 0; r < rows; ++r) {
            const float* src = m.ptr<float>(r);
            for (int c = 0; c < cols; ++c) {
                if (axis == 0)
                    v.at(s, r, c) = src[c];
                else if (axis == 1)
                    v.at(r, s, c) = src[c];
                else
                    v.at(r, c, s) = src[c];
            }
        }
    }
    v.validate();
    return v;
}

} // namespace

Volume load_volume(const fs::path& path, const VolumeMeta& meta) {
    if (fs::is_directory(path)) return load_image_stack(path, meta);
    if (fs::exists(path) || fs::exists(fs::path(path).replace_extension(".rawh")))
        return load_raw(path, meta);
    throw data_error("no such volume container: " + path.string());
}

void save_volume_raw(const Volume& v, const fs::path& base, const std::string& dtype) {
    v.validate();
    fs::path rawfile = base;
    rawfile += ".raw";
    fs::path sidecar = base;
    sidecar += ".rawh";
    if (base.parent_path() != fs::path() && !fs::exists(base.parent_path()))
        fs::create_directories(base.parent_path());

    std::ofstream out(rawfile, std::ios::binary);
    if (!out) throw data_error("cannot write " + rawfile.string());
    const std::int64_t n = v.size();
    if (dtype == "float32") {
        out.write(reinterpret_cast<const char*>(v.data.data()), n * 4);
    } else if (dtype == "uint8") {
        std::vector<std::uint8_t> buf(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i) {
            float x = v.data[static_cast<std::size_t>(i)];
            if (x < 0.f || x > 255.f || x != std::floor(x))
                throw data_error("volume '" + v.volume_id + "' is not 8-bit ready");
            buf[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x);
        }
        out.write(reinterpret_cast<const char*>(buf.data()), n);
    } else if (dtype == "int16") {
        std::vector<std::int16_t> buf(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i)
            buf[static_cast<std::size_t>(i)] =
                static_cast<std::int16_t>(v.data[static_cast<std::size_t>(i)]);
        out.write(reinterpret_cast<const char*>(buf.data()), n * 2);
    } else if (dtype == "uint16") {
        std::vector<std::uint16_t> buf(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i)
            buf[static_cast<std::size_t>(i)] =
                static_cast<std::uint16_t>(v.data[static_cast<std::size_t>(i)]);
        out.write(reinterpret_cast<const char*>(buf.data()), n * 2);
    } else {
        throw config_error("unsupported save dtype '" + dtype + "'");
    }
    if (!out) throw data_error("write failed for " + rawfile.string());

    std::ofstream sc(sidecar);
    sc << "dims: " << v.dims[0] << " " << v.dims[1] << " " << v.dims[2] << "\n"
       << "dtype: " << dtype << "\n"
       << "ordering_axis: " << v.ordering_axis << "\n"
       << "axis_direction: " << (v.axis_direction > 0 ? "+1" : "-1") << "\n"
       << "volume_id: " << v.volume_id << "\n";
    if (!sc) throw data_error("write failed for " + sidecar.string());
}

Volume preprocess_hounsfield(const Volume& v, const PreprocessSpec& spec) {
    spec.validate();
    if (spec.kind != WindowKind::hounsfield_window)
        throw config_error("preprocess_hounsfield requires a hounsfield_window spec");
    return windowed(v, spec.low, spec.high);
}

Volume preprocess_percentile(const Volume& v, const PreprocessSpec& spec) {
    spec.validate();
    if (spec.kind != WindowKind::percentile_window)
        throw config_error("preprocess_percentile requires a percentile_window spec");
    double lo = volume_percentile(v, spec.low);
    double hi = volume_percentile(v, spec.high);
    Volume out = v;
    if (lo == hi) {
        // Degenerate window: constant output.
        std::fill(out.data.begin(), out.data.end(), 0.f);
        out.bit_depth = "uint8";
        return out;
    }
    return windowed(v, lo, hi);
}

double volume_percentile(const Volume& v, double p) {
    if (v.data.empty()) throw data_error("percentile of empty volume");
    if (p < 0.0 || p > 100.0) throw config_error("percentile must lie in [0, 100]");
    std::vector<float> sorted(v.data);
    std::sort(sorted.begin(), sorted.end());
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return static_cast<double>(sorted[lo]) +
           frac * (static_cast<double>(sorted[hi]) - static_cast<double>(sorted[lo]));
}

Volume downsample(const Volume& v, int factor) {
    if (factor <= 0) throw config_error("downsample factor must be positive");
    if (factor == 1) return v;
    for (int a = 0; a < 3; ++a)
        if (v.dims[static_cast<std::size_t>(a)] < factor)
            throw data_error("volume '" + v.volume_id + "' axis " + std::to_string(a) +
                             " shorter than downsample factor");
    Volume out;
    out.dims = {v.dims[0] / factor, v.dims[1] / factor, v.dims[2] / factor};
    out.ordering_axis = v.ordering_axis;
    out.axis_direction = v.axis_direction;
    out.volume_id = v.volume_id;
    out.bit_depth = "float32";
    out.data.resize(static_cast<std::size_t>(out.size()));
    const double inv = 1.0 / (static_cast<double>(factor) * factor * factor);
    for (std::int64_t i = 0; i < out.dims[0]; ++i)
        for (std::int64_t j = 0; j < out.dims[1]; ++j)
            for (std::int64_t k = 0; k < out.dims[2]; ++k) {
                double acc = 0.0;
                for (int di = 0; di < factor; ++di)
                    for (int dj = 0; dj < factor; ++dj)
                        for (int dk = 0; dk < factor; ++dk)
                            acc += v.at(i * factor + di, j * factor + dj, k * factor + dk);
                out.at(i, j, k) = static_cast<float>(acc * inv);
            }
    return out;
}

Volume preprocess(const Volume& v, const PreprocessSpec& spec) {
    spec.validate();
    Volume work = spec.downsample_factor > 1 ? downsample(v, spec.downsample_factor) : v;
    return spec.kind == WindowKind::hounsfield_window ? preprocess_hounsfield(work, spec)
                                                      : preprocess_percentile(work, spec);
}

} // namespace slicesort

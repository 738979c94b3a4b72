#include "slicesort/augment.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/imgproc.hpp>

namespace slicesort {

void AugmentationPolicy::validate() const {
    for (const auto& stage : stages) {
        if (stage.probability < 0.0 || stage.probability > 1.0)
            throw config_error("stage probability must lie in [0,1]");
        if (stage.transforms.empty())
            throw config_error("each stage needs at least one transform");
        for (const auto& t : stage.transforms)
            if (t.name.empty()) throw config_error("transform name must not be empty");
    }
}

namespace {

Transform make(const std::string& name, std::map<std::string, std::vector<double>> params = {}) {
    return Transform{name, std::move(params)};
}

double param1(const Transform& t, const std::string& key, double def) {
    auto it = t.params.find(key);
    if (it == t.params.end() || it->second.empty()) return def;
    return it->second[0];
}

std::pair<double, double> param2(const Transform& t, const std::string& key, double lo, double hi) {
    auto it = t.params.find(key);
    if (it == t.params.end() || it->second.size() < 2) return {lo, hi};
    return {it->second[0], it->second[1]};
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng);
}

int odd_kernel(std::mt19937_64& rng, double limit) {
    const int max_k = std::max(3, static_cast<int>(limit));
    std::vector<int> odds;
    for (int k = 3; k <= max_k; k += 2) odds.push_back(k);
    std::uniform_int_distribution<std::size_t> d(0, odds.size() - 1);
    return odds[d(rng)];
}

cv::Mat lut_apply(const cv::Mat& img, const std::array<std::uint8_t, 256>& table) {
    cv::Mat lut(1, 256, CV_8UC1);
    for (int i = 0; i < 256; ++i) lut.at<std::uint8_t>(i) = table[static_cast<std::size_t>(i)];
    cv::Mat out;
    cv::LUT(img, lut, out);
    return out;
}

cv::Mat motion_blur(const cv::Mat& img, std::mt19937_64& rng, double limit) {
    const int k = odd_kernel(rng, limit);
    const double angle = uniform(rng, 0.0, 180.0);
    cv::Mat kernel = cv::Mat::zeros(k, k, CV_32F);
    const double rad = angle * CV_PI / 180.0;
    const double c = (k - 1) / 2.0;
    const double dx = std::cos(rad), dy = std::sin(rad);
    cv::line(kernel,
             cv::Point(static_cast<int>(std::round(c - dx * c)), static_cast<int>(std::round(c - dy * c))),
             cv::Point(static_cast<int>(std::round(c + dx * c)), static_cast<int>(std::round(c + dy * c))),
             cv::Scalar(1.f));
    kernel /= cv::sum(kernel)[0];
    cv::Mat out;
    cv::filter2D(img, out, -1, kernel, cv::Point(-1, -1), 0, cv::BORDER_REFLECT_101);
    return out;
}

cv::Mat glass_blur(const cv::Mat& img, std::mt19937_64& rng, const Transform& t) {
    const int delta = std::max(1, static_cast<int>(param1(t, "max_delta", 4)));
    const double sigma = param1(t, "sigma", 0.7);
    const int iterations = static_cast<int>(param1(t, "iterations", 2));
    cv::Mat out;
    cv::GaussianBlur(img, out, cv::Size(0, 0), sigma, sigma, cv::BORDER_REFLECT_101);
    std::uniform_int_distribution<int> d(-delta, delta);
    for (int it = 0; it < iterations; ++it) {
        for (int y = delta; y < out.rows - delta; ++y) {
            for (int x = delta; x < out.cols - delta; ++x) {
                const int dy = d(rng), dx = d(rng);
                std::swap(out.at<std::uint8_t>(y, x), out.at<std::uint8_t>(y + dy, x + dx));
            }
        }
    }
    return out;
}

// Per-axis cell rescale of a regular grid, then remap. Row-major draw order:
// horizontal factors first.
AugmentResult grid_distortion(const cv::Mat& img, const cv::Mat& mask, std::mt19937_64& rng,
                              const Transform& t) {
    const int num_steps = std::max(1, static_cast<int>(param1(t, "num_steps", 5)));
    const double limit = param1(t, "distort_limit", 0.3);
    const int W = img.cols, H = img.rows;

    auto axis_map = [&](int length) {
        const int step = length / num_steps;
        std::vector<float> coords(static_cast<std::size_t>(length));
        double prev = 0.0;
        int start = 0;
        for (int cell = 0; start < length; ++cell, start += step) {
            const double f = 1.0 + uniform(rng, -limit, limit);
            const int end = std::min(length, start + step);
            const double cur = prev + step * f;
            for (int i = start; i < end; ++i) {
                const double frac = (end - start) > 1 ? static_cast<double>(i - start) / (end - start) : 0.0;
                coords[static_cast<std::size_t>(i)] = static_cast<float>(prev + frac * (cur - prev));
            }
            prev = cur;
            if (step == 0) break;
        }
        return coords;
    };
    const std::vector<float> xs = axis_map(W);
    const std::vector<float> ys = axis_map(H);

    cv::Mat map_x(H, W, CV_32F), map_y(H, W, CV_32F);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            map_x.at<float>(y, x) = xs[static_cast<std::size_t>(x)];
            map_y.at<float>(y, x) = ys[static_cast<std::size_t>(y)];
        }

    AugmentResult res;
    cv::remap(img, res.image, map_x, map_y, cv::INTER_LINEAR, cv::BORDER_REFLECT_101);
    if (!mask.empty())
        cv::remap(mask, res.mask, map_x, map_y, cv::INTER_NEAREST, cv::BORDER_REFLECT_101);
    return res;
}

// Draw order: angle, scale, dx, dy.
AugmentResult shift_scale_rotate(const cv::Mat& img, const cv::Mat& mask, std::mt19937_64& rng,
                                 const Transform& t) {
    const double rot = param1(t, "rotate_limit", 45.0);
    const double sc = param1(t, "scale_limit", 0.1);
    const double sh = param1(t, "shift_limit", 0.0625);
    const double angle = uniform(rng, -rot, rot);
    const double scale = 1.0 + uniform(rng, -sc, sc);
    const double dx = uniform(rng, -sh, sh);
    const double dy = uniform(rng, -sh, sh);

    const cv::Point2f center(static_cast<float>(img.cols - 1) / 2.f,
                             static_cast<float>(img.rows - 1) / 2.f);
    cv::Mat m = cv::getRotationMatrix2D(center, angle, scale);
    m.at<double>(0, 2) += dx * img.cols;
    m.at<double>(1, 2) += dy * img.rows;

    AugmentResult res;
    cv::warpAffine(img, res.image, m, img.size(), cv::INTER_LINEAR, cv::BORDER_REFLECT_101);
    if (!mask.empty())
        cv::warpAffine(mask, res.mask, m, mask.size(), cv::INTER_NEAREST, cv::BORDER_REFLECT_101);
    return res;
}

cv::Mat gauss_noise(const cv::Mat& img, std::mt19937_64& rng, const Transform& t) {
    const auto [lo, hi] = param2(t, "var_limit", 10.0, 50.0);
    const double sigma = std::sqrt(uniform(rng, lo, hi));
    std::normal_distribution<double> noise(0.0, sigma);
    cv::Mat out(img.size(), CV_8UC1);
    for (int y = 0; y < img.rows; ++y) {
        const auto* src = img.ptr<std::uint8_t>(y);
        auto* dst = out.ptr<std::uint8_t>(y);
        for (int x = 0; x < img.cols; ++x)
            dst[x] = cv::saturate_cast<std::uint8_t>(src[x] + noise(rng));
    }
    return out;
}

} // namespace

bool is_geometric(const std::string& name) {
    return name == "GridDistortion" || name == "ShiftScaleRotate";
}

AugmentResult apply_transform(const Transform& t, const cv::Mat& image, const cv::Mat& mask,
                              std::mt19937_64& rng) {
    if (image.type() != CV_8UC1) throw config_error("augment expects CV_8UC1 images");
    if (!mask.empty() && mask.size() != image.size())
        throw config_error("mask shape does not match image shape");

    AugmentResult res;
    res.mask = mask; // image-only transforms pass the mask through

    if (t.name == "Blur") {
        const int k = odd_kernel(rng, param1(t, "blur_limit", 7));
        cv::blur(image, res.image, cv::Size(k, k), cv::Point(-1, -1), cv::BORDER_REFLECT_101);
    } else if (t.name == "MedianBlur") {
        const int k = odd_kernel(rng, param1(t, "blur_limit", 7));
        cv::medianBlur(image, res.image, k);
    } else if (t.name == "MotionBlur") {
        res.image = motion_blur(image, rng, param1(t, "blur_limit", 7));
    } else if (t.name == "CLAHE") {
        auto clahe = cv::createCLAHE(param1(t, "clip_limit", 4.0),
                                     cv::Size(static_cast<int>(param1(t, "tile_grid_size", 8)),
                                              static_cast<int>(param1(t, "tile_grid_size", 8))));
        clahe->apply(image, res.image);
    } else if (t.name == "Equalize") {
        cv::equalizeHist(image, res.image);
    } else if (t.name == "RandomBrightnessContrast") {
        const double c = param1(t, "contrast_limit", 0.2);
        const double b = param1(t, "brightness_limit", 0.2);
        const double alpha = 1.0 + uniform(rng, -c, c);
        const double beta = uniform(rng, -b, b) * 255.0;
        image.convertTo(res.image, -1, alpha, beta);
    } else if (t.name == "RandomGamma") {
        const auto [lo, hi] = param2(t, "gamma_limit", 80.0, 120.0);
        const double gamma = uniform(rng, lo, hi) / 100.0;
        std::array<std::uint8_t, 256> table{};
        for (int i = 0; i < 256; ++i)
            table[static_cast<std::size_t>(i)] = cv::saturate_cast<std::uint8_t>(
                std::round(std::pow(i / 255.0, gamma) * 255.0));
        res.image = lut_apply(image, table);
    } else if (t.name == "Solarize") {
        const auto [lo, hi] = param2(t, "threshold", 128.0, 128.0);
        const double thr = uniform(rng, lo, hi);
        std::array<std::uint8_t, 256> table{};
        for (int i = 0; i < 256; ++i)
            table[static_cast<std::size_t>(i)] =
                i < thr ? static_cast<std::uint8_t>(i) : static_cast<std::uint8_t>(255 - i);
        res.image = lut_apply(image, table);
    } else if (t.name == "GaussNoise") {
        res.image = gauss_noise(image, rng, t);
    } else if (t.name == "GlassBlur") {
        res.image = glass_blur(image, rng, t);
    } else if (t.name == "GridDistortion") {
        return grid_distortion(image, mask, rng, t);
    } else if (t.name == "ShiftScaleRotate") {
        return shift_scale_rotate(image, mask, rng, t);
    } else {
        throw config_error("unknown transform '" + t.name + "'");
    }
    return res;
}

AugmentResult apply(const AugmentationPolicy& policy, const cv::Mat& image, const cv::Mat& mask,
                    std::mt19937_64& rng) {
    policy.validate();
    if (image.type() != CV_8UC1) throw config_error("augment expects CV_8UC1 images");
    if (!mask.empty() && mask.size() != image.size())
        throw config_error("mask shape does not match image shape");

    AugmentResult cur{image.clone(), mask.empty() ? cv::Mat() : mask.clone()};
    for (const auto& stage : policy.stages) {
        if (uniform(rng, 0.0, 1.0) >= stage.probability) continue;
        std::uniform_int_distribution<std::size_t> pick(0, stage.transforms.size() - 1);
        const Transform& t = stage.transforms[pick(rng)];
        cur = apply_transform(t, cur.image, cur.mask, rng);
    }
    return cur;
}

AugmentationPolicy AugmentationPolicy::builtin(const std::string& name) {
    AugmentationPolicy p;
    if (name == "none") return p;

    const bool tougher = name == "tougher";
    if (!tougher && name != "normal")
        throw config_error("unknown augmentation policy '" + name + "'");

    const double blur_limit = tougher ? 15.0 : 5.0;
    Stage blur;
    blur.probability = 0.5;
    blur.transforms = {make("Blur", {{"blur_limit", {blur_limit}}}),
                       make("MedianBlur", {{"blur_limit", {blur_limit}}}),
                       make("MotionBlur", {{"blur_limit", {blur_limit}}})};

    Stage hist;
    hist.probability = 0.2;
    hist.transforms = {make("CLAHE", {{"clip_limit", {4.0}}, {"tile_grid_size", {8.0}}}),
                       make("Equalize")};

    Stage intensity;
    intensity.probability = 0.2;
    const double bc = tougher ? 0.4 : 0.2;
    intensity.transforms = {
        make("RandomBrightnessContrast",
             {{"brightness_limit", {bc}}, {"contrast_limit", {bc}}}),
        make("RandomGamma", {{"gamma_limit", tougher ? std::vector<double>{30.0, 170.0}
                                                     : std::vector<double>{90.0, 110.0}}})};
    if (tougher)
        intensity.transforms.push_back(make("Solarize", {{"threshold", {64.0, 192.0}}}));

    Stage geometric;
    geometric.probability = 0.5;
    geometric.transforms = {
        make("GridDistortion", {{"distort_limit", {0.2}}, {"num_steps", {5.0}}}),
        make("ShiftScaleRotate",
             {{"shift_limit", {0.0625}}, {"scale_limit", {0.1}}, {"rotate_limit", {45.0}}}),
        make("GlassBlur", {{"max_delta", {5.0}}, {"sigma", {0.7}}, {"iterations", {2.0}}})};

    Stage noise;
    noise.probability = 0.5;
    noise.transforms = {make("GaussNoise", {{"var_limit", {20.0, 50.0}}})};

    p.stages = {blur, hist, intensity, geometric, noise};
    p.validate();
    return p;
}

nlohmann::json policy_to_json(const AugmentationPolicy& p) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : p.stages) {
        nlohmann::json transforms = nlohmann::json::array();
        for (const auto& t : s.transforms)
            transforms.push_back({{"name", t.name}, {"params", t.params}});
        stages.push_back({{"probability", s.probability}, {"transforms", transforms}});
    }
    return {{"stages", stages}};
}

AugmentationPolicy policy_from_json(const nlohmann::json& j) {
    AugmentationPolicy p;
    try {
        for (const auto& js : j.at("stages")) {
            Stage s;
            s.probability = js.at("probability").get<double>();
            for (const auto& jt : js.at("transforms")) {
                Transform t;
                t.name = jt.at("name").get<std::string>();
                if (jt.contains("params"))
                    t.params = jt.at("params").get<std::map<std::string, std::vector<double>>>();
                s.transforms.push_back(std::move(t));
            }
            p.stages.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("bad augmentation policy: ") + e.what());
    }
    p.validate();
    return p;
}

std::vector<PolicyDiffEntry> policy_diff(const AugmentationPolicy& a, const AugmentationPolicy& b) {
    std::vector<PolicyDiffEntry> diff;
    const std::size_t n = std::max(a.stages.size(), b.stages.size());
    for (std::size_t s = 0; s < n; ++s) {
        std::map<std::string, const Transform*> ta, tb;
        if (s < a.stages.size())
            for (const auto& t : a.stages[s].transforms) ta[t.name] = &t;
        if (s < b.stages.size())
            for (const auto& t : b.stages[s].transforms) tb[t.name] = &t;

        for (const auto& [name, t] : ta)
            if (!tb.count(name)) diff.push_back({s, name, "", "removed", {}, {}});
        for (const auto& [name, t] : tb)
            if (!ta.count(name)) diff.push_back({s, name, "", "added", {}, {}});
        for (const auto& [name, lhs] : ta) {
            auto it = tb.find(name);
            if (it == tb.end()) continue;
            const Transform* rhs = it->second;
            for (const auto& [key, vals] : lhs->params) {
                auto r = rhs->params.find(key);
                if (r == rhs->params.end())
                    diff.push_back({s, name, key, "param", vals, {}});
                else if (r->second != vals)
                    diff.push_back({s, name, key, "param", vals, r->second});
            }
            for (const auto& [key, vals] : rhs->params)
                if (!lhs->params.count(key)) diff.push_back({s, name, key, "param", {}, vals});
        }
    }
    return diff;
}

} // namespace slicesort

#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include <json.hpp>

#include "slicesort/errors.hpp"

namespace slicesort {

/// One named image transform with its declarative parameters. Range
/// parameters hold two values, scalar parameters one.
struct Transform {
    std::string name;
    std::map<std::string, std::vector<double>> params;
};

/// Probability group: with `probability`, exactly one transform is applied,
/// chosen uniformly.
struct Stage {
    std::vector<Transform> transforms;
    double probability = 1.0;
};

struct AugmentationPolicy {
    std::vector<Stage> stages;

    void validate() const;
    /// Builtin names: "normal", "tougher", "none".
    static AugmentationPolicy builtin(const std::string& name);
};

nlohmann::json policy_to_json(const AugmentationPolicy& p);
AugmentationPolicy policy_from_json(const nlohmann::json& j);

/// Geometric transforms are applied identically to image and mask (mask with
/// nearest-neighbor interpolation); all others leave the mask untouched.
bool is_geometric(const std::string& transform_name);

struct AugmentResult {
    cv::Mat image; // CV_8UC1, same shape as input
    cv::Mat mask;  // empty when no mask was given
};

/// Applies the policy to an 8-bit grayscale image and optional label mask.
/// Pass an empty Mat for "no mask". Deterministic in (inputs, rng state).
AugmentResult apply(const AugmentationPolicy& policy, const cv::Mat& image, const cv::Mat& mask,
                    std::mt19937_64& rng);

/// Applies a single transform; exposed for tests and the reference doc.
AugmentResult apply_transform(const Transform& t, const cv::Mat& image, const cv::Mat& mask,
                              std::mt19937_64& rng);

/// One structural difference between two policies, for parameter-level
/// policy comparison.
struct PolicyDiffEntry {
    std::size_t stage = 0;
    std::string transform;
    std::string param;      // empty when the whole transform is added/removed
    std::string kind;       // "param", "added", "removed"
    std::vector<double> lhs;
    std::vector<double> rhs;
};

std::vector<PolicyDiffEntry> policy_diff(const AugmentationPolicy& a, const AugmentationPolicy& b);

} // namespace slicesort

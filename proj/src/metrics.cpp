#include "slicesort/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace slicesort {

std::vector<int> argsort_ranks(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)]; });
    std::vector<int> ranks(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos) ranks[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;
    return ranks;
}

void check_rank_permutation(std::span<const int> ranks) {
    const int n = static_cast<int>(ranks.size());
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int r : ranks) {
        if (r < 0 || r >= n || seen[static_cast<std::size_t>(r)])
            throw config_error("ranks must be a permutation of {0.." + std::to_string(n - 1) + "}");
        seen[static_cast<std::size_t>(r)] = 1;
    }
}

DisplacementReport mean_displacement(std::span<const double> scores, std::span<const int> ranks) {
    if (scores.size() != ranks.size() || scores.size() < 2)
        throw config_error("mean_displacement needs matching scores/ranks of length >= 2");
    check_rank_permutation(ranks);
    for (double s : scores)
        if (!std::isfinite(s)) throw config_error("scores must be finite");

    const std::vector<int> predicted = argsort_ranks(scores);
    double acc = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        acc += std::abs(static_cast<double>(ranks[i] - predicted[i]));

    DisplacementReport rep;
    rep.batch_size = static_cast<int>(scores.size());
    rep.mean_displacement = acc / static_cast<double>(rep.batch_size);
    rep.random_baseline = random_md_baseline(rep.batch_size);
    return rep;
}

double random_md_baseline(int bs) {
    if (bs < 2) throw config_error("random_md_baseline requires bs >= 2");
    const double b = static_cast<double>(bs);
    return (b * b - 1.0) / (3.0 * b);
}

IoUReport iou(std::span<const int> prediction, std::span<const int> truth,
              const std::set<int>& classes) {
    if (prediction.size() != truth.size())
        throw config_error("iou: prediction and truth shapes differ");
    IoUReport rep;
    double sum = 0.0;
    int included = 0;
    for (int c : classes) {
        std::int64_t inter = 0, uni = 0;
        for (std::size_t i = 0; i < prediction.size(); ++i) {
            const bool p = prediction[i] == c;
            const bool t = truth[i] == c;
            inter += static_cast<std::int64_t>(p && t);
            uni += static_cast<std::int64_t>(p || t);
        }
        if (uni == 0) {
            rep.classes_excluded.insert(c);
        } else {
            const double v = static_cast<double>(inter) / static_cast<double>(uni);
            rep.per_class[c] = v;
            sum += v;
            ++included;
        }
    }
    rep.mean_iou = included > 0 ? sum / included : 0.0;
    return rep;
}

} // namespace slicesort

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "slicesort/errors.hpp"

namespace slicesort {

struct DisplacementReport {
    double mean_displacement = 0.0;
    int batch_size = 0;
    double random_baseline = 0.0; // (bs^2 - 1) / (3 bs)
};

struct IoUReport {
    std::map<int, double> per_class;
    double mean_iou = 0.0;            // mean over included classes only
    std::set<int> classes_excluded;   // empty union in both prediction and truth
};

/// Stable ascending argsort-rank: result[i] is the position element i takes
/// when values are sorted ascending, ties broken by original index.
std::vector<int> argsort_ranks(std::span<const double> values);

/// Throws unless `ranks` is a permutation of {0..n-1}.
void check_rank_permutation(std::span<const int> ranks);

/// Mean absolute difference between true ranks and the argsort-derived
/// predicted ranks of the scores.
DisplacementReport mean_displacement(std::span<const double> scores, std::span<const int> ranks);

/// Expected mean displacement of a uniformly random permutation.
double random_md_baseline(int bs);

/// Per-class intersection-over-union. Classes whose union is empty in both
/// arrays are excluded from the mean and reported.
IoUReport iou(std::span<const int> prediction, std::span<const int> truth,
              const std::set<int>& classes);

} // namespace slicesort

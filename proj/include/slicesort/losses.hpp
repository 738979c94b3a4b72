#pragma once

#include <vector>

#include <torch/torch.h>

#include "slicesort/errors.hpp"

namespace slicesort {

struct RankingLossConfig {
    double margin = 0.2;
    // pair_set: all ordered pairs; reduction: mean. Both fixed.

    void validate() const {
        if (margin <= 0.0) throw config_error("ranking margin must be > 0");
    }
};

struct ContrastiveConfig {
    double temperature = 0.5;
    int projection_dim = 128;
    // views_per_image fixed at 2.

    void validate() const {
        if (temperature <= 0.0) throw config_error("contrastive temperature must be > 0");
        if (projection_dim < 1) throw config_error("projection_dim must be >= 1");
    }
};

/// Pairwise margin ranking objective over slice scores: mean over all pairs
/// (i,j) with ranks[i] > ranks[j] of max(0, margin - (scores[i]-scores[j])).
/// Differentiable w.r.t. scores; zero iff every correctly ordered pair is
/// separated by at least the margin.
torch::Tensor margin_ranking_loss(const torch::Tensor& scores, const std::vector<int>& ranks,
                                  const RankingLossConfig& cfg);

/// Normalized-temperature cross entropy over cosine similarities for 2k
/// embeddings laid out as [view-A of image 0..k-1, view-B of image 0..k-1].
/// Rows are unit-normalized internally; self-similarity is excluded from the
/// denominator.
torch::Tensor nt_xent_loss(const torch::Tensor& embeddings, const ContrastiveConfig& cfg);

} // namespace slicesort

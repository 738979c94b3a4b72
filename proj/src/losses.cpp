#include "slicesort/losses.hpp"

#include "slicesort/metrics.hpp"

namespace slicesort {

torch::Tensor margin_ranking_loss(const torch::Tensor& scores, const std::vector<int>& ranks,
                                  const RankingLossConfig& cfg) {
    cfg.validate();
    if (scores.dim() != 1) throw config_error("scores must be a 1D tensor");
    const auto bs = scores.size(0);
    if (bs < 2 || static_cast<std::int64_t>(ranks.size()) != bs)
        throw config_error("need matching scores/ranks with batch size >= 2");
    check_rank_permutation(ranks);

    auto rank_t = torch::empty({bs}, torch::TensorOptions().dtype(torch::kLong));
    for (std::int64_t i = 0; i < bs; ++i) rank_t[i] = ranks[static_cast<std::size_t>(i)];

    // diff[i][j] = scores[i] - scores[j]; hinge active where ranks[i] > ranks[j].
    auto diff = scores.unsqueeze(1) - scores.unsqueeze(0);
    auto pair_mask = (rank_t.unsqueeze(1) > rank_t.unsqueeze(0)).to(scores.dtype());
    auto margin = torch::scalar_tensor(cfg.margin, scores.options());
    auto hinge = torch::relu(margin - diff) * pair_mask;
    return hinge.sum() / pair_mask.sum();
}

torch::Tensor nt_xent_loss(const torch::Tensor& embeddings, const ContrastiveConfig& cfg) {
    cfg.validate();
    if (embeddings.dim() != 2) throw config_error("embeddings must be a 2D tensor");
    const auto n = embeddings.size(0);
    if (n < 2 || n % 2 != 0)
        throw config_error("nt_xent needs an even, positive number of embeddings");
    const auto k = n / 2;

    auto norms = embeddings.norm(2, /*dim=*/1);
    if ((norms == 0).any().item<bool>())
        throw config_error("nt_xent: zero embedding vector cannot be normalized");
    auto z = embeddings / norms.unsqueeze(1);

    auto sim = torch::matmul(z, z.t()) / cfg.temperature;
    // Remove self-similarity from every softmax denominator.
    auto neg_inf = torch::scalar_tensor(-std::numeric_limits<double>::infinity(), sim.options());
    sim = sim.masked_fill(torch::eye(n, torch::TensorOptions().dtype(torch::kBool)), neg_inf);

    auto targets = torch::empty({n}, torch::TensorOptions().dtype(torch::kLong));
    for (std::int64_t i = 0; i < n; ++i) targets[i] = (i + k) % n;
    return torch::nn::functional::cross_entropy(sim, targets);
}

} // namespace slicesort

#pragma once

#include <span>
#include <vector>

#include "esn/classify.hpp"
#include "esn/linalg.hpp"
#include "esn/reservoir.hpp"

namespace esn {

// Subspace residual classifier: per class k and timestep t, keep the leading
// principal components U_k(t) of that class's training states, then score a
// test trajectory by the projection residual
//   z(k) = Σ_t ‖(U_k(t)·U_k(t)ᵀ − I)·X(t)‖
// and pick argmin z.

enum class ResidualNorm { L2, SquaredL2 };

struct LowRankOptions {
    std::size_t rank = 3;   // capped at min(N, class size) per class
    bool center = false;    // subtract per-(class, t) state means before PCA
    ResidualNorm norm = ResidualNorm::L2;
};

struct LowRankModel {
    std::size_t n_classes = 0;
    std::size_t length = 0;
    std::size_t rank = 0;  // requested rank
    bool centered = false;
    ResidualNorm norm = ResidualNorm::L2;
    std::vector<std::vector<OrthonormalBasis>> bases;      // [k][t]
    std::vector<std::vector<std::vector<double>>> means;   // [k][t], empty unless centered
    std::vector<std::vector<std::size_t>> effective_rank;  // [k][t]
};

LowRankModel fit_lowrank(std::span<const StateTrajectory> trajectories,
                         std::span<const int> labels, std::size_t n_classes,
                         const LowRankOptions& options);

/// scores = z, class = argmin with lowest-index tie-break. Residuals are
/// evaluated as sqrt(‖X‖² − ‖UᵀX‖²) per timestep; no N×N projector is formed.
ClassificationResult score_lowrank(const LowRankModel& model, const StateTrajectory& trajectory);

}  // namespace esn

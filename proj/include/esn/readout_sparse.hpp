#pragma once

#include <span>
#include <vector>

#include "esn/classify.hpp"
#include "esn/linalg.hpp"
#include "esn/reservoir.hpp"

namespace esn {

// Sparse linear readout trained with the penalized Dantzig selector: per
// class row w and timestep,
//   minimize ‖(wᵀX − y)·Xᵀ·D⁻¹‖ + lambda·‖w‖₁,
// where D is diagonal with the ℓ2 norms of the rows of X. The residual
// correlation norm is the element-wise maximum by default (each class row an
// independent scalar Dantzig program); InducedLinf uses the ℓ∞ operator norm,
// i.e. the ℓ1 norm of each row's correlation vector.
enum class DantzigNorm { MaxAbsEntry, InducedLinf };

struct DantzigOptions {
    double lambda = 1e-4;  // must be > 0
    DantzigNorm norm = DantzigNorm::MaxAbsEntry;
};

struct DantzigSolution {
    Matrix weights;                     // K×N (excluded-node columns are zero)
    std::vector<double> objectives;     // achieved objective per class row
    std::vector<std::size_t> excluded;  // zero-row nodes dropped from the program
};

/// Solves the Dantzig program for every class row of targets (K×J) against
/// states (N×J), to 1e-6 absolute objective accuracy. Nodes whose state row
/// is identically zero are excluded from the correlation constraints and
/// their weights forced to zero (reported in `excluded`).
DantzigSolution dantzig_solve(const Matrix& states, const Matrix& targets,
                              const DantzigOptions& options);

struct SparseWeightRow {
    std::vector<std::size_t> index;
    std::vector<double> value;
};

struct SparseReadout {
    std::size_t n_classes = 0;
    std::size_t n_nodes = 0;
    double lambda = 0.0;
    DantzigNorm norm = DantzigNorm::MaxAbsEntry;
    std::vector<std::vector<SparseWeightRow>> weights;  // [t][k]
    std::vector<std::vector<double>> objectives;        // [t][k]
    std::vector<double> sparsity;                       // per t: fraction |w| > 1e-8

    std::size_t length() const { return weights.size(); }
};

SparseReadout fit_sparse(std::span<const StateTrajectory> trajectories, const Matrix& targets,
                         const DantzigOptions& options);

/// Same contract as classify_pointwise, evaluated with the sparse rows.
ClassificationResult classify_sparse(const SparseReadout& model,
                                     const StateTrajectory& trajectory);

/// Densifies the stored weights of one timestep into a K×N matrix.
Matrix sparse_weights_at(const SparseReadout& model, std::size_t t);

// ---------------------------------------------------------------------------
// LP core (exposed for direct tests)
// ---------------------------------------------------------------------------

/// min cᵀx subject to a·x ≤ b, x ≥ 0.
struct LinearProgram {
    Matrix a;
    std::vector<double> b;
    std::vector<double> c;
};

struct LpResult {
    std::vector<double> x;
    double objective = 0.0;
    std::size_t iterations = 0;
};

/// Dense full-tableau primal simplex. `start_basis` must name one basic
/// column per row (var columns 0..n-1, slack columns n..n+m-1) forming a
/// feasible basis; pass empty to use the all-slack basis, which requires
/// b ≥ 0. Pivot rule (deterministic): entering = most negative reduced cost
/// with lowest column index on ties, leaving = lowest basic column among
/// minimal ratios; switches to Bland's rule after 10·(n+m)+1000 iterations
/// to rule out cycling.
LpResult solve_lp(const LinearProgram& lp, std::span<const std::size_t> start_basis = {});

}  // namespace esn

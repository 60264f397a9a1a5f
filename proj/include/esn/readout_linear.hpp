#pragma once

#include <span>
#include <vector>

#include "esn/classify.hpp"
#include "esn/linalg.hpp"
#include "esn/reservoir.hpp"

namespace esn {

// Three ridge-trained linear readout variants. Targets are a K×J indicator
// matrix (see classify.hpp); trajectories must have uniform length T.

/// One K×N weight matrix per timestep, each fit against the states of all
/// patterns at that timestep.
struct PointwiseReadout {
    std::vector<Matrix> weights;  // T entries, each K×N
    double lambda = 0.0;

    std::size_t length() const { return weights.size(); }
};

PointwiseReadout fit_pointwise(std::span<const StateTrajectory> trajectories,
                               const Matrix& targets, double lambda);

/// z = Σ_t W(t)·X(t), class = decide_max(z).
ClassificationResult classify_pointwise(const PointwiseReadout& model,
                                        const StateTrajectory& trajectory);

/// Single weight matrix fit against the final state of each pattern.
struct EndpointReadout {
    Matrix weights;  // K×N
    double lambda = 0.0;
};

EndpointReadout fit_endpoint(std::span<const StateTrajectory> trajectories,
                             const Matrix& targets, double lambda);

/// z = W·X(T).
ClassificationResult classify_endpoint(const EndpointReadout& model,
                                       const StateTrajectory& trajectory);

/// Single weight matrix fit against the states at every timestep jointly:
/// minimizes Σ_t ‖targets − W·X_tr(t)‖₂² + lambda‖W‖₂².
struct GlobalReadout {
    Matrix weights;  // K×N
    double lambda = 0.0;
};

GlobalReadout fit_global(std::span<const StateTrajectory> trajectories,
                         const Matrix& targets, double lambda);

/// z = W·Σ_t X(t).
ClassificationResult classify_global(const GlobalReadout& model,
                                     const StateTrajectory& trajectory);

}  // namespace esn

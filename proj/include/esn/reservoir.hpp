#pragma once

#include <cstdint>
#include <span>

#include "esn/linalg.hpp"

namespace esn {

enum class Activation { Tanh, Identity };

/// Parameters of the leaky echo state update
///   X(t+1) = (1−alpha)·X(t) + f(rho·W_res·X(t) + gamma·W_in·u(t)).
struct ReservoirConfig {
    std::size_t n_nodes = 50;
    std::size_t n_inputs = 1;
    double alpha = 1.0;   // leak rate, in [0, 1]
    double rho = 0.8;     // feedback strength
    double gamma = 1.5;   // input gain
    Activation activation = Activation::Tanh;
    double spectral_target = 0.95;  // recurrent matrix is rescaled to this radius
    std::uint64_t weight_seed = 1;
    std::size_t washout = 0;        // leading states dropped from each run
    bool concat_input = false;      // readouts see [X(t); u(t)] when set
    double connectivity = 1.0;      // fraction of nonzero recurrent entries

    void validate() const;
};

/// Fixed random input and recurrent weights. Entries are i.i.d. U(−1,1) from
/// the seeded generator; w_res is rescaled so its spectral radius equals
/// spectral_target (within 1e-4).
struct ReservoirWeights {
    Matrix w_in;   // N×L
    Matrix w_res;  // N×N
};

ReservoirWeights init_weights(const ReservoirConfig& config);

/// Sequence of reservoir states X(1)…X(T), one row per timestep.
struct StateTrajectory {
    Matrix states;  // T×N

    std::size_t length() const { return states.rows(); }
    std::size_t dim() const { return states.cols(); }
    std::span<const double> state(std::size_t t) const { return states.row(t); }
};

/// Drives the state update over input (T×L), starting from X(0) = 0. Returns
/// X(1)…X(T), minus any configured washout prefix.
StateTrajectory run(const ReservoirWeights& weights, const ReservoirConfig& config,
                    const Matrix& input);

/// Appends the input row to each state row: S(t) = [X(t); u(t)].
StateTrajectory augment_with_input(const StateTrajectory& trajectory, const Matrix& input);

}  // namespace esn

#include "esn/reservoir.hpp"

#include <cmath>
#include <stdexcept>

#include "esn/rng.hpp"

namespace esn {

void ReservoirConfig::validate() const {
    if (n_nodes < 1 || n_inputs < 1) {
        throw std::invalid_argument("ReservoirConfig: n_nodes and n_inputs must be at least 1");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("ReservoirConfig: alpha must lie in [0, 1]");
    }
    if (!(rho >= 0.0) || !std::isfinite(rho) || !(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("ReservoirConfig: rho and gamma must be nonnegative reals");
    }
    if (!(spectral_target > 0.0 && spectral_target < 1.0)) {
        throw std::invalid_argument("ReservoirConfig: spectral_target must lie in (0, 1)");
    }
    if (!(connectivity > 0.0 && connectivity <= 1.0)) {
        throw std::invalid_argument("ReservoirConfig: connectivity must lie in (0, 1]");
    }
}

ReservoirWeights init_weights(const ReservoirConfig& config) {
    config.validate();
    const std::size_t n = config.n_nodes;
    const std::size_t l = config.n_inputs;

    // Draw order is part of the determinism contract: w_in row-major, then
    // w_res row-major, then (only if connectivity < 1) one mask draw per
    // recurrent entry.
    Rng rng(config.weight_seed);
    ReservoirWeights w{Matrix(n, l), Matrix(n, n)};
    for (double& v : w.w_in.storage()) v = rng.uniform(-1.0, 1.0);
    for (double& v : w.w_res.storage()) v = rng.uniform(-1.0, 1.0);
    if (config.connectivity < 1.0) {
        for (double& v : w.w_res.storage()) {
            if (rng.uniform01() >= config.connectivity) v = 0.0;
        }
    }

    const double raw = spectral_radius(w.w_res);
    if (raw <= 0.0) {
        throw std::runtime_error("init_weights: recurrent matrix has zero spectral radius");
    }
    const double scale = config.spectral_target / raw;
    for (double& v : w.w_res.storage()) v *= scale;
    return w;
}

StateTrajectory run(const ReservoirWeights& weights, const ReservoirConfig& config,
                    const Matrix& input) {
    config.validate();
    input.ensure_finite("run: input");
    if (input.cols() != config.n_inputs) {
        throw std::invalid_argument("run: input dimension does not match n_inputs");
    }
    if (weights.w_in.rows() != config.n_nodes || weights.w_in.cols() != config.n_inputs ||
        weights.w_res.rows() != config.n_nodes || weights.w_res.cols() != config.n_nodes) {
        throw std::invalid_argument("run: weight shapes do not match config");
    }
    const std::size_t steps = input.rows();
    if (config.washout >= steps) {
        throw std::invalid_argument("run: washout must be shorter than the input");
    }

    const std::size_t n = config.n_nodes;
    const bool use_tanh = config.activation == Activation::Tanh;
    std::vector<double> x(n, 0.0);  // X(0) = 0, no warm start
    Matrix out(steps - config.washout, n);

    std::vector<double> pre(n);
    for (std::size_t t = 0; t < steps; ++t) {
        const auto u = input.row(t);
        for (std::size_t i = 0; i < n; ++i) {
            double s = config.rho * dot(weights.w_res.row(i), x);
            s += config.gamma * dot(weights.w_in.row(i), u);
            pre[i] = use_tanh ? std::tanh(s) : s;
        }
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = (1.0 - config.alpha) * x[i] + pre[i];
        }
        if (t >= config.washout) {
            auto row = out.row(t - config.washout);
            std::copy(x.begin(), x.end(), row.begin());
        }
    }
    out.ensure_finite("run: states");  // identity activation can overflow
    return StateTrajectory{std::move(out)};
}

StateTrajectory augment_with_input(const StateTrajectory& trajectory, const Matrix& input) {
    if (input.rows() != trajectory.length()) {
        throw std::invalid_argument("augment_with_input: length mismatch");
    }
    const std::size_t n = trajectory.dim();
    const std::size_t l = input.cols();
    Matrix out(trajectory.length(), n + l);
    for (std::size_t t = 0; t < trajectory.length(); ++t) {
        auto dst = out.row(t);
        auto src = trajectory.state(t);
        std::copy(src.begin(), src.end(), dst.begin());
        auto in = input.row(t);
        std::copy(in.begin(), in.end(), dst.begin() + n);
    }
    return StateTrajectory{std::move(out)};
}

}  // namespace esn

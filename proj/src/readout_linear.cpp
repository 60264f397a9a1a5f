#include "esn/readout_linear.hpp"

#include <stdexcept>

namespace esn {

// ---------------------------------------------------------------------------
// classify.hpp helpers
// ---------------------------------------------------------------------------

std::size_t decide_max(std::span<const double> z) {
    if (z.empty()) throw std::invalid_argument("decide_max: empty score vector");
    if (z.size() == 1) return z[0] >= 0.0 ? 0 : 1;
    std::size_t best = 0;
    for (std::size_t k = 1; k < z.size(); ++k) {
        if (z[k] > z[best]) best = k;
    }
    return best;
}

std::size_t decide_min(std::span<const double> z) {
    if (z.empty()) throw std::invalid_argument("decide_min: empty score vector");
    std::size_t best = 0;
    for (std::size_t k = 1; k < z.size(); ++k) {
        if (z[k] < z[best]) best = k;
    }
    return best;
}

Matrix indicator_matrix(std::span<const int> labels, std::size_t n_classes, double nonmember) {
    if (labels.empty() || n_classes < 1) {
        throw std::invalid_argument("indicator_matrix: need labels and at least one class");
    }
    Matrix y(n_classes, labels.size(), nonmember);
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] < 0 || static_cast<std::size_t>(labels[j]) >= n_classes) {
            throw std::invalid_argument("indicator_matrix: label out of range");
        }
        y(static_cast<std::size_t>(labels[j]), j) = 1.0;
    }
    return y;
}

Matrix signed_indicator(std::span<const int> labels) {
    if (labels.empty()) throw std::invalid_argument("signed_indicator: empty labels");
    Matrix y(1, labels.size());
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] != 0 && labels[j] != 1) {
            throw std::invalid_argument("signed_indicator: labels must be 0 or 1");
        }
        y(0, j) = labels[j] == 0 ? 1.0 : -1.0;
    }
    return y;
}

void require_uniform(std::span<const StateTrajectory> trajectories) {
    if (trajectories.empty()) {
        throw std::invalid_argument("readout: no training trajectories");
    }
    const std::size_t t = trajectories.front().length();
    const std::size_t n = trajectories.front().dim();
    if (t == 0) throw std::invalid_argument("readout: empty trajectory");
    for (const auto& tr : trajectories) {
        if (tr.length() != t || tr.dim() != n) {
            throw std::invalid_argument("readout: inconsistent trajectory lengths");
        }
    }
}

Matrix states_at(std::span<const StateTrajectory> trajectories, std::size_t t) {
    require_uniform(trajectories);
    if (t >= trajectories.front().length()) {
        throw std::invalid_argument("states_at: timestep out of range");
    }
    const std::size_t n = trajectories.front().dim();
    Matrix x(n, trajectories.size());
    for (std::size_t j = 0; j < trajectories.size(); ++j) {
        const auto s = trajectories[j].state(t);
        for (std::size_t i = 0; i < n; ++i) x(i, j) = s[i];
    }
    return x;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

namespace {

void check_targets(std::span<const StateTrajectory> trajectories, const Matrix& targets) {
    targets.ensure_finite("readout: targets");
    if (targets.cols() != trajectories.size()) {
        throw std::invalid_argument("readout: one target column per trajectory required");
    }
}

}  // namespace

PointwiseReadout fit_pointwise(std::span<const StateTrajectory> trajectories,
                               const Matrix& targets, double lambda) {
    require_uniform(trajectories);
    check_targets(trajectories, targets);
    const std::size_t t_len = trajectories.front().length();
    PointwiseReadout model;
    model.lambda = lambda;
    model.weights.reserve(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        model.weights.push_back(ridge_solve(states_at(trajectories, t), targets, lambda));
    }
    return model;
}

ClassificationResult classify_pointwise(const PointwiseReadout& model,
                                        const StateTrajectory& trajectory) {
    if (model.length() != trajectory.length()) {
        throw std::invalid_argument("classify_pointwise: trajectory length does not match model");
    }
    const std::size_t k = model.weights.front().rows();
    std::vector<double> z(k, 0.0);
    for (std::size_t t = 0; t < model.length(); ++t) {
        const std::vector<double> zt = matvec(model.weights[t], trajectory.state(t));
        for (std::size_t i = 0; i < k; ++i) z[i] += zt[i];
    }
    return {decide_max(z), std::move(z)};
}

EndpointReadout fit_endpoint(std::span<const StateTrajectory> trajectories,
                             const Matrix& targets, double lambda) {
    require_uniform(trajectories);
    check_targets(trajectories, targets);
    const std::size_t last = trajectories.front().length() - 1;
    return {ridge_solve(states_at(trajectories, last), targets, lambda), lambda};
}

ClassificationResult classify_endpoint(const EndpointReadout& model,
                                       const StateTrajectory& trajectory) {
    if (trajectory.length() == 0 || model.weights.cols() != trajectory.dim()) {
        throw std::invalid_argument("classify_endpoint: trajectory does not match model");
    }
    std::vector<double> z = matvec(model.weights, trajectory.state(trajectory.length() - 1));
    return {decide_max(z), std::move(z)};
}

GlobalReadout fit_global(std::span<const StateTrajectory> trajectories,
                         const Matrix& targets, double lambda) {
    require_uniform(trajectories);
    check_targets(trajectories, targets);
    const std::size_t t_len = trajectories.front().length();
    const std::size_t n = trajectories.front().dim();
    // Accumulated normal equations over all timesteps:
    //   W·(Σ_t X(t)X(t)ᵀ + λI) = y·(Σ_t X(t))ᵀ
    Matrix gram_sum(n, n);
    Matrix state_sum(n, trajectories.size());
    for (std::size_t t = 0; t < t_len; ++t) {
        const Matrix x = states_at(trajectories, t);
        const Matrix g = gram(x);
        for (std::size_t i = 0; i < gram_sum.storage().size(); ++i) {
            gram_sum.storage()[i] += g.storage()[i];
        }
        for (std::size_t i = 0; i < state_sum.storage().size(); ++i) {
            state_sum.storage()[i] += x.storage()[i];
        }
    }
    return {ridge_from_gram(gram_sum, multiply(targets, transpose(state_sum)), lambda), lambda};
}

ClassificationResult classify_global(const GlobalReadout& model,
                                     const StateTrajectory& trajectory) {
    if (trajectory.length() == 0 || model.weights.cols() != trajectory.dim()) {
        throw std::invalid_argument("classify_global: trajectory does not match model");
    }
    const std::size_t n = trajectory.dim();
    std::vector<double> sum(n, 0.0);
    for (std::size_t t = 0; t < trajectory.length(); ++t) {
        const auto s = trajectory.state(t);
        for (std::size_t i = 0; i < n; ++i) sum[i] += s[i];
    }
    std::vector<double> z = matvec(model.weights, sum);
    return {decide_max(z), std::move(z)};
}

}  // namespace esn

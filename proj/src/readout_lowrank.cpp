#include "esn/readout_lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace esn {

LowRankModel fit_lowrank(std::span<const StateTrajectory> trajectories,
                         std::span<const int> labels, std::size_t n_classes,
                         const LowRankOptions& options) {
    require_uniform(trajectories);
    if (labels.size() != trajectories.size()) {
        throw std::invalid_argument("fit_lowrank: one label per trajectory required");
    }
    if (n_classes < 1) throw std::invalid_argument("fit_lowrank: need at least one class");
    if (options.rank < 1) throw std::invalid_argument("fit_lowrank: rank must be at least 1");

    std::vector<std::vector<std::size_t>> members(n_classes);
    for (std::size_t j = 0; j < labels.size(); ++j) {
        if (labels[j] < 0 || static_cast<std::size_t>(labels[j]) >= n_classes) {
            throw std::invalid_argument("fit_lowrank: label out of range");
        }
        members[static_cast<std::size_t>(labels[j])].push_back(j);
    }
    for (std::size_t k = 0; k < n_classes; ++k) {
        if (members[k].empty()) {
            throw std::invalid_argument("fit_lowrank: class " + std::to_string(k) +
                                        " has no training patterns");
        }
    }

    const std::size_t t_len = trajectories.front().length();
    const std::size_t n = trajectories.front().dim();

    LowRankModel model;
    model.n_classes = n_classes;
    model.length = t_len;
    model.rank = options.rank;
    model.centered = options.center;
    model.norm = options.norm;
    model.bases.resize(n_classes);
    model.effective_rank.resize(n_classes);
    if (options.center) model.means.resize(n_classes);

    for (std::size_t k = 0; k < n_classes; ++k) {
        const auto& idx = members[k];
        const std::size_t r_eff = std::min({options.rank, n, idx.size()});
        model.bases[k].reserve(t_len);
        model.effective_rank[k].assign(t_len, r_eff);
        if (options.center) model.means[k].resize(t_len);
        Matrix x(n, idx.size());
        for (std::size_t t = 0; t < t_len; ++t) {
            for (std::size_t j = 0; j < idx.size(); ++j) {
                const auto s = trajectories[idx[j]].state(t);
                for (std::size_t i = 0; i < n; ++i) x(i, j) = s[i];
            }
            if (options.center) {
                std::vector<double>& mu = model.means[k][t];
                mu.assign(n, 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < idx.size(); ++j) mu[i] += x(i, j);
                    mu[i] /= static_cast<double>(idx.size());
                    for (std::size_t j = 0; j < idx.size(); ++j) x(i, j) -= mu[i];
                }
            }
            model.bases[k].push_back(principal_components(x, r_eff));
        }
    }
    return model;
}

ClassificationResult score_lowrank(const LowRankModel& model, const StateTrajectory& trajectory) {
    if (trajectory.length() != model.length) {
        throw std::invalid_argument("score_lowrank: trajectory length does not match model");
    }
    if (model.n_classes == 0 || trajectory.dim() != model.bases.front().front().dim) {
        throw std::invalid_argument("score_lowrank: trajectory dimension does not match model");
    }

    std::vector<double> z(model.n_classes, 0.0);
    std::vector<double> v;
    for (std::size_t k = 0; k < model.n_classes; ++k) {
        for (std::size_t t = 0; t < model.length; ++t) {
            const auto x = trajectory.state(t);
            const OrthonormalBasis& u = model.bases[k][t];
            double full;  // ‖x − μ‖²
            if (model.centered) {
                const std::vector<double>& mu = model.means[k][t];
                v.assign(x.begin(), x.end());
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= mu[i];
                full = dot(v, v);
            } else {
                full = dot(x, x);
            }
            double proj = 0.0;  // ‖Uᵀ(x − μ)‖²
            for (std::size_t r = 0; r < u.rank; ++r) {
                double s = 0.0;
                if (model.centered) {
                    for (std::size_t i = 0; i < u.dim; ++i) s += u.columns(i, r) * v[i];
                } else {
                    for (std::size_t i = 0; i < u.dim; ++i) s += u.columns(i, r) * x[i];
                }
                proj += s * s;
            }
            const double sq = std::max(full - proj, 0.0);
            z[k] += model.norm == ResidualNorm::L2 ? std::sqrt(sq) : sq;
        }
    }
    return {decide_min(z), std::move(z)};
}

}  // namespace esn

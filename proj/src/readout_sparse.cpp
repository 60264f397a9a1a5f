#include "esn/readout_sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace esn {

namespace {

constexpr double kNonzeroThreshold = 1e-8;  // |w| above this counts as nonzero
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-11;

}  // namespace

// ---------------------------------------------------------------------------
// Simplex
// ---------------------------------------------------------------------------

LpResult solve_lp(const LinearProgram& lp, std::span<const std::size_t> start_basis) {
    const std::size_t m = lp.a.rows();
    const std::size_t n = lp.a.cols();
    if (lp.b.size() != m || lp.c.size() != n) {
        throw std::invalid_argument("solve_lp: inconsistent program dimensions");
    }
    const std::size_t width = n + m + 1;  // vars, slacks, rhs
    const std::size_t rhs = n + m;

    // Row m is the reduced-cost row; its rhs holds −objective.
    Matrix tab(m + 1, width);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tab(i, j) = lp.a(i, j);
        tab(i, n + i) = 1.0;
        tab(i, rhs) = lp.b[i];
    }
    for (std::size_t j = 0; j < n; ++j) tab(m, j) = lp.c[j];

    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

    auto pivot = [&](std::size_t prow, std::size_t pcol) {
        const double pv = tab(prow, pcol);
        if (std::abs(pv) < kPivotTol) {
            throw std::runtime_error("solve_lp: degenerate pivot element");
        }
        double* pr = &tab(prow, 0);
        for (std::size_t j = 0; j < width; ++j) pr[j] /= pv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == prow) continue;
            const double f = tab(i, pcol);
            if (f == 0.0) continue;
            double* ri = &tab(i, 0);
            for (std::size_t j = 0; j < width; ++j) ri[j] -= f * pr[j];
        }
        basis[prow] = pcol;
    };

    if (!start_basis.empty()) {
        if (start_basis.size() != m) {
            throw std::invalid_argument("solve_lp: start basis must name one column per row");
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (start_basis[i] >= n + m) {
                throw std::invalid_argument("solve_lp: start basis column out of range");
            }
            if (start_basis[i] != n + i) pivot(i, start_basis[i]);
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (tab(i, rhs) < -1e-9) {
            throw std::invalid_argument("solve_lp: start basis is not feasible");
        }
        if (tab(i, rhs) < 0.0) tab(i, rhs) = 0.0;
    }

    const std::size_t bland_after = 10 * (n + m) + 1000;
    LpResult result;
    for (std::size_t iter = 0;; ++iter) {
        if (iter > 50000) throw std::runtime_error("solve_lp: iteration limit exceeded");
        const bool bland = iter >= bland_after;

        std::size_t enter = width;
        double best = -kCostTol;
        for (std::size_t j = 0; j < n + m; ++j) {
            const double rc = tab(m, j);
            if (rc < best) {
                best = rc;
                enter = j;
                if (bland) break;  // lowest index with negative cost
            }
        }
        if (enter == width) {
            result.iterations = iter;
            break;  // optimal
        }

        std::size_t leave = m;
        double best_ratio = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double aij = tab(i, enter);
            if (aij <= kPivotTol) continue;
            const double ratio = tab(i, rhs) / aij;
            if (leave == m || ratio < best_ratio - 1e-12 ||
                (std::abs(ratio - best_ratio) <= 1e-12 && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave == m) throw std::runtime_error("solve_lp: problem is unbounded");
        pivot(leave, enter);
        if (tab(leave, rhs) < 0.0) tab(leave, rhs) = 0.0;
    }

    result.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) result.x[basis[i]] = tab(i, rhs);
    }
    result.objective = -tab(m, rhs);
    return result;
}

// ---------------------------------------------------------------------------
// Dantzig selector
// ---------------------------------------------------------------------------

namespace {

// Per-row program in variables [w⁺(mk), w⁻(mk), extra], where extra is the
// single bound s (MaxAbsEntry) or one e_i per constraint pair (InducedLinf).
struct RowProgram {
    LinearProgram lp;
    std::vector<std::size_t> basis;
    std::size_t mk = 0;
};

RowProgram build_row_program(const Matrix& g, std::span<const double> cvec, double lambda,
                             DantzigNorm norm) {
    const std::size_t mk = cvec.size();
    RowProgram rp;
    rp.mk = mk;
    const bool maxabs = norm == DantzigNorm::MaxAbsEntry;
    const std::size_t extra = maxabs ? 1 : mk;
    const std::size_t nv = 2 * mk + extra;
    const std::size_t mr = 2 * mk;

    rp.lp.a = Matrix(mr, nv);
    rp.lp.b.assign(mr, 0.0);
    rp.lp.c.assign(nv, lambda);
    for (std::size_t e = 0; e < extra; ++e) rp.lp.c[2 * mk + e] = 1.0;

    for (std::size_t i = 0; i < mk; ++i) {
        const std::size_t rp_row = 2 * i;      // +side:  Σ w·g − bound ≤  c_i
        const std::size_t rm_row = 2 * i + 1;  // −side: −Σ w·g − bound ≤ −c_i
        for (std::size_t a = 0; a < mk; ++a) {
            const double gv = g(a, i);
            rp.lp.a(rp_row, a) = gv;
            rp.lp.a(rp_row, mk + a) = -gv;
            rp.lp.a(rm_row, a) = -gv;
            rp.lp.a(rm_row, mk + a) = gv;
        }
        const std::size_t bound_col = maxabs ? 2 * mk : 2 * mk + i;
        rp.lp.a(rp_row, bound_col) = -1.0;
        rp.lp.a(rm_row, bound_col) = -1.0;
        rp.lp.b[rp_row] = cvec[i];
        rp.lp.b[rm_row] = -cvec[i];
    }

    // Feasible start vertex: w = 0 with the bound variables at |c|.
    rp.basis.resize(mr);
    for (std::size_t i = 0; i < mr; ++i) rp.basis[i] = nv + i;  // slacks
    if (maxabs) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < mk; ++i) {
            if (std::abs(cvec[i]) > std::abs(cvec[arg])) arg = i;
        }
        if (std::abs(cvec[arg]) > 0.0) {
            const std::size_t tight = cvec[arg] > 0.0 ? 2 * arg + 1 : 2 * arg;
            rp.basis[tight] = 2 * mk;  // s basic in the binding row
        }
    } else {
        for (std::size_t i = 0; i < mk; ++i) {
            const std::size_t tight = cvec[i] > 0.0 ? 2 * i + 1 : 2 * i;
            rp.basis[tight] = 2 * mk + i;  // e_i basic in its binding row
        }
    }
    return rp;
}

}  // namespace

DantzigSolution dantzig_solve(const Matrix& states, const Matrix& targets,
                              const DantzigOptions& options) {
    states.ensure_finite("dantzig_solve: states");
    targets.ensure_finite("dantzig_solve: targets");
    if (states.cols() != targets.cols()) {
        throw std::invalid_argument("dantzig_solve: states and targets column counts disagree");
    }
    if (!(options.lambda > 0.0) || !std::isfinite(options.lambda)) {
        throw std::invalid_argument("dantzig_solve: lambda must be a positive real");
    }

    const std::size_t n = states.rows();
    const std::size_t k_rows = targets.rows();

    std::vector<double> d(n);
    std::vector<std::size_t> keep;
    DantzigSolution sol;
    sol.weights = Matrix(k_rows, n, 0.0);
    sol.objectives.assign(k_rows, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = norm2(states.row(i));
        if (d[i] > 0.0) {
            keep.push_back(i);
        } else {
            sol.excluded.push_back(i);
        }
    }
    if (keep.empty()) return sol;  // all-zero states: W = 0, objectives 0

    const std::size_t mk = keep.size();
    Matrix g(mk, mk);  // g(a, i) = ⟨row keep[a], row keep[i]⟩ / D[keep[i]]
    for (std::size_t a = 0; a < mk; ++a) {
        for (std::size_t i = 0; i < mk; ++i) {
            g(a, i) = dot(states.row(keep[a]), states.row(keep[i])) / d[keep[i]];
        }
    }

    std::vector<double> cvec(mk);
    for (std::size_t k = 0; k < k_rows; ++k) {
        for (std::size_t i = 0; i < mk; ++i) {
            cvec[i] = dot(targets.row(k), states.row(keep[i])) / d[keep[i]];
        }
        RowProgram rp = build_row_program(g, cvec, options.lambda, options.norm);
        const LpResult res = solve_lp(rp.lp, rp.basis);
        for (std::size_t a = 0; a < mk; ++a) {
            sol.weights(k, keep[a]) = res.x[a] - res.x[mk + a];
        }
        sol.objectives[k] = res.objective;
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Sparse readout
// ---------------------------------------------------------------------------

SparseReadout fit_sparse(std::span<const StateTrajectory> trajectories, const Matrix& targets,
                         const DantzigOptions& options) {
    require_uniform(trajectories);
    if (targets.cols() != trajectories.size()) {
        throw std::invalid_argument("fit_sparse: one target column per trajectory required");
    }
    const std::size_t t_len = trajectories.front().length();
    const std::size_t n = trajectories.front().dim();
    const std::size_t k_rows = targets.rows();

    SparseReadout model;
    model.n_classes = k_rows;
    model.n_nodes = n;
    model.lambda = options.lambda;
    model.norm = options.norm;
    model.weights.resize(t_len);
    model.objectives.resize(t_len);
    model.sparsity.resize(t_len);

    for (std::size_t t = 0; t < t_len; ++t) {
        const DantzigSolution sol = dantzig_solve(states_at(trajectories, t), targets, options);
        model.objectives[t] = sol.objectives;
        model.weights[t].resize(k_rows);
        std::size_t nnz = 0;
        for (std::size_t k = 0; k < k_rows; ++k) {
            SparseWeightRow& row = model.weights[t][k];
            for (std::size_t i = 0; i < n; ++i) {
                const double w = sol.weights(k, i);
                if (std::abs(w) > kNonzeroThreshold) {
                    row.index.push_back(i);
                    row.value.push_back(w);
                    ++nnz;
                }
            }
        }
        model.sparsity[t] = static_cast<double>(nnz) / static_cast<double>(k_rows * n);
    }
    return model;
}

Matrix sparse_weights_at(const SparseReadout& model, std::size_t t) {
    if (t >= model.length()) throw std::invalid_argument("sparse_weights_at: t out of range");
    Matrix w(model.n_classes, model.n_nodes, 0.0);
    for (std::size_t k = 0; k < model.n_classes; ++k) {
        const SparseWeightRow& row = model.weights[t][k];
        for (std::size_t j = 0; j < row.index.size(); ++j) {
            w(k, row.index[j]) = row.value[j];
        }
    }
    return w;
}

ClassificationResult classify_sparse(const SparseReadout& model,
                                     const StateTrajectory& trajectory) {
    if (trajectory.length() != model.length() || trajectory.dim() != model.n_nodes) {
        throw std::invalid_argument("classify_sparse: trajectory does not match model");
    }
    std::vector<double> z(model.n_classes, 0.0);
    for (std::size_t t = 0; t < model.length(); ++t) {
        const auto x = trajectory.state(t);
        for (std::size_t k = 0; k < model.n_classes; ++k) {
            const SparseWeightRow& row = model.weights[t][k];
            double s = 0.0;
            for (std::size_t j = 0; j < row.index.size(); ++j) {
                s += row.value[j] * x[row.index[j]];
            }
            z[k] += s;
        }
    }
    return {decide_max(z), std::move(z)};
}

}  // namespace esn

#pragma once

// Shared test utilities. The Eigen-based oracles live here, deliberately
// separate from the library implementation (which has no Eigen dependency),
// so every oracle comparison crosses two independent code paths.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "esn/linalg.hpp"
#include "esn/rng.hpp"

namespace test_support {

inline Eigen::MatrixXd to_eigen(const esn::Matrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    }
    return e;
}

inline esn::Matrix random_matrix(esn::Rng& rng, std::size_t rows, std::size_t cols,
                                 double lo = -1.0, double hi = 1.0) {
    esn::Matrix m(rows, cols);
    for (double& v : m.storage()) v = rng.uniform(lo, hi);
    return m;
}

/// max |eigenvalue| via a dense eigensolver (the independent oracle for
/// esn::spectral_radius).
inline double oracle_spectral_radius(const esn::Matrix& m) {
    const Eigen::EigenSolver<Eigen::MatrixXd> solver(to_eigen(m), false);
    double r = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        r = std::max(r, std::abs(solver.eigenvalues()[i]));
    }
    return r;
}

/// Leading left singular vectors via a full SVD, with the same sign
/// convention as esn::principal_components (largest-magnitude entry positive).
inline Eigen::MatrixXd oracle_left_singular_vectors(const esn::Matrix& m, std::size_t rank) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m), Eigen::ComputeThinU);
    Eigen::MatrixXd u = svd.matrixU().leftCols(static_cast<Eigen::Index>(rank));
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        Eigen::Index arg = 0;
        u.col(c).cwiseAbs().maxCoeff(&arg);
        if (u(arg, c) < 0.0) u.col(c) = -u.col(c);
    }
    return u;
}

inline double max_abs_diff(const esn::Matrix& a, const Eigen::MatrixXd& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            m = std::max(m, std::abs(a(i, j) - b(static_cast<Eigen::Index>(i),
                                                 static_cast<Eigen::Index>(j))));
        }
    }
    return m;
}

/// Dantzig objective for a single class row, evaluated from its definition:
/// ‖(wᵀX − y)·Xᵀ·D⁻¹‖_∞ + lambda·‖w‖₁ with D_i = ‖row i of X‖₂.
inline double dantzig_objective(const esn::Matrix& states, std::span<const double> y_row,
                                std::span<const double> w, double lambda) {
    const std::size_t n = states.rows();
    const std::size_t j = states.cols();
    std::vector<double> resid(j);
    for (std::size_t col = 0; col < j; ++col) {
        double s = -y_row[col];
        for (std::size_t i = 0; i < n; ++i) s += w[i] * states(i, col);
        resid[col] = s;
    }
    double linf = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = esn::norm2(states.row(i));
        if (d == 0.0) continue;
        linf = std::max(linf, std::abs(esn::dot(resid, states.row(i)) / d));
    }
    double l1 = 0.0;
    for (double v : w) l1 += std::abs(v);
    return linf + lambda * l1;
}

/// Exhaustive 2-D grid search over w ∈ [−2, 2]² at `step`, refined locally at
/// step/100. Returns the best objective found (an upper bound on the optimum
/// that is within O(step·‖∇‖) of it).
inline double dantzig_grid_oracle(const esn::Matrix& states, std::span<const double> y_row,
                                  double lambda, double step = 1e-3) {
    // precomputed correlations make the grid sweep O(1) per point
    const std::size_t j = states.cols();
    double g[2][2];
    double c[2];
    double d[2];
    for (std::size_t i = 0; i < 2; ++i) d[i] = esn::norm2(states.row(i));
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t i = 0; i < 2; ++i) {
            g[a][i] = d[i] == 0.0 ? 0.0 : esn::dot(states.row(a), states.row(i)) / d[i];
        }
    }
    for (std::size_t i = 0; i < 2; ++i) {
        double s = 0.0;
        for (std::size_t col = 0; col < j; ++col) s += y_row[col] * states(i, col);
        c[i] = d[i] == 0.0 ? 0.0 : s / d[i];
    }
    auto objective = [&](double w0, double w1) {
        double linf = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            if (d[i] == 0.0) continue;
            linf = std::max(linf, std::abs(w0 * g[0][i] + w1 * g[1][i] - c[i]));
        }
        return linf + lambda * (std::abs(w0) + std::abs(w1));
    };

    double best = objective(0.0, 0.0);
    double best_w0 = 0.0, best_w1 = 0.0;
    const long half = std::lround(2.0 / step);
    for (long a = -half; a <= half; ++a) {
        for (long b = -half; b <= half; ++b) {
            const double v = objective(static_cast<double>(a) * step,
                                       static_cast<double>(b) * step);
            if (v < best) {
                best = v;
                best_w0 = static_cast<double>(a) * step;
                best_w1 = static_cast<double>(b) * step;
            }
        }
    }
    const double fine = step / 100.0;
    for (long a = -100; a <= 100; ++a) {
        for (long b = -100; b <= 100; ++b) {
            const double v = objective(best_w0 + static_cast<double>(a) * fine,
                                       best_w1 + static_cast<double>(b) * fine);
            best = std::min(best, v);
        }
    }
    return best;
}

/// Scratch directory for file-based tests; unique per call.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("esn_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace test_support

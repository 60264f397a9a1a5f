#include "esn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "esn/rng.hpp"

namespace esn {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    require(rows > 0 && cols > 0, "Matrix: dimensions must be positive");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    require(rows.size() > 0 && rows.begin()->size() > 0, "Matrix: dimensions must be positive");
    Matrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        require(r.size() == m.cols_, "Matrix: ragged initializer rows");
        std::size_t j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    m.ensure_finite("Matrix");
    return m;
}

void Matrix::ensure_finite(const char* what) const {
    if (data_.empty()) throw std::invalid_argument(std::string(what) + ": empty matrix");
    for (double v : data_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + ": non-finite entry");
        }
    }
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "multiply: inner dimensions disagree");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i).data();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* bk = b.row(k).data();
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
    require(a.cols() == x.size(), "matvec: dimension mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

Matrix gram(const Matrix& a) {
    Matrix g(a.rows(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = i; j < a.rows(); ++j) {
            const double v = dot(a.row(i), a.row(j));
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (double v : a.storage()) s += v * v;
    return std::sqrt(s);
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double v : a.storage()) m = std::max(m, std::abs(v));
    return m;
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

OrthonormalBasis make_orthonormal_basis(Matrix columns) {
    columns.ensure_finite("OrthonormalBasis");
    const std::size_t dim = columns.rows();
    const std::size_t rank = columns.cols();
    require(rank <= dim, "OrthonormalBasis: rank exceeds dimension");
    for (std::size_t a = 0; a < rank; ++a) {
        for (std::size_t b = a; b < rank; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < dim; ++i) s += columns(i, a) * columns(i, b);
            const double target = (a == b) ? 1.0 : 0.0;
            if (std::abs(s - target) > 1e-8) {
                throw std::invalid_argument("OrthonormalBasis: columns not orthonormal");
            }
        }
    }
    return OrthonormalBasis{dim, rank, std::move(columns)};
}

// ---------------------------------------------------------------------------
// Cholesky / SPD solve
// ---------------------------------------------------------------------------

bool cholesky_inplace(Matrix& m) {
    const std::size_t n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("cholesky: matrix not square");
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(m(i, i)));
    const double floor = scale * n * 1e-15;
    for (std::size_t j = 0; j < n; ++j) {
        double d = m(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= m(j, k) * m(j, k);
        if (!(d > floor) || !std::isfinite(d)) return false;
        const double l = std::sqrt(d);
        m(j, j) = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= m(i, k) * m(j, k);
            m(i, j) = s / l;
        }
    }
    return true;
}

Matrix solve_spd(Matrix spd, const Matrix& rhs) {
    require(spd.rows() == rhs.rows(), "solve_spd: dimension mismatch");
    if (!cholesky_inplace(spd)) {
        throw std::runtime_error("solve_spd: matrix not positive definite");
    }
    const std::size_t n = spd.rows();
    Matrix x = rhs;
    // L y = rhs, then Lᵀ x = y, per column
    for (std::size_t c = 0; c < rhs.cols(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= spd(i, k) * x(k, c);
            x(i, c) = s / spd(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = x(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) s -= spd(k, ii) * x(k, c);
            x(ii, c) = s / spd(ii, ii);
        }
    }
    return x;
}

// ---------------------------------------------------------------------------
// Ridge solve
// ---------------------------------------------------------------------------

Matrix ridge_from_gram(const Matrix& g, const Matrix& cross, double lambda) {
    require(g.rows() == g.cols(), "ridge_from_gram: gram not square");
    require(cross.cols() == g.rows(), "ridge_from_gram: cross/gram mismatch");
    require(lambda >= 0.0 && std::isfinite(lambda), "ridge: lambda must be a nonnegative real");
    Matrix sys = g;
    for (std::size_t i = 0; i < sys.rows(); ++i) sys(i, i) += lambda;
    Matrix z;
    try {
        z = solve_spd(std::move(sys), transpose(cross));
    } catch (const std::runtime_error&) {
        if (lambda == 0.0) {
            throw std::runtime_error("ridge_solve: singular normal equations (lambda = 0)");
        }
        throw;
    }
    return transpose(z);
}

Matrix ridge_solve(const Matrix& states, const Matrix& targets, double lambda) {
    states.ensure_finite("ridge_solve: states");
    targets.ensure_finite("ridge_solve: targets");
    require(states.cols() == targets.cols(),
            "ridge_solve: states and targets must have the same number of columns");
    return ridge_from_gram(gram(states), multiply(targets, transpose(states)), lambda);
}

// ---------------------------------------------------------------------------
// Jacobi eigendecomposition (symmetric)
// ---------------------------------------------------------------------------

SymmetricEigen jacobi_eigen_symmetric(const Matrix& sym) {
    require(sym.rows() == sym.cols(), "jacobi: matrix not square");
    const std::size_t n = sym.rows();
    Matrix a = sym;
    Matrix v = Matrix::identity(n);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };

    const double tol = 1e-14 * std::max(frobenius_norm(a), 1e-300);
    for (int sweep = 0; sweep < 60 && off_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= tol / (n * n)) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    SymmetricEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
    out.vectors = std::move(v);
    return out;
}

// ---------------------------------------------------------------------------
// Principal components
// ---------------------------------------------------------------------------

OrthonormalBasis principal_components(const Matrix& states, std::size_t rank) {
    states.ensure_finite("principal_components: states");
    require(rank >= 1, "principal_components: rank must be at least 1");
    require(rank <= std::min(states.rows(), states.cols()),
            "principal_components: rank exceeds min(rows, cols)");
    if (max_abs(states) == 0.0) {
        throw std::runtime_error("principal_components: degenerate state matrix");
    }

    const SymmetricEigen eig = jacobi_eigen_symmetric(gram(states));
    const std::size_t n = states.rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return eig.values[a] > eig.values[b]; });

    Matrix cols(n, rank);
    for (std::size_t r = 0; r < rank; ++r) {
        const std::size_t src = order[r];
        // sign convention: largest-magnitude entry positive
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = std::abs(eig.vectors(i, src));
            if (m > best) {
                best = m;
                arg = i;
            }
        }
        const double sign = eig.vectors(arg, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) cols(i, r) = sign * eig.vectors(i, src);
    }
    return make_orthonormal_basis(std::move(cols));
}

// ---------------------------------------------------------------------------
// Spectral radius
// ---------------------------------------------------------------------------

namespace {

// Gelfand's formula via repeated squaring with norm accumulation:
//   (1/2^j)·ln‖M^(2^j)‖ → ln ρ(M).
// After 40 squarings the truncation term ln(√N·κ)/2^40 is far below 1e-10
// for any plausible conditioning, and nilpotent matrices hit an exact zero.
double radius_by_squaring(const Matrix& m) {
    const double nf = frobenius_norm(m);
    if (nf == 0.0) return 0.0;
    Matrix b = m;
    for (double& v : b.storage()) v /= nf;
    double acc = std::log(nf);
    double w = 0.5;
    for (int step = 0; step < 40; ++step) {
        Matrix c = multiply(b, b);
        const double t = frobenius_norm(c);
        if (t == 0.0) return 0.0;
        if (!std::isfinite(t)) break;
        for (double& v : c.storage()) v /= t;
        b = std::move(c);
        acc += std::log(t) * w;
        w *= 0.5;
    }
    return std::exp(acc);
}

}  // namespace

double spectral_radius(const Matrix& square) {
    square.ensure_finite("spectral_radius");
    if (square.rows() != square.cols()) {
        throw std::invalid_argument("spectral_radius: matrix not square");
    }
    const std::size_t n = square.rows();
    if (max_abs(square) == 0.0) return 0.0;
    if (n == 1) return std::abs(square(0, 0));

    // Deterministic pseudo-random start, generic w.r.t. invariant subspaces.
    Rng rng(0x5eed0051ULL);
    std::vector<double> x_cur(n), x_prev;
    for (double& v : x_cur) v = rng.uniform(-1.0, 1.0);
    const double n0 = norm2(x_cur);
    for (double& v : x_cur) v /= n0;

    const double tiny = 1e-280 * frobenius_norm(square);
    double s_prev = 0.0;  // ‖M·x_prev‖, i.e. the scale that maps x_prev to x_cur
    double prev_est = -1.0;
    int stable = 0;

    for (int it = 0; it < 5000; ++it) {
        std::vector<double> y = matvec(square, x_cur);
        const double s = norm2(y);
        if (s < tiny) break;  // direction collapsed; settle by squaring
        for (double& v : y) v /= s;

        double est = -1.0;
        if (!x_prev.empty()) {
            // With unit iterates u = x_prev, x_cur, y and scales
            //   M·u = s_prev·x_cur,  M²·u = s_prev·s·y,
            // fit (M² + p·M + q·I)u ≈ 0; the roots of λ² + pλ + q give the
            // dominant magnitude for a real eigenvalue or a complex pair.
            const double cc = s_prev * s;
            const double aa = s_prev * s_prev;
            const double ab = s_prev * dot(x_cur, x_prev);
            const double ac = aa * s * dot(x_cur, y);
            const double bc = cc * dot(x_prev, y);
            const double det = aa - ab * ab;  // aa·bb − ab², bb = 1
            if (det > 1e-12 * aa) {
                const double p = (-ac + bc * ab) / det;
                const double q = (-bc * aa + ac * ab) / det;
                double resid = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double r = cc * y[i] + p * s_prev * x_cur[i] + q * x_prev[i];
                    resid += r * r;
                }
                if (std::sqrt(resid) <= 1e-9 * cc) {
                    const double disc = p * p - 4.0 * q;
                    double cand;
                    if (disc < 0.0) {
                        cand = std::sqrt(q);
                    } else {
                        const double rt = std::sqrt(disc);
                        cand = std::max(std::abs((-p + rt) / 2.0), std::abs((-p - rt) / 2.0));
                    }
                    if (std::isfinite(cand)) est = cand;
                }
            } else if (std::abs(dot(y, x_cur)) >= 1.0 - 1e-9) {
                // Iterates collinear: plain magnitude tracking.
                est = s;
            }
        }

        if (est >= 0.0 && prev_est >= 0.0 &&
            std::abs(est - prev_est) <= 1e-9 * std::max(est, 1e-300)) {
            if (++stable >= 3) return est;
        } else {
            stable = 0;
        }
        prev_est = est;

        x_prev = x_cur;
        x_cur = std::move(y);
        s_prev = s;
    }
    return radius_by_squaring(square);
}

}  // namespace esn

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "esn/readout_linear.hpp"
#include "esn/rng.hpp"
#include "test_support.hpp"

using esn::Matrix;
using esn::StateTrajectory;
using test_support::random_matrix;

namespace {

// J trajectories of length T over N nodes with random states.
std::vector<StateTrajectory> random_trajectories(esn::Rng& rng, std::size_t j, std::size_t t,
                                                 std::size_t n) {
    std::vector<StateTrajectory> out;
    out.reserve(j);
    for (std::size_t i = 0; i < j; ++i) {
        out.push_back(StateTrajectory{random_matrix(rng, t, n)});
    }
    return out;
}

// Trajectory whose state is the same row vector at every timestep.
StateTrajectory constant_trajectory(std::span<const double> state, std::size_t t_len) {
    Matrix states(t_len, state.size());
    for (std::size_t t = 0; t < t_len; ++t) {
        std::copy(state.begin(), state.end(), states.row(t).begin());
    }
    return StateTrajectory{std::move(states)};
}

}  // namespace

TEST_CASE("indicator builders") {
    const std::vector<int> labels{0, 2, 1, 0};
    const Matrix y = esn::indicator_matrix(labels, 3);
    CHECK(y(0, 0) == 1.0);
    CHECK(y(2, 1) == 1.0);
    CHECK(y(1, 2) == 1.0);
    CHECK(y(0, 3) == 1.0);
    CHECK(y(1, 0) == 0.0);

    const Matrix ym = esn::indicator_matrix(labels, 3, -1.0);
    CHECK(ym(1, 0) == -1.0);

    const std::vector<int> twoclass{0, 1, 1};
    const Matrix ys = esn::signed_indicator(twoclass);
    CHECK(ys(0, 0) == 1.0);
    CHECK(ys(0, 1) == -1.0);

    CHECK_THROWS_AS(esn::indicator_matrix(std::vector<int>{3}, 3), std::invalid_argument);
    CHECK_THROWS_AS(esn::signed_indicator(std::vector<int>{2}), std::invalid_argument);
}

TEST_CASE("decision rules") {
    // K >= 2: argmax, lowest index wins ties
    CHECK(esn::decide_max(std::vector<double>{0.2, 0.9, 0.9}) == 1);
    CHECK(esn::decide_max(std::vector<double>{0.0, 0.0}) == 0);
    // K = 1: signed two-class rule, z = 0 resolves to class 0
    CHECK(esn::decide_max(std::vector<double>{0.4}) == 0);
    CHECK(esn::decide_max(std::vector<double>{-0.4}) == 1);
    CHECK(esn::decide_max(std::vector<double>{0.0}) == 0);
    CHECK(esn::decide_min(std::vector<double>{0.5, 0.1, 0.1}) == 1);

    // scaling all scores by c > 0 never changes the decision
    esn::Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> z(4);
        for (double& v : z) v = rng.uniform(-1.0, 1.0);
        const std::size_t base = esn::decide_max(z);
        for (double c : {0.001, 3.0, 1e6}) {
            std::vector<double> scaled = z;
            for (double& v : scaled) v *= c;
            CHECK(esn::decide_max(scaled) == base);
        }
    }
}

TEST_CASE("fit_pointwise with T = 1 reduces to a single ridge solve") {
    esn::Rng rng(10);
    const auto trajectories = random_trajectories(rng, 6, 1, 4);
    const Matrix targets = random_matrix(rng, 2, 6);
    const auto model = esn::fit_pointwise(trajectories, targets, 1e-3);
    REQUIRE(model.length() == 1);
    const Matrix direct = esn::ridge_solve(esn::states_at(trajectories, 0), targets, 1e-3);
    CHECK(model.weights[0].storage() == direct.storage());
}

TEST_CASE("fit_pointwise recovers targets exactly on identity states") {
    // Pattern j holds e_j at every timestep, so X_tr(t) = I and W(t) = y.
    const std::size_t n = 4, t_len = 3;
    std::vector<StateTrajectory> trajectories;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        trajectories.push_back(constant_trajectory(e, t_len));
    }
    const std::vector<int> labels{0, 1, 2, 3};
    const Matrix y = esn::indicator_matrix(labels, 4);
    const auto model = esn::fit_pointwise(trajectories, y, 0.0);
    for (std::size_t t = 0; t < t_len; ++t) {
        CHECK(esn::max_abs(esn::multiply(model.weights[t], Matrix::identity(4))) ==
              doctest::Approx(1.0).epsilon(1e-10));
        for (std::size_t a = 0; a < 4; ++a) {
            for (std::size_t b = 0; b < 4; ++b) {
                CHECK(model.weights[t](a, b) == doctest::Approx(y(a, b)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("fit_pointwise satisfies the stationarity identity per timestep") {
    esn::Rng rng(20);
    const auto trajectories = random_trajectories(rng, 4, 5, 3);
    const std::vector<int> labels{0, 1, 0, 1};
    const Matrix y = esn::indicator_matrix(labels, 2);
    const double lambda = 1e-4;
    const auto model = esn::fit_pointwise(trajectories, y, lambda);
    for (std::size_t t = 0; t < 5; ++t) {
        const Matrix x = esn::states_at(trajectories, t);
        Matrix resid = esn::multiply(esn::multiply(model.weights[t], x), esn::transpose(x));
        const Matrix yx = esn::multiply(y, esn::transpose(x));
        for (std::size_t i = 0; i < resid.storage().size(); ++i) {
            resid.storage()[i] += lambda * model.weights[t].storage()[i] - yx.storage()[i];
        }
        CHECK(esn::max_abs(resid) < 1e-10);
    }
}

TEST_CASE("classify_pointwise accumulates scores over time") {
    // W(t) = I for all t; trajectory sits on e_2, so z = T·e_2.
    const std::size_t t_len = 5;
    esn::PointwiseReadout model;
    model.lambda = 0.0;
    for (std::size_t t = 0; t < t_len; ++t) model.weights.push_back(Matrix::identity(3));
    std::vector<double> e2{0.0, 0.0, 1.0};
    const auto res = esn::classify_pointwise(model, constant_trajectory(e2, t_len));
    CHECK(res.class_index == 2);
    CHECK(res.scores[2] == doctest::Approx(5.0));
    CHECK(res.scores[0] == 0.0);

    // all-zero trajectory: z = 0, class 0 by the tie rule
    std::vector<double> zero(3, 0.0);
    const auto res0 = esn::classify_pointwise(model, constant_trajectory(zero, t_len));
    CHECK(res0.class_index == 0);
    for (double v : res0.scores) CHECK(v == 0.0);

    CHECK_THROWS_AS(esn::classify_pointwise(model, constant_trajectory(e2, 4)),
                    std::invalid_argument);
}

TEST_CASE("fit_endpoint matches a direct ridge solve on final states") {
    esn::Rng rng(30);
    const auto trajectories = random_trajectories(rng, 7, 4, 5);
    const Matrix targets = random_matrix(rng, 3, 7);
    const auto model = esn::fit_endpoint(trajectories, targets, 1e-2);
    const Matrix direct = esn::ridge_solve(esn::states_at(trajectories, 3), targets, 1e-2);
    CHECK(model.weights.storage() == direct.storage());

    // zero targets → zero weights
    const auto zero_model = esn::fit_endpoint(trajectories, Matrix(3, 7, 0.0), 1e-2);
    CHECK(esn::max_abs(zero_model.weights) == 0.0);

    // T = 1: endpoint and pointwise coincide
    const auto one = random_trajectories(rng, 5, 1, 3);
    const Matrix y1 = random_matrix(rng, 2, 5);
    CHECK(esn::fit_endpoint(one, y1, 0.1).weights.storage() ==
          esn::fit_pointwise(one, y1, 0.1).weights[0].storage());
}

TEST_CASE("classify_endpoint uses only the final state") {
    esn::EndpointReadout model{Matrix::identity(2), 0.0};
    Matrix states = Matrix::from_rows({{5.0, 0.0}, {0.0, 1.0}});
    const auto res = esn::classify_endpoint(model, StateTrajectory{states});
    CHECK(res.class_index == 1);  // final state (0, 1)
    CHECK(res.scores[1] == 1.0);
}

TEST_CASE("fit_global collapses to fit_endpoint at T = 1") {
    esn::Rng rng(40);
    const auto one = random_trajectories(rng, 6, 1, 4);
    const Matrix y = random_matrix(rng, 2, 6);
    const auto g = esn::fit_global(one, y, 1e-3);
    const auto e = esn::fit_endpoint(one, y, 1e-3);
    for (std::size_t i = 0; i < g.weights.storage().size(); ++i) {
        CHECK(g.weights.storage()[i] ==
              doctest::Approx(e.weights.storage()[i]).epsilon(1e-12));
    }
}

TEST_CASE("fit_global equals fit_pointwise on time-constant trajectories at lambda = 0") {
    esn::Rng rng(41);
    const std::size_t j = 7, n = 3, t_len = 4;
    std::vector<StateTrajectory> trajectories;
    for (std::size_t i = 0; i < j; ++i) {
        const Matrix row = random_matrix(rng, 1, n);
        trajectories.push_back(constant_trajectory(row.row(0), t_len));
    }
    const Matrix y = random_matrix(rng, 2, j);
    const auto g = esn::fit_global(trajectories, y, 0.0);
    const auto p = esn::fit_pointwise(trajectories, y, 0.0);
    for (std::size_t i = 0; i < g.weights.storage().size(); ++i) {
        CHECK(g.weights.storage()[i] ==
              doctest::Approx(p.weights[0].storage()[i]).epsilon(1e-9));
    }
}

TEST_CASE("fit_global matches ridge on the horizontally concatenated system") {
    esn::Rng rng(50);
    const std::size_t j = 5, n = 4, t_len = 3, k = 2;
    const auto trajectories = random_trajectories(rng, j, t_len, n);
    const Matrix y = random_matrix(rng, k, j);
    const double lambda = 1e-4;
    const auto model = esn::fit_global(trajectories, y, lambda);

    Matrix concat(n, j * t_len);
    Matrix y_rep(k, j * t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        const Matrix x = esn::states_at(trajectories, t);
        for (std::size_t col = 0; col < j; ++col) {
            for (std::size_t i = 0; i < n; ++i) concat(i, t * j + col) = x(i, col);
            for (std::size_t i = 0; i < k; ++i) y_rep(i, t * j + col) = y(i, col);
        }
    }
    const Matrix direct = esn::ridge_solve(concat, y_rep, lambda);
    for (std::size_t i = 0; i < model.weights.storage().size(); ++i) {
        CHECK(model.weights.storage()[i] ==
              doctest::Approx(direct.storage()[i]).epsilon(1e-8));
    }
}

TEST_CASE("classify_global: both evaluation orders agree") {
    esn::Rng rng(60);
    const esn::GlobalReadout model{random_matrix(rng, 3, 5), 1e-4};
    const StateTrajectory traj{random_matrix(rng, 6, 5)};
    const auto res = esn::classify_global(model, traj);

    std::vector<double> z(3, 0.0);  // Σ_t (W·X(t)), the other association
    for (std::size_t t = 0; t < traj.length(); ++t) {
        const auto zt = esn::matvec(model.weights, traj.state(t));
        for (std::size_t i = 0; i < 3; ++i) z[i] += zt[i];
    }
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(res.scores[i] == doctest::Approx(z[i]).epsilon(1e-10));
    }
    CHECK(res.class_index == esn::decide_max(z));
}

TEST_CASE("large lambda dampens the weights below ||y·X^T|| / lambda") {
    esn::Rng rng(70);
    const Matrix states = random_matrix(rng, 4, 10);
    const Matrix targets = random_matrix(rng, 2, 10);
    const double x2 = esn::frobenius_norm(states) * esn::frobenius_norm(states);
    const double lambda = 1e6 * x2;
    const Matrix w = esn::ridge_solve(states, targets, lambda);
    const double bound =
        esn::frobenius_norm(esn::multiply(targets, esn::transpose(states))) / lambda;
    CHECK(esn::frobenius_norm(w) <= bound * (1.0 + 1e-9));
}

TEST_CASE("separable endpoint states train to 100% at lambda = 1e-10") {
    // Two well-separated clusters, J >= N.
    esn::Rng rng(80);
    const std::size_t n = 4, j = 12;
    std::vector<StateTrajectory> trajectories;
    std::vector<int> labels;
    for (std::size_t i = 0; i < j; ++i) {
        const int cls = i % 2 == 0 ? 0 : 1;
        std::vector<double> endpoint(n);
        for (std::size_t d = 0; d < n; ++d) endpoint[d] = 0.1 * rng.uniform(-1.0, 1.0);
        endpoint[0] += cls == 0 ? 1.0 : -1.0;
        trajectories.push_back(constant_trajectory(endpoint, 2));
        labels.push_back(cls);
    }
    const Matrix y = esn::indicator_matrix(labels, 2);
    const auto model = esn::fit_endpoint(trajectories, y, 1e-10);
    for (std::size_t i = 0; i < j; ++i) {
        CHECK(esn::classify_endpoint(model, trajectories[i]).class_index ==
              static_cast<std::size_t>(labels[i]));
    }
}

TEST_CASE("inconsistent trajectory lengths are rejected") {
    esn::Rng rng(90);
    std::vector<StateTrajectory> trajectories;
    trajectories.push_back(StateTrajectory{random_matrix(rng, 3, 2)});
    trajectories.push_back(StateTrajectory{random_matrix(rng, 4, 2)});
    const Matrix y = random_matrix(rng, 1, 2);
    CHECK_THROWS_AS(esn::fit_pointwise(trajectories, y, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(esn::fit_global(trajectories, y, 0.1), std::invalid_argument);
}

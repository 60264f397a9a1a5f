#pragma once

#include <span>
#include <vector>

#include "esn/linalg.hpp"
#include "esn/reservoir.hpp"

namespace esn {

struct ClassificationResult {
    std::size_t class_index = 0;    // 0-based
    std::vector<double> scores;     // z, one entry per output row
};

/// Score-to-class rule for the linear/sparse readouts. K ≥ 2: argmax with
/// lowest-index tie-break. K = 1 is the signed two-class convention used for
/// the sine/square stream (+1 vs −1 targets): z ≥ 0 → class 0, else class 1.
std::size_t decide_max(std::span<const double> z);

/// argmin with lowest-index tie-break (residual scoring).
std::size_t decide_min(std::span<const double> z);

/// Class indicator targets: K×J, +1 in row labels[j] of column j, `nonmember`
/// elsewhere. Labels are 0-based and must be < n_classes.
Matrix indicator_matrix(std::span<const int> labels, std::size_t n_classes,
                        double nonmember = 0.0);

/// Two-class signed stream indicator: 1×J with +1 for class 0, −1 for class 1.
Matrix signed_indicator(std::span<const int> labels);

/// Collects the states of all patterns at one timestep into an N×J matrix
/// (column j = pattern j). All trajectories must share length and dimension.
Matrix states_at(std::span<const StateTrajectory> trajectories, std::size_t t);

/// Throws unless all trajectories share the same length and state dimension.
void require_uniform(std::span<const StateTrajectory> trajectories);

}  // namespace esn

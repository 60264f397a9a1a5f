#pragma once

#include <string>
#include <variant>

#include "esn/classify.hpp"
#include "esn/readout_linear.hpp"
#include "esn/readout_lowrank.hpp"
#include "esn/readout_sparse.hpp"
#include "esn/reservoir.hpp"

namespace esn {

/// A trained classifier: reservoir config + weights + one fitted readout.
/// Persisted as a magic-prefixed, versioned JSON container whose doubles
/// round-trip exactly, so a reloaded model classifies bitwise identically.
struct ModelBundle {
    ReservoirConfig config;
    ReservoirWeights weights;
    std::variant<PointwiseReadout, EndpointReadout, GlobalReadout, SparseReadout, LowRankModel>
        readout;

    /// Runs the reservoir over one input sequence (T×L) and applies the
    /// fitted readout.
    ClassificationResult classify(const Matrix& input) const;
};

void save_model(const ModelBundle& model, const std::string& path);
ModelBundle load_model(const std::string& path);

}  // namespace esn

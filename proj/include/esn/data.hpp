#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "esn/linalg.hpp"

namespace esn {

/// A collection of labeled multivariate sequences. Sequence j is a T_j×L
/// matrix (rows are timesteps); labels are 0-based class indices.
struct LabeledSequenceSet {
    std::vector<Matrix> sequences;
    std::vector<int> labels;
    std::size_t n_classes = 0;
    std::size_t n_channels = 0;
    std::string name;

    std::size_t size() const { return sequences.size(); }
    void validate() const;
};

// ---------------------------------------------------------------------------
// Synthetic sine/square stream
// ---------------------------------------------------------------------------

/// Stream of same-period segments, each independently a sine wave (class 0)
/// or a square wave (class 1) with probability 1/2. Segment t = 1…P samples:
/// sine sin(2πt/P) (ends at 0), square +1 for t ≤ P/2 then −1 (ends at −1).
/// Sequences are kept in stream order; the harness concatenates them so the
/// reservoir runs over one continuous signal.
struct SineSquareConfig {
    std::size_t period = 10;  // ≥ 4 and even
    std::size_t n_segments = 100;
    std::uint64_t seed = 1;

    void validate() const;
};

LabeledSequenceSet gen_sine_square(const SineSquareConfig& config);

/// Writes a single-channel set as CSV: segment_id,t,value,class
/// (t is 1-based within the segment, class is 1-based).
void export_csv(const LabeledSequenceSet& set, const std::string& path);

// ---------------------------------------------------------------------------
// Japanese Vowels (UCI block format)
// ---------------------------------------------------------------------------

// Per-speaker utterance counts of the published dataset files.
inline constexpr std::array<std::size_t, 9> kJvTrainCounts{30, 30, 30, 30, 30, 30, 30, 30, 30};
inline constexpr std::array<std::size_t, 9> kJvTestCounts{31, 35, 88, 44, 29, 24, 40, 50, 29};
inline constexpr std::size_t kJvChannels = 12;

/// Parses one UCI-style block file: blocks of whitespace-separated 12-field
/// rows, separated by blank lines. Block i belongs to the class given by its
/// position in per_class_counts. Throws on malformed rows (with line number)
/// or when the block count does not match the counts table.
LabeledSequenceSet load_jv_blocks(const std::string& path,
                                  std::span<const std::size_t> per_class_counts,
                                  const std::string& name);

/// Loads the published ae.train / ae.test pair (270 and 370 utterances of 9
/// speakers). Refuses files whose block counts disagree with the dataset.
std::pair<LabeledSequenceSet, LabeledSequenceSet> load_japanese_vowels(
    const std::string& train_path, const std::string& test_path);

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

/// Linearly interpolates every sequence onto `length` equispaced points
/// spanning its original duration; endpoints are preserved exactly.
/// Sequences of length 1 are replicated.
LabeledSequenceSet resample_to_length(const LabeledSequenceSet& set, std::size_t length);

/// Appends one constant channel per value (e.g. {1, 1} for two bias inputs).
LabeledSequenceSet append_bias_channels(const LabeledSequenceSet& set,
                                        std::span<const double> values);

/// Test-time Gaussian perturbation. channel_mask selects the channels that
/// receive noise (empty = all); sigma = 0 returns a bitwise-identical copy.
struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> channel_mask;  // one flag per channel, or empty
};

LabeledSequenceSet add_noise(const LabeledSequenceSet& set, const NoiseSpec& spec);

/// Concatenates all sequences (in order) into one T_total×L signal.
Matrix concat_sequences(const LabeledSequenceSet& set);

}  // namespace esn

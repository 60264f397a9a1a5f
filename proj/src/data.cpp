#include "esn/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "esn/rng.hpp"

namespace esn {

void LabeledSequenceSet::validate() const {
    if (sequences.empty() || sequences.size() != labels.size()) {
        throw std::invalid_argument("LabeledSequenceSet: sequences/labels size mismatch");
    }
    for (std::size_t j = 0; j < sequences.size(); ++j) {
        sequences[j].ensure_finite("LabeledSequenceSet: sequence");
        if (sequences[j].cols() != n_channels) {
            throw std::invalid_argument("LabeledSequenceSet: inconsistent channel count");
        }
        if (labels[j] < 0 || static_cast<std::size_t>(labels[j]) >= n_classes) {
            throw std::invalid_argument("LabeledSequenceSet: label out of range");
        }
    }
}

// ---------------------------------------------------------------------------
// Sine/square stream
// ---------------------------------------------------------------------------

void SineSquareConfig::validate() const {
    if (period < 4 || period % 2 != 0) {
        throw std::invalid_argument("SineSquareConfig: period must be even and at least 4");
    }
    if (n_segments < 1) {
        throw std::invalid_argument("SineSquareConfig: need at least one segment");
    }
}

LabeledSequenceSet gen_sine_square(const SineSquareConfig& config) {
    config.validate();
    constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
    Rng rng(config.seed);

    LabeledSequenceSet set;
    set.n_classes = 2;
    set.n_channels = 1;
    set.name = "sine_square";
    set.sequences.reserve(config.n_segments);
    set.labels.reserve(config.n_segments);
    for (std::size_t seg = 0; seg < config.n_segments; ++seg) {
        const bool sine = rng.uniform01() < 0.5;
        Matrix s(config.period, 1);
        for (std::size_t t = 1; t <= config.period; ++t) {
            double v;
            if (sine) {
                v = std::sin(kTwoPi * static_cast<double>(t) / static_cast<double>(config.period));
            } else {
                v = t <= config.period / 2 ? 1.0 : -1.0;
            }
            s(t - 1, 0) = v;
        }
        set.sequences.push_back(std::move(s));
        set.labels.push_back(sine ? 0 : 1);
    }
    return set;
}

void export_csv(const LabeledSequenceSet& set, const std::string& path) {
    set.validate();
    if (set.n_channels != 1) {
        throw std::invalid_argument("export_csv: only single-channel sets are supported");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("export_csv: cannot open " + path);
    out << "segment_id,t,value,class\n";
    char buf[64];
    for (std::size_t j = 0; j < set.size(); ++j) {
        for (std::size_t t = 0; t < set.sequences[j].rows(); ++t) {
            std::snprintf(buf, sizeof buf, "%.17g", set.sequences[j](t, 0));
            out << j << ',' << (t + 1) << ',' << buf << ',' << (set.labels[j] + 1) << '\n';
        }
    }
    if (!out) throw std::runtime_error("export_csv: write failed for " + path);
}

// ---------------------------------------------------------------------------
// Japanese Vowels loader
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<std::array<double, kJvChannels>>> parse_blocks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::vector<std::vector<std::array<double, kJvChannels>>> blocks;
    std::vector<std::array<double, kJvChannels>> current;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::array<double, kJvChannels> row{};
        std::size_t count = 0;
        std::string tok;
        bool bad = false;
        while (fields >> tok) {
            double v = 0.0;
            const auto* begin = tok.data();
            const auto* end = tok.data() + tok.size();
            const auto res = std::from_chars(begin, end, v);
            if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
                bad = true;
                break;
            }
            if (count < kJvChannels) row[count] = v;
            ++count;
        }
        if (count == 0 && !bad) {  // blank line: block separator
            if (!current.empty()) {
                blocks.push_back(std::move(current));
                current.clear();
            }
            continue;
        }
        if (bad || count != kJvChannels) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(kJvChannels) + " numeric fields");
        }
        current.push_back(row);
    }
    if (!current.empty()) blocks.push_back(std::move(current));
    return blocks;
}

}  // namespace

LabeledSequenceSet load_jv_blocks(const std::string& path,
                                  std::span<const std::size_t> per_class_counts,
                                  const std::string& name) {
    if (per_class_counts.empty()) {
        throw std::invalid_argument("load_jv_blocks: per-class block counts are required");
    }
    const auto blocks = parse_blocks(path);
    const std::size_t expected =
        std::accumulate(per_class_counts.begin(), per_class_counts.end(), std::size_t{0});
    if (blocks.size() != expected) {
        throw std::runtime_error(path + ": block count mismatch: expected " +
                                 std::to_string(expected) + ", got " +
                                 std::to_string(blocks.size()));
    }

    LabeledSequenceSet set;
    set.n_classes = per_class_counts.size();
    set.n_channels = kJvChannels;
    set.name = name;
    set.sequences.reserve(blocks.size());
    set.labels.reserve(blocks.size());
    std::size_t block = 0;
    for (std::size_t cls = 0; cls < per_class_counts.size(); ++cls) {
        for (std::size_t u = 0; u < per_class_counts[cls]; ++u, ++block) {
            const auto& b = blocks[block];
            Matrix s(b.size(), kJvChannels);
            for (std::size_t t = 0; t < b.size(); ++t) {
                for (std::size_t c = 0; c < kJvChannels; ++c) s(t, c) = b[t][c];
            }
            set.sequences.push_back(std::move(s));
            set.labels.push_back(static_cast<int>(cls));
        }
    }
    set.validate();
    return set;
}

std::pair<LabeledSequenceSet, LabeledSequenceSet> load_japanese_vowels(
    const std::string& train_path, const std::string& test_path) {
    return {load_jv_blocks(train_path, kJvTrainCounts, "jv_train"),
            load_jv_blocks(test_path, kJvTestCounts, "jv_test")};
}

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

LabeledSequenceSet resample_to_length(const LabeledSequenceSet& set, std::size_t length) {
    set.validate();
    if (length < 2) throw std::invalid_argument("resample_to_length: length must be at least 2");
    LabeledSequenceSet out = set;
    for (Matrix& seq : out.sequences) {
        const std::size_t m = seq.rows();
        Matrix r(length, set.n_channels);
        if (m == 1) {
            for (std::size_t t = 0; t < length; ++t) {
                for (std::size_t c = 0; c < set.n_channels; ++c) r(t, c) = seq(0, c);
            }
        } else {
            const double step = static_cast<double>(m - 1) / static_cast<double>(length - 1);
            for (std::size_t t = 0; t < length; ++t) {
                if (t == 0 || t == length - 1) {  // endpoints preserved exactly
                    const std::size_t src = t == 0 ? 0 : m - 1;
                    for (std::size_t c = 0; c < set.n_channels; ++c) r(t, c) = seq(src, c);
                    continue;
                }
                const double pos = static_cast<double>(t) * step;
                std::size_t lo = static_cast<std::size_t>(pos);
                if (lo >= m - 1) lo = m - 2;
                const double frac = pos - static_cast<double>(lo);
                for (std::size_t c = 0; c < set.n_channels; ++c) {
                    r(t, c) = frac == 0.0 ? seq(lo, c)
                                          : seq(lo, c) + frac * (seq(lo + 1, c) - seq(lo, c));
                }
            }
        }
        seq = std::move(r);
    }
    return out;
}

LabeledSequenceSet append_bias_channels(const LabeledSequenceSet& set,
                                        std::span<const double> values) {
    set.validate();
    if (values.empty()) return set;
    LabeledSequenceSet out = set;
    out.n_channels = set.n_channels + values.size();
    for (Matrix& seq : out.sequences) {
        Matrix wide(seq.rows(), out.n_channels);
        for (std::size_t t = 0; t < seq.rows(); ++t) {
            for (std::size_t c = 0; c < set.n_channels; ++c) wide(t, c) = seq(t, c);
            for (std::size_t v = 0; v < values.size(); ++v) {
                wide(t, set.n_channels + v) = values[v];
            }
        }
        seq = std::move(wide);
    }
    return out;
}

LabeledSequenceSet add_noise(const LabeledSequenceSet& set, const NoiseSpec& spec) {
    set.validate();
    if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
        throw std::invalid_argument("add_noise: sigma must be a nonnegative real");
    }
    if (!spec.channel_mask.empty() && spec.channel_mask.size() != set.n_channels) {
        throw std::invalid_argument("add_noise: channel mask size does not match channels");
    }
    LabeledSequenceSet out = set;
    if (spec.sigma == 0.0) return out;

    // Draw order: sequences in order, rows in order, masked channels in order.
    Rng rng(spec.seed);
    for (Matrix& seq : out.sequences) {
        for (std::size_t t = 0; t < seq.rows(); ++t) {
            for (std::size_t c = 0; c < seq.cols(); ++c) {
                if (spec.channel_mask.empty() || spec.channel_mask[c]) {
                    seq(t, c) += spec.sigma * rng.gaussian();
                }
            }
        }
    }
    return out;
}

Matrix concat_sequences(const LabeledSequenceSet& set) {
    set.validate();
    std::size_t total = 0;
    for (const Matrix& s : set.sequences) total += s.rows();
    Matrix out(total, set.n_channels);
    std::size_t at = 0;
    for (const Matrix& s : set.sequences) {
        for (std::size_t t = 0; t < s.rows(); ++t, ++at) {
            for (std::size_t c = 0; c < set.n_channels; ++c) out(at, c) = s(t, c);
        }
    }
    return out;
}

}  // namespace esn

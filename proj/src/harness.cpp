#include "esn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "esn/classify.hpp"
#include "esn/readout_linear.hpp"
#include "esn/readout_lowrank.hpp"
#include "esn/readout_sparse.hpp"
#include "esn/rng.hpp"

namespace esn {

// ---------------------------------------------------------------------------
// Labels and parsing
// ---------------------------------------------------------------------------

std::string dataset_label(Dataset dataset) {
    switch (dataset) {
        case Dataset::SineSquare: return "sine_square";
        case Dataset::JapaneseVowels: return "japanese_vowels";
    }
    throw std::logic_error("dataset_label: bad enum");
}

Dataset parse_dataset(const std::string& label) {
    if (label == "sine_square") return Dataset::SineSquare;
    if (label == "japanese_vowels") return Dataset::JapaneseVowels;
    throw std::invalid_argument("unknown dataset '" + label + "'");
}

std::string method_label(Method method) {
    switch (method) {
        case Method::A1Lam4: return "A1_1e-4";
        case Method::A1Lam10: return "A1_1e-10";
        case Method::A2: return "A2";
        case Method::A3: return "A3";
        case Method::B: return "B";
        case Method::C: return "C";
    }
    throw std::logic_error("method_label: bad enum");
}

Method parse_method(const std::string& label) {
    for (Method m : kAllMethods) {
        if (method_label(m) == label) return m;
    }
    throw std::invalid_argument("unknown method '" + label + "'");
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

ExperimentPlan plan_defaults(Dataset dataset) {
    ExperimentPlan plan;
    plan.dataset = dataset;
    if (dataset == Dataset::JapaneseVowels) {
        plan.alpha = 0.2;
        plan.rho = 0.2;
        plan.gamma = 1.5;
    } else {
        plan.alpha = 1.0;
        plan.rho = 0.8;
        plan.gamma = 1.5;
        // Densely sampled periods with a short segment stream and a small
        // spectral radius reproduce the reference noise-robustness profile
        // (peak-phase samples of the sine are genuinely ambiguous against the
        // square's plateaus, and the global readout stays at chance).
        plan.period = 50;
        plan.train_segments = 20;
        plan.test_segments = 25;
        plan.spectral_target = 0.3;
    }
    return plan;
}

void ExperimentPlan::validate() const {
    if (reservoir_sizes.empty() || noise_levels.empty() || methods.empty()) {
        throw std::invalid_argument("plan: reservoir_sizes, noise_levels and methods must be nonempty");
    }
    if (simulations < 1) throw std::invalid_argument("plan: simulations must be at least 1");
    for (std::size_t n : reservoir_sizes) {
        if (n < 1) throw std::invalid_argument("plan: reservoir sizes must be positive");
    }
    for (double s : noise_levels) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument("plan: noise levels must be nonnegative reals");
        }
    }
    for (std::size_t i = 0; i < methods.size(); ++i) {
        for (std::size_t j = i + 1; j < methods.size(); ++j) {
            if (methods[i] == methods[j]) {
                throw std::invalid_argument("plan: duplicate method " + method_label(methods[i]));
            }
        }
    }
    if (rank < 1) throw std::invalid_argument("plan: rank must be at least 1");
    if (dataset == Dataset::SineSquare) {
        SineSquareConfig probe{period, train_segments, 0};
        probe.validate();
        if (test_segments < 1) throw std::invalid_argument("plan: test_segments must be positive");
        if (washout != 0) {
            throw std::invalid_argument("plan: washout is not supported for the sine_square stream");
        }
    } else {
        if (resample_length < 2) {
            throw std::invalid_argument("plan: resample_length must be at least 2");
        }
        if (washout >= resample_length) {
            throw std::invalid_argument("plan: washout must be shorter than resample_length");
        }
    }
    // surface bad reservoir parameters at plan time rather than mid-run
    ReservoirConfig cfg;
    cfg.n_nodes = reservoir_sizes.front();
    cfg.alpha = alpha;
    cfg.rho = rho;
    cfg.gamma = gamma;
    cfg.spectral_target = spectral_target;
    cfg.washout = 0;
    cfg.validate();
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("plan: bad numeric value for '" + key + "': " + v);
    }
}

std::size_t parse_count(const std::string& key, const std::string& v) {
    const double x = parse_double(key, v);
    if (x < 0 || x != std::floor(x) || x > 1e15) {
        throw std::invalid_argument("plan: '" + key + "' must be a nonnegative integer");
    }
    return static_cast<std::size_t>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("plan: '" + key + "' must be a boolean");
}

}  // namespace

ExperimentPlan parse_plan_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("plan line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw std::invalid_argument("plan line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        for (const auto& [k, v] : entries) {
            if (k == key) throw std::invalid_argument("plan: duplicate key '" + key + "'");
        }
        entries.emplace_back(key, value);
    }

    Dataset dataset = Dataset::SineSquare;
    for (const auto& [k, v] : entries) {
        if (k == "dataset") dataset = parse_dataset(v);
    }
    ExperimentPlan plan = plan_defaults(dataset);

    for (const auto& [key, value] : entries) {
        if (key == "dataset") {
            continue;  // already applied
        } else if (key == "reservoir_sizes") {
            plan.reservoir_sizes.clear();
            for (const auto& item : split_list(value)) {
                plan.reservoir_sizes.push_back(parse_count(key, item));
            }
        } else if (key == "noise_levels") {
            plan.noise_levels.clear();
            for (const auto& item : split_list(value)) {
                plan.noise_levels.push_back(parse_double(key, item));
            }
        } else if (key == "methods") {
            plan.methods.clear();
            for (const auto& item : split_list(value)) plan.methods.push_back(parse_method(item));
        } else if (key == "simulations") {
            plan.simulations = parse_count(key, value);
        } else if (key == "base_seed") {
            plan.base_seed = static_cast<std::uint64_t>(parse_count(key, value));
        } else if (key == "output") {
            plan.output = value;
        } else if (key == "alpha") {
            plan.alpha = parse_double(key, value);
        } else if (key == "rho") {
            plan.rho = parse_double(key, value);
        } else if (key == "gamma") {
            plan.gamma = parse_double(key, value);
        } else if (key == "spectral_target") {
            plan.spectral_target = parse_double(key, value);
        } else if (key == "activation") {
            if (value == "tanh") {
                plan.activation = Activation::Tanh;
            } else if (value == "identity") {
                plan.activation = Activation::Identity;
            } else {
                throw std::invalid_argument("plan: activation must be tanh or identity");
            }
        } else if (key == "washout") {
            plan.washout = parse_count(key, value);
        } else if (key == "concat_input") {
            plan.concat_input = parse_bool(key, value);
        } else if (key == "period") {
            plan.period = parse_count(key, value);
        } else if (key == "train_segments") {
            plan.train_segments = parse_count(key, value);
        } else if (key == "test_segments") {
            plan.test_segments = parse_count(key, value);
        } else if (key == "data_dir") {
            plan.data_dir = value;
        } else if (key == "resample_length") {
            plan.resample_length = parse_count(key, value);
        } else if (key == "bias_values") {
            plan.bias_values.clear();
            for (const auto& item : split_list(value)) {
                plan.bias_values.push_back(parse_double(key, item));
            }
        } else if (key == "nonmember_value") {
            plan.nonmember_value = parse_double(key, value);
        } else if (key == "rank") {
            plan.rank = parse_count(key, value);
        } else if (key == "threads") {
            plan.threads = parse_count(key, value);
        } else {
            throw std::invalid_argument("plan: unknown key '" + key + "'");
        }
    }
    plan.validate();
    return plan;
}

ExperimentPlan parse_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open plan file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_plan_text(buf.str());
}

std::string effective_data_dir(const ExperimentPlan& plan) {
    if (!plan.data_dir.empty()) return plan.data_dir;
    if (const char* env = std::getenv("ESN_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return "data";
}

std::string jv_train_path(const std::string& data_dir) { return data_dir + "/ae.train"; }
std::string jv_test_path(const std::string& data_dir) { return data_dir + "/ae.test"; }

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t child_seed(std::uint64_t base_seed, Dataset dataset, std::size_t n_nodes,
                         double sigma, std::size_t sim_index) {
    std::uint64_t h = splitmix64(base_seed);
    h = seed_chain(h, fnv1a64(dataset_label(dataset)));
    h = seed_chain(h, static_cast<std::uint64_t>(n_nodes));
    h = seed_chain(h, std::bit_cast<std::uint64_t>(sigma));
    h = seed_chain(h, static_cast<std::uint64_t>(sim_index));
    return h;
}

// ---------------------------------------------------------------------------
// Simulation pipeline
// ---------------------------------------------------------------------------

namespace {

constexpr double kRidgeLambdaDefault = 1e-4;   // A2, A3 and B
constexpr double kA1LambdaLow = 1e-10;

// Preprocessed Japanese-vowels data, shared across all simulations of a run.
struct JvPrepared {
    LabeledSequenceSet train;       // resampled, bias channels appended
    LabeledSequenceSet test_clean;  // resampled, pre-bias (noise applies here)
};

JvPrepared prepare_jv(const ExperimentPlan& plan) {
    const std::string dir = effective_data_dir(plan);
    const std::string train_path = jv_train_path(dir);
    const std::string test_path = jv_test_path(dir);
    auto [train, test] = load_japanese_vowels(train_path, test_path);
    JvPrepared prep;
    prep.train = append_bias_channels(resample_to_length(train, plan.resample_length),
                                      plan.bias_values);
    prep.test_clean = resample_to_length(test, plan.resample_length);
    return prep;
}

ReservoirConfig reservoir_config(const ExperimentPlan& plan, std::size_t n_nodes,
                                 std::size_t n_inputs, std::uint64_t weight_seed) {
    ReservoirConfig cfg;
    cfg.n_nodes = n_nodes;
    cfg.n_inputs = n_inputs;
    cfg.alpha = plan.alpha;
    cfg.rho = plan.rho;
    cfg.gamma = plan.gamma;
    cfg.activation = plan.activation;
    cfg.spectral_target = plan.spectral_target;
    cfg.weight_seed = weight_seed;
    cfg.washout = plan.washout;
    cfg.concat_input = plan.concat_input;
    return cfg;
}

// One continuous reservoir run over the whole stream; per-segment trajectories
// are windows of it (the reservoir is not reset between segments).
std::vector<StateTrajectory> stream_windows(const ReservoirWeights& weights,
                                            const ReservoirConfig& config,
                                            const LabeledSequenceSet& set) {
    const Matrix input = concat_sequences(set);
    const StateTrajectory full = run(weights, config, input);
    std::vector<StateTrajectory> windows;
    windows.reserve(set.size());
    std::size_t offset = 0;
    for (const Matrix& seq : set.sequences) {
        const std::size_t len = seq.rows();
        Matrix states(len, full.dim());
        for (std::size_t t = 0; t < len; ++t) {
            const auto src = full.state(offset + t);
            std::copy(src.begin(), src.end(), states.row(t).begin());
        }
        StateTrajectory window{std::move(states)};
        if (config.concat_input) window = augment_with_input(window, seq);
        windows.push_back(std::move(window));
        offset += len;
    }
    return windows;
}

// Independent runs, one per sequence, each from the cold state.
std::vector<StateTrajectory> run_each(const ReservoirWeights& weights,
                                      const ReservoirConfig& config,
                                      const LabeledSequenceSet& set) {
    std::vector<StateTrajectory> out;
    out.reserve(set.size());
    for (const Matrix& seq : set.sequences) {
        StateTrajectory traj = run(weights, config, seq);
        if (config.concat_input) {
            if (config.washout == 0) {
                traj = augment_with_input(traj, seq);
            } else {
                Matrix tail(seq.rows() - config.washout, seq.cols());
                for (std::size_t t = 0; t < tail.rows(); ++t) {
                    const auto src = seq.row(t + config.washout);
                    std::copy(src.begin(), src.end(), tail.row(t).begin());
                }
                traj = augment_with_input(traj, tail);
            }
        }
        out.push_back(std::move(traj));
    }
    return out;
}

struct SimulationData {
    std::vector<StateTrajectory> train_trajectories;
    std::vector<StateTrajectory> test_trajectories;
    std::vector<int> train_labels;
    std::vector<int> test_labels;
    std::size_t n_classes = 0;
    Matrix linear_targets;  // signed 1×J stream indicator or K×J one-hot
    // The sine/square stream is scored per test sample (the unit of its ±1
    // indicator): a decision at every timestep from that offset's weights.
    // Sequence datasets score per pattern with the full z-sums. The endpoint
    // readout is per segment either way.
    bool per_sample = false;
};

SimulationData build_simulation(const ExperimentPlan& plan, std::size_t n_nodes, double sigma,
                                std::size_t sim_index, const JvPrepared* jv) {
    const std::uint64_t seed =
        child_seed(plan.base_seed, plan.dataset, n_nodes, sigma, sim_index);
    const std::uint64_t weight_seed = seed_chain(seed, 1);
    const std::uint64_t train_seed = seed_chain(seed, 2);
    const std::uint64_t test_seed = seed_chain(seed, 3);
    const std::uint64_t noise_seed = seed_chain(seed, 4);

    SimulationData sim;
    if (plan.dataset == Dataset::SineSquare) {
        const LabeledSequenceSet train =
            gen_sine_square({plan.period, plan.train_segments, train_seed});
        const LabeledSequenceSet test =
            gen_sine_square({plan.period, plan.test_segments, test_seed});
        const LabeledSequenceSet noisy = add_noise(test, {sigma, noise_seed, {}});

        const ReservoirConfig cfg = reservoir_config(plan, n_nodes, 1, weight_seed);
        const ReservoirWeights weights = init_weights(cfg);
        sim.train_trajectories = stream_windows(weights, cfg, train);
        sim.test_trajectories = stream_windows(weights, cfg, noisy);
        sim.train_labels = train.labels;
        sim.test_labels = noisy.labels;
        sim.n_classes = 2;
        sim.linear_targets = signed_indicator(train.labels);
        sim.per_sample = true;
    } else {
        if (jv == nullptr) throw std::logic_error("build_simulation: missing JV data");
        // Noise goes on the resampled cepstrum channels; bias channels are
        // appended afterwards and stay clean.
        const LabeledSequenceSet noisy =
            append_bias_channels(add_noise(jv->test_clean, {sigma, noise_seed, {}}),
                                 plan.bias_values);

        const ReservoirConfig cfg =
            reservoir_config(plan, n_nodes, jv->train.n_channels, weight_seed);
        const ReservoirWeights weights = init_weights(cfg);
        sim.train_trajectories = run_each(weights, cfg, jv->train);
        sim.test_trajectories = run_each(weights, cfg, noisy);
        sim.train_labels = jv->train.labels;
        sim.test_labels = noisy.labels;
        sim.n_classes = jv->train.n_classes;
        sim.linear_targets =
            indicator_matrix(jv->train.labels, sim.n_classes, plan.nonmember_value);
        (void)train_seed;
        (void)test_seed;  // fixed dataset: only weights and noise are random
    }
    return sim;
}

double percent_correct(const std::vector<std::size_t>& predicted,
                       const std::vector<int>& truth) {
    std::size_t correct = 0;
    for (std::size_t j = 0; j < predicted.size(); ++j) {
        if (predicted[j] == static_cast<std::size_t>(truth[j])) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(predicted.size());
}

// Per-sample accuracy: score_at(trajectory, t) yields one decision per
// timestep of every test pattern; each sample carries its pattern's label.
template <typename ScoreAt>
double per_sample_accuracy(const std::vector<StateTrajectory>& trajectories,
                           const std::vector<int>& labels, ScoreAt&& score_at) {
    std::size_t correct = 0;
    std::size_t total = 0;
    for (std::size_t j = 0; j < trajectories.size(); ++j) {
        for (std::size_t t = 0; t < trajectories[j].length(); ++t, ++total) {
            if (score_at(trajectories[j], t) == static_cast<std::size_t>(labels[j])) {
                ++correct;
            }
        }
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

double evaluate_method(const SimulationData& sim, const ExperimentPlan& plan, Method method) {
    double acc = 0.0;
    std::vector<std::size_t> predicted;
    predicted.reserve(sim.test_trajectories.size());
    switch (method) {
        case Method::A1Lam4:
        case Method::A1Lam10: {
            const double lambda = method == Method::A1Lam4 ? kRidgeLambdaDefault : kA1LambdaLow;
            const PointwiseReadout model =
                fit_pointwise(sim.train_trajectories, sim.linear_targets, lambda);
            if (sim.per_sample) {
                acc = per_sample_accuracy(
                    sim.test_trajectories, sim.test_labels,
                    [&](const StateTrajectory& traj, std::size_t t) {
                        return decide_max(matvec(model.weights[t], traj.state(t)));
                    });
            } else {
                for (const auto& traj : sim.test_trajectories) {
                    predicted.push_back(classify_pointwise(model, traj).class_index);
                }
            }
            break;
        }
        case Method::A2: {
            const EndpointReadout model =
                fit_endpoint(sim.train_trajectories, sim.linear_targets, kRidgeLambdaDefault);
            for (const auto& traj : sim.test_trajectories) {
                predicted.push_back(classify_endpoint(model, traj).class_index);
            }
            break;
        }
        case Method::A3: {
            const GlobalReadout model =
                fit_global(sim.train_trajectories, sim.linear_targets, kRidgeLambdaDefault);
            if (sim.per_sample) {
                acc = per_sample_accuracy(
                    sim.test_trajectories, sim.test_labels,
                    [&](const StateTrajectory& traj, std::size_t t) {
                        return decide_max(matvec(model.weights, traj.state(t)));
                    });
            } else {
                for (const auto& traj : sim.test_trajectories) {
                    predicted.push_back(classify_global(model, traj).class_index);
                }
            }
            break;
        }
        case Method::B: {
            const SparseReadout model = fit_sparse(sim.train_trajectories, sim.linear_targets,
                                                   {kRidgeLambdaDefault, DantzigNorm::MaxAbsEntry});
            if (sim.per_sample) {
                std::vector<double> z(model.n_classes);
                acc = per_sample_accuracy(
                    sim.test_trajectories, sim.test_labels,
                    [&](const StateTrajectory& traj, std::size_t t) {
                        const auto x = traj.state(t);
                        for (std::size_t k = 0; k < model.n_classes; ++k) {
                            const SparseWeightRow& row = model.weights[t][k];
                            double s = 0.0;
                            for (std::size_t i = 0; i < row.index.size(); ++i) {
                                s += row.value[i] * x[row.index[i]];
                            }
                            z[k] = s;
                        }
                        return decide_max(z);
                    });
            } else {
                for (const auto& traj : sim.test_trajectories) {
                    predicted.push_back(classify_sparse(model, traj).class_index);
                }
            }
            break;
        }
        case Method::C: {
            LowRankOptions options;
            options.rank = plan.rank;
            const LowRankModel model = fit_lowrank(sim.train_trajectories, sim.train_labels,
                                                   sim.n_classes, options);
            if (sim.per_sample) {
                std::vector<double> z(model.n_classes);
                acc = per_sample_accuracy(
                    sim.test_trajectories, sim.test_labels,
                    [&](const StateTrajectory& traj, std::size_t t) {
                        const auto x = traj.state(t);
                        const double full = dot(x, x);
                        for (std::size_t k = 0; k < model.n_classes; ++k) {
                            const OrthonormalBasis& u = model.bases[k][t];
                            double proj = 0.0;
                            for (std::size_t r = 0; r < u.rank; ++r) {
                                double s = 0.0;
                                for (std::size_t i = 0; i < u.dim; ++i) {
                                    s += u.columns(i, r) * x[i];
                                }
                                proj += s * s;
                            }
                            z[k] = std::sqrt(std::max(full - proj, 0.0));
                        }
                        return decide_min(z);
                    });
            } else {
                for (const auto& traj : sim.test_trajectories) {
                    predicted.push_back(score_lowrank(model, traj).class_index);
                }
            }
            break;
        }
    }
    if (!predicted.empty()) acc = percent_correct(predicted, sim.test_labels);
    if (!std::isfinite(acc)) throw std::runtime_error("non-finite accuracy");
    return acc;
}

}  // namespace

double run_cell(const ExperimentPlan& plan, std::size_t n_nodes, double sigma, Method method,
                std::size_t sim_index) {
    plan.validate();
    JvPrepared jv;
    const JvPrepared* jv_ptr = nullptr;
    if (plan.dataset == Dataset::JapaneseVowels) {
        jv = prepare_jv(plan);
        jv_ptr = &jv;
    }
    const SimulationData sim = build_simulation(plan, n_nodes, sigma, sim_index, jv_ptr);
    return evaluate_method(sim, plan, method);
}

// ---------------------------------------------------------------------------
// Grid runner
// ---------------------------------------------------------------------------

ResultTable run_plan(const ExperimentPlan& plan) {
    plan.validate();
    JvPrepared jv;
    const JvPrepared* jv_ptr = nullptr;
    if (plan.dataset == Dataset::JapaneseVowels) {
        jv = prepare_jv(plan);
        jv_ptr = &jv;
    }

    struct Job {
        std::size_t n_nodes;
        double sigma;
        std::size_t sim;
    };
    struct JobResult {
        std::vector<double> accuracy;  // parallel to plan.methods
        std::string error;
        double seconds = 0.0;
    };

    std::vector<Job> jobs;
    for (std::size_t n : plan.reservoir_sizes) {
        for (double sigma : plan.noise_levels) {
            for (std::size_t sim = 0; sim < plan.simulations; ++sim) {
                jobs.push_back({n, sigma, sim});
            }
        }
    }
    std::vector<JobResult> results(jobs.size());

    auto worker_body = [&](std::size_t job_index) {
        const Job& job = jobs[job_index];
        JobResult& out = results[job_index];
        const auto start = std::chrono::steady_clock::now();
        try {
            const SimulationData sim =
                build_simulation(plan, job.n_nodes, job.sigma, job.sim, jv_ptr);
            out.accuracy.reserve(plan.methods.size());
            for (Method m : plan.methods) {
                out.accuracy.push_back(evaluate_method(sim, plan, m));
            }
        } catch (const std::exception& e) {
            out.accuracy.clear();
            out.error = e.what();
        }
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                          .count();
    };

    std::size_t n_threads = plan.threads != 0 ? plan.threads
                                              : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, jobs.size());
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) worker_body(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t w = 0; w < n_threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
                    worker_body(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    // Canonical assembly order: sizes, then noise levels, then methods.
    ResultTable table;
    std::size_t job_base = 0;
    for (std::size_t n : plan.reservoir_sizes) {
        for (double sigma : plan.noise_levels) {
            double cell_seconds = 0.0;
            std::vector<std::size_t> ok;
            for (std::size_t sim = 0; sim < plan.simulations; ++sim) {
                const JobResult& r = results[job_base + sim];
                cell_seconds += r.seconds;
                if (r.error.empty()) {
                    ok.push_back(job_base + sim);
                } else {
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "N=%zu sigma=%g sim=%zu failed: %s", n, sigma,
                                  sim, r.error.c_str());
                    table.warnings.push_back(buf);
                }
            }
            for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
                ResultRow row;
                row.dataset = plan.dataset;
                row.n_nodes = n;
                row.sigma = sigma;
                row.method = plan.methods[mi];
                row.n_sims = ok.size();
                if (ok.empty()) {
                    row.mean_acc = std::numeric_limits<double>::quiet_NaN();
                    row.std_acc = std::numeric_limits<double>::quiet_NaN();
                } else {
                    double sum = 0.0;
                    for (std::size_t j : ok) sum += results[j].accuracy[mi];
                    row.mean_acc = sum / static_cast<double>(ok.size());
                    if (ok.size() == 1) {
                        row.std_acc = 0.0;  // degenerate by convention
                    } else {
                        double ss = 0.0;
                        for (std::size_t j : ok) {
                            const double d = results[j].accuracy[mi] - row.mean_acc;
                            ss += d * d;
                        }
                        row.std_acc = std::sqrt(ss / static_cast<double>(ok.size() - 1));
                    }
                }
                table.rows.push_back(row);
            }
            if (plan.simulations == 1) {
                char buf[128];
                std::snprintf(buf, sizeof buf,
                              "N=%zu sigma=%g: single simulation, std reported as 0", n, sigma);
                table.warnings.push_back(buf);
            }
            char buf[128];
            std::snprintf(buf, sizeof buf, "cell N=%zu sigma=%g: %zu sims in %.2f s", n, sigma,
                          plan.simulations, cell_seconds);
            table.notes.push_back(buf);
            job_base += plan.simulations;
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string to_csv(const ResultTable& table) {
    std::string out = "dataset,N,sigma,method,mean_acc,std_acc,n_sims\n";
    char buf[256];
    for (const ResultRow& r : table.rows) {
        char mean_s[32], std_s[32];
        if (std::isfinite(r.mean_acc)) {
            std::snprintf(mean_s, sizeof mean_s, "%.4f", r.mean_acc);
        } else {
            std::snprintf(mean_s, sizeof mean_s, "nan");
        }
        if (std::isfinite(r.std_acc)) {
            std::snprintf(std_s, sizeof std_s, "%.4f", r.std_acc);
        } else {
            std::snprintf(std_s, sizeof std_s, "nan");
        }
        std::snprintf(buf, sizeof buf, "%s,%zu,%g,%s,%s,%s,%zu\n",
                      dataset_label(r.dataset).c_str(), r.n_nodes, r.sigma,
                      method_label(r.method).c_str(), mean_s, std_s, r.n_sims);
        out += buf;
    }
    return out;
}

void write_csv(const ResultTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << to_csv(table);
    if (!out) throw std::runtime_error("write failed for " + path);
}

ResultTable read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "dataset,N,sigma,method,mean_acc,std_acc,n_sims") {
        throw std::runtime_error(path + ": not a results CSV (bad header)");
    }
    ResultTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_list(line);
        if (fields.size() != 7) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 7 fields");
        }
        ResultRow row;
        row.dataset = parse_dataset(fields[0]);
        row.n_nodes = parse_count("N", fields[1]);
        row.sigma = parse_double("sigma", fields[2]);
        row.method = parse_method(fields[3]);
        row.mean_acc = fields[4] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                                          : parse_double("mean_acc", fields[4]);
        row.std_acc = fields[5] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                                         : parse_double("std_acc", fields[5]);
        row.n_sims = parse_count("n_sims", fields[6]);
        table.rows.push_back(row);
    }
    return table;
}

std::string report_best(const ResultTable& table) {
    struct Key {
        std::string dataset;
        std::size_t n;
        double sigma;
        auto operator<=>(const Key&) const = default;
    };
    std::map<Key, ResultRow> best;
    auto method_order = [](Method m) {
        for (std::size_t i = 0; i < kAllMethods.size(); ++i) {
            if (kAllMethods[i] == m) return i;
        }
        return kAllMethods.size();
    };
    for (const ResultRow& r : table.rows) {
        if (r.n_sims == 0 || !std::isfinite(r.mean_acc)) continue;
        const Key key{dataset_label(r.dataset), r.n_nodes, r.sigma};
        const auto it = best.find(key);
        if (it == best.end() || r.mean_acc > it->second.mean_acc ||
            (r.mean_acc == it->second.mean_acc &&
             method_order(r.method) < method_order(it->second.method))) {
            best[key] = r;
        }
    }
    std::string out = "dataset,N,sigma,best_method,best_mean\n";
    char buf[192];
    for (const auto& [key, r] : best) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%g,%s,%.4f\n", key.dataset.c_str(), key.n,
                      key.sigma, method_label(r.method).c_str(), r.mean_acc);
        out += buf;
    }
    return out;
}

}  // namespace esn

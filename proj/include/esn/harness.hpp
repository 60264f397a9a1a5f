#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "esn/data.hpp"
#include "esn/reservoir.hpp"

namespace esn {

enum class Dataset { SineSquare, JapaneseVowels };

std::string dataset_label(Dataset dataset);
Dataset parse_dataset(const std::string& label);

/// Output-layer methods, labeled as reported in the results tables:
///   A1_1e-4 / A1_1e-10  pointwise ridge at the two regularization levels
///   A2                  endpoint ridge (lambda = 1e-4)
///   A3                  global ridge (lambda = 1e-4)
///   B                   sparse Dantzig-selector readout (lambda = 1e-4)
///   C                   low-rank PCA residual scoring
enum class Method { A1Lam4, A1Lam10, A2, A3, B, C };

inline constexpr std::array<Method, 6> kAllMethods{Method::A1Lam4, Method::A1Lam10, Method::A2,
                                                   Method::A3,     Method::B,       Method::C};

std::string method_label(Method method);
Method parse_method(const std::string& label);

/// Grid description for one experiment run: datasets × reservoir sizes ×
/// noise levels × methods, with `simulations` seeded repetitions per cell.
struct ExperimentPlan {
    Dataset dataset = Dataset::SineSquare;
    std::vector<std::size_t> reservoir_sizes{50};
    std::vector<double> noise_levels{0.0};
    std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
    std::size_t simulations = 10;
    std::uint64_t base_seed = 1;
    std::string output = "results.csv";

    // reservoir parameters (defaults depend on the dataset, see plan_defaults)
    double alpha = 1.0;
    double rho = 0.8;
    double gamma = 1.5;
    double spectral_target = 0.95;
    Activation activation = Activation::Tanh;
    std::size_t washout = 0;
    bool concat_input = false;

    // sine/square stream parameters
    std::size_t period = 50;
    std::size_t train_segments = 20;
    std::size_t test_segments = 25;

    // Japanese-vowels parameters
    std::string data_dir;  // empty: $ESN_DATA_DIR, then "data"
    std::size_t resample_length = 30;
    std::vector<double> bias_values{1.0, 1.0};
    double nonmember_value = 0.0;

    std::size_t rank = 3;     // method C subspace rank
    std::size_t threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

ExperimentPlan plan_defaults(Dataset dataset);

/// Parses the flat key-value plan format (`key = value`, `#` comments).
/// Unknown and duplicate keys are errors.
ExperimentPlan parse_plan_text(const std::string& text);
ExperimentPlan parse_plan_file(const std::string& path);

std::string effective_data_dir(const ExperimentPlan& plan);
std::string jv_train_path(const std::string& data_dir);
std::string jv_test_path(const std::string& data_dir);

/// Simulation seed: a stable splitmix64 chain over (base seed, dataset label,
/// N, sigma bits, simulation index). Method-independent by construction, so
/// every method within a simulation sees the same weights, data and noise.
std::uint64_t child_seed(std::uint64_t base_seed, Dataset dataset, std::size_t n_nodes,
                         double sigma, std::size_t sim_index);

struct ResultRow {
    Dataset dataset = Dataset::SineSquare;
    std::size_t n_nodes = 0;
    double sigma = 0.0;
    Method method = Method::A1Lam4;
    double mean_acc = 0.0;  // percent
    double std_acc = 0.0;   // unbiased (n−1); 0 by convention when n = 1
    std::size_t n_sims = 0; // completed simulations (0 marks a failed cell)
};

struct ResultTable {
    std::vector<ResultRow> rows;
    std::vector<std::string> warnings;  // per-cell failures, degenerate stats
    std::vector<std::string> notes;     // informational (per-cell timing)
};

/// Runs one (N, sigma, method, simulation) cell and returns percent accuracy
/// on the noisy test set. Trains on clean data only.
double run_cell(const ExperimentPlan& plan, std::size_t n_nodes, double sigma, Method method,
                std::size_t sim_index);

/// Executes the full grid. Simulations are independent jobs (optionally on a
/// worker pool); output is identical regardless of parallelism. Failing
/// simulations are recorded as warnings and excluded from the statistics.
ResultTable run_plan(const ExperimentPlan& plan);

/// CSV with the fixed header dataset,N,sigma,method,mean_acc,std_acc,n_sims.
std::string to_csv(const ResultTable& table);
void write_csv(const ResultTable& table, const std::string& path);
ResultTable read_results_csv(const std::string& path);

/// Best-mean method per (dataset, N, sigma) group, as CSV text with header
/// dataset,N,sigma,best_method,best_mean. Invariant under row reordering.
std::string report_best(const ResultTable& table);

}  // namespace esn

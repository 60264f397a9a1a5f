#include "esn/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace esn {

namespace {

using nlohmann::json;

// First line of every model file; the JSON payload follows.
constexpr const char* kMagicLine = "esn-readout-model v1";

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.storage()}};
}

Matrix matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols) {
        throw std::runtime_error("model file: matrix payload size mismatch");
    }
    Matrix m(rows, cols);
    m.storage() = data;
    return m;
}

json config_to_json(const ReservoirConfig& c) {
    return json{{"n_nodes", c.n_nodes},
                {"n_inputs", c.n_inputs},
                {"alpha", c.alpha},
                {"rho", c.rho},
                {"gamma", c.gamma},
                {"activation", c.activation == Activation::Tanh ? "tanh" : "identity"},
                {"spectral_target", c.spectral_target},
                {"weight_seed", c.weight_seed},
                {"washout", c.washout},
                {"concat_input", c.concat_input},
                {"connectivity", c.connectivity}};
}

ReservoirConfig config_from_json(const json& j) {
    ReservoirConfig c;
    c.n_nodes = j.at("n_nodes").get<std::size_t>();
    c.n_inputs = j.at("n_inputs").get<std::size_t>();
    c.alpha = j.at("alpha").get<double>();
    c.rho = j.at("rho").get<double>();
    c.gamma = j.at("gamma").get<double>();
    const auto act = j.at("activation").get<std::string>();
    if (act == "tanh") {
        c.activation = Activation::Tanh;
    } else if (act == "identity") {
        c.activation = Activation::Identity;
    } else {
        throw std::runtime_error("model file: unknown activation '" + act + "'");
    }
    c.spectral_target = j.at("spectral_target").get<double>();
    c.weight_seed = j.at("weight_seed").get<std::uint64_t>();
    c.washout = j.at("washout").get<std::size_t>();
    c.concat_input = j.at("concat_input").get<bool>();
    c.connectivity = j.at("connectivity").get<double>();
    return c;
}

json readout_to_json(const ModelBundle& model) {
    json j;
    if (const auto* pt = std::get_if<PointwiseReadout>(&model.readout)) {
        j["kind"] = "pointwise";
        j["lambda"] = pt->lambda;
        json ws = json::array();
        for (const Matrix& w : pt->weights) ws.push_back(matrix_to_json(w));
        j["weights"] = std::move(ws);
    } else if (const auto* ep = std::get_if<EndpointReadout>(&model.readout)) {
        j["kind"] = "endpoint";
        j["lambda"] = ep->lambda;
        j["weights"] = matrix_to_json(ep->weights);
    } else if (const auto* gl = std::get_if<GlobalReadout>(&model.readout)) {
        j["kind"] = "global";
        j["lambda"] = gl->lambda;
        j["weights"] = matrix_to_json(gl->weights);
    } else if (const auto* sp = std::get_if<SparseReadout>(&model.readout)) {
        j["kind"] = "sparse";
        j["lambda"] = sp->lambda;
        j["norm"] = sp->norm == DantzigNorm::MaxAbsEntry ? "max_abs_entry" : "induced_linf";
        j["n_classes"] = sp->n_classes;
        j["n_nodes"] = sp->n_nodes;
        json steps = json::array();
        for (const auto& rows : sp->weights) {
            json ks = json::array();
            for (const SparseWeightRow& row : rows) {
                ks.push_back(json{{"index", row.index}, {"value", row.value}});
            }
            steps.push_back(std::move(ks));
        }
        j["weights"] = std::move(steps);
        j["objectives"] = sp->objectives;
        j["sparsity"] = sp->sparsity;
    } else if (const auto* lr = std::get_if<LowRankModel>(&model.readout)) {
        j["kind"] = "lowrank";
        j["n_classes"] = lr->n_classes;
        j["length"] = lr->length;
        j["rank"] = lr->rank;
        j["centered"] = lr->centered;
        j["norm"] = lr->norm == ResidualNorm::L2 ? "l2" : "squared_l2";
        json classes = json::array();
        for (const auto& per_t : lr->bases) {
            json ts = json::array();
            for (const OrthonormalBasis& b : per_t) ts.push_back(matrix_to_json(b.columns));
            classes.push_back(std::move(ts));
        }
        j["bases"] = std::move(classes);
        j["means"] = lr->means;
        j["effective_rank"] = lr->effective_rank;
    }
    return j;
}

void readout_from_json(const json& j, ModelBundle& model) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "pointwise") {
        PointwiseReadout pt;
        pt.lambda = j.at("lambda").get<double>();
        for (const json& w : j.at("weights")) pt.weights.push_back(matrix_from_json(w));
        model.readout = std::move(pt);
    } else if (kind == "endpoint") {
        model.readout = EndpointReadout{matrix_from_json(j.at("weights")),
                                        j.at("lambda").get<double>()};
    } else if (kind == "global") {
        model.readout = GlobalReadout{matrix_from_json(j.at("weights")),
                                      j.at("lambda").get<double>()};
    } else if (kind == "sparse") {
        SparseReadout sp;
        sp.lambda = j.at("lambda").get<double>();
        sp.norm = j.at("norm").get<std::string>() == "induced_linf" ? DantzigNorm::InducedLinf
                                                                    : DantzigNorm::MaxAbsEntry;
        sp.n_classes = j.at("n_classes").get<std::size_t>();
        sp.n_nodes = j.at("n_nodes").get<std::size_t>();
        for (const json& rows : j.at("weights")) {
            std::vector<SparseWeightRow> per_k;
            for (const json& row : rows) {
                per_k.push_back(SparseWeightRow{row.at("index").get<std::vector<std::size_t>>(),
                                                row.at("value").get<std::vector<double>>()});
            }
            sp.weights.push_back(std::move(per_k));
        }
        sp.objectives = j.at("objectives").get<std::vector<std::vector<double>>>();
        sp.sparsity = j.at("sparsity").get<std::vector<double>>();
        model.readout = std::move(sp);
    } else if (kind == "lowrank") {
        LowRankModel lr;
        lr.n_classes = j.at("n_classes").get<std::size_t>();
        lr.length = j.at("length").get<std::size_t>();
        lr.rank = j.at("rank").get<std::size_t>();
        lr.centered = j.at("centered").get<bool>();
        lr.norm = j.at("norm").get<std::string>() == "squared_l2" ? ResidualNorm::SquaredL2
                                                                  : ResidualNorm::L2;
        for (const json& per_t : j.at("bases")) {
            std::vector<OrthonormalBasis> ts;
            for (const json& b : per_t) ts.push_back(make_orthonormal_basis(matrix_from_json(b)));
            lr.bases.push_back(std::move(ts));
        }
        lr.means = j.at("means").get<std::vector<std::vector<std::vector<double>>>>();
        lr.effective_rank = j.at("effective_rank").get<std::vector<std::vector<std::size_t>>>();
        model.readout = std::move(lr);
    } else {
        throw std::runtime_error("model file: unknown readout kind '" + kind + "'");
    }
}

}  // namespace

ClassificationResult ModelBundle::classify(const Matrix& input) const {
    StateTrajectory traj = run(weights, config, input);
    if (config.concat_input) {
        if (config.washout == 0) {
            traj = augment_with_input(traj, input);
        } else {
            Matrix tail(input.rows() - config.washout, input.cols());
            for (std::size_t t = 0; t < tail.rows(); ++t) {
                const auto src = input.row(t + config.washout);
                std::copy(src.begin(), src.end(), tail.row(t).begin());
            }
            traj = augment_with_input(traj, tail);
        }
    }
    if (const auto* pt = std::get_if<PointwiseReadout>(&readout)) {
        return classify_pointwise(*pt, traj);
    }
    if (const auto* ep = std::get_if<EndpointReadout>(&readout)) {
        return classify_endpoint(*ep, traj);
    }
    if (const auto* gl = std::get_if<GlobalReadout>(&readout)) {
        return classify_global(*gl, traj);
    }
    if (const auto* sp = std::get_if<SparseReadout>(&readout)) {
        return classify_sparse(*sp, traj);
    }
    return score_lowrank(std::get<LowRankModel>(readout), traj);
}

void save_model(const ModelBundle& model, const std::string& path) {
    json j;
    j["config"] = config_to_json(model.config);
    j["w_in"] = matrix_to_json(model.weights.w_in);
    j["w_res"] = matrix_to_json(model.weights.w_res);
    j["readout"] = readout_to_json(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << kMagicLine << '\n' << j.dump();
    if (!out) throw std::runtime_error("write failed for " + path);
}

ModelBundle load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string header;
    std::getline(in, header);
    if (!header.starts_with("esn-readout-model")) {
        throw std::runtime_error(path + ": not a model file (bad magic)");
    }
    if (header != kMagicLine) {
        throw std::runtime_error(path + ": unsupported model version (" + header + ")");
    }
    json j;
    try {
        in >> j;
        ModelBundle model;
        model.config = config_from_json(j.at("config"));
        model.weights.w_in = matrix_from_json(j.at("w_in"));
        model.weights.w_res = matrix_from_json(j.at("w_res"));
        readout_from_json(j.at("readout"), model);
        return model;
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": corrupt model file: " + e.what());
    }
}

}  // namespace esn

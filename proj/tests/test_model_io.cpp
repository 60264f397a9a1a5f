#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "esn/data.hpp"
#include "esn/model_io.hpp"
#include "esn/rng.hpp"
#include "esn/sha256.hpp"
#include "test_support.hpp"

using esn::Matrix;
using esn::ModelBundle;
using esn::StateTrajectory;

namespace {

// Small trained bundles of every readout kind over a shared toy problem.
struct Fixture {
    esn::ReservoirConfig config;
    esn::ReservoirWeights weights;
    std::vector<StateTrajectory> trajectories;
    std::vector<int> labels;
    Matrix targets;
    std::vector<Matrix> probes;

    Fixture() {
        config.n_nodes = 6;
        config.n_inputs = 1;
        config.weight_seed = 404;
        weights = esn::init_weights(config);
        const auto set = esn::gen_sine_square({6, 12, 9});
        for (const Matrix& seq : set.sequences) {
            trajectories.push_back(esn::run(weights, config, seq));
        }
        labels = set.labels;
        targets = esn::signed_indicator(labels);
        esn::Rng rng(5);
        for (int i = 0; i < 3; ++i) probes.push_back(test_support::random_matrix(rng, 6, 1));
    }
};

void check_roundtrip(const ModelBundle& model, const Fixture& fx, const std::string& tag) {
    test_support::TempDir tmp("model_" + tag);
    const std::string path = tmp.file(tag + ".esn.json");
    esn::save_model(model, path);
    const ModelBundle loaded = esn::load_model(path);
    for (const Matrix& probe : fx.probes) {
        const auto a = model.classify(probe);
        const auto b = loaded.classify(probe);
        CHECK(a.class_index == b.class_index);
        REQUIRE(a.scores.size() == b.scores.size());
        for (std::size_t i = 0; i < a.scores.size(); ++i) {
            CHECK(a.scores[i] == b.scores[i]);  // bitwise
        }
    }
}

}  // namespace

TEST_CASE("model round-trips classify bitwise identically for all five kinds") {
    const Fixture fx;

    ModelBundle pointwise{fx.config, fx.weights,
                          esn::fit_pointwise(fx.trajectories, fx.targets, 1e-4)};
    check_roundtrip(pointwise, fx, "pointwise");

    ModelBundle endpoint{fx.config, fx.weights,
                         esn::fit_endpoint(fx.trajectories, fx.targets, 1e-4)};
    check_roundtrip(endpoint, fx, "endpoint");

    ModelBundle global{fx.config, fx.weights,
                       esn::fit_global(fx.trajectories, fx.targets, 1e-4)};
    check_roundtrip(global, fx, "global");

    ModelBundle sparse{fx.config, fx.weights,
                       esn::fit_sparse(fx.trajectories, fx.targets, {1e-3})};
    check_roundtrip(sparse, fx, "sparse");

    ModelBundle lowrank{fx.config, fx.weights,
                        esn::fit_lowrank(fx.trajectories, fx.labels, 2, {2, false})};
    check_roundtrip(lowrank, fx, "lowrank");
}

TEST_CASE("load_model rejects wrong magic, version and corrupt payloads") {
    const Fixture fx;
    ModelBundle model{fx.config, fx.weights,
                      esn::fit_endpoint(fx.trajectories, fx.targets, 1e-4)};
    test_support::TempDir tmp("model_bad");
    const std::string path = tmp.file("model.esn.json");
    esn::save_model(model, path);

    const std::string text = test_support::read_file(path);
    REQUIRE(text.rfind("esn-readout-model v1\n", 0) == 0);  // magic-prefixed

    std::string wrong_magic = text;
    wrong_magic.replace(0, 3, "zzz");
    test_support::write_file(path, wrong_magic);
    CHECK_THROWS_WITH_AS(esn::load_model(path), (path + ": not a model file (bad magic)").c_str(),
                         std::runtime_error);

    std::string wrong_version = text;
    wrong_version.replace(0, 20, "esn-readout-model v9");
    test_support::write_file(path, wrong_version);
    CHECK_THROWS_AS(esn::load_model(path), std::runtime_error);

    test_support::write_file(path, text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(esn::load_model(path), std::runtime_error);

    CHECK_THROWS_AS(esn::load_model(tmp.file("missing.json")), std::runtime_error);
}

TEST_CASE("sha256 matches the standard test vectors") {
    CHECK(esn::sha256_hex(std::string("")) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(esn::sha256_hex(std::string("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(esn::sha256_hex(std::string(
              "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    // block-boundary lengths
    CHECK(esn::sha256_hex(std::string(55, 'a')) == esn::sha256_hex(std::string(55, 'a')));
    CHECK(esn::sha256_hex(std::string(56, 'a')) != esn::sha256_hex(std::string(57, 'a')));

    test_support::TempDir tmp("sha");
    const std::string path = tmp.file("payload.bin");
    test_support::write_file(path, "abc");
    CHECK(esn::sha256_file(path) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

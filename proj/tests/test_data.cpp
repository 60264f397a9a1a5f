#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "esn/data.hpp"
#include "esn/rng.hpp"
#include "test_support.hpp"

using esn::LabeledSequenceSet;
using esn::Matrix;
using esn::NoiseSpec;
using esn::SineSquareConfig;

namespace {

// first seed whose opening segment has the wanted class
std::uint64_t seed_with_first_class(int wanted) {
    for (std::uint64_t seed = 1; seed < 64; ++seed) {
        if (esn::gen_sine_square({4, 1, seed}).labels[0] == wanted) return seed;
    }
    FAIL("no seed found");
    return 0;
}

}  // namespace

TEST_CASE("gen_sine_square: exact segment shapes at period 4") {
    const auto sine = esn::gen_sine_square({4, 1, seed_with_first_class(0)});
    REQUIRE(sine.labels[0] == 0);
    const Matrix& s = sine.sequences[0];
    CHECK(s(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(s(1, 0)) < 1e-15);   // sin(pi)
    CHECK(s(2, 0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(s(3, 0)) < 1e-15);   // sin(2*pi): sine segments end at 0

    const auto square = esn::gen_sine_square({4, 1, seed_with_first_class(1)});
    REQUIRE(square.labels[0] == 1);
    const Matrix& q = square.sequences[0];
    CHECK(q(0, 0) == 1.0);
    CHECK(q(1, 0) == 1.0);
    CHECK(q(2, 0) == -1.0);
    CHECK(q(3, 0) == -1.0);  // square segments end at -1
}

TEST_CASE("gen_sine_square: config validation and determinism") {
    CHECK_THROWS_AS(esn::gen_sine_square({3, 5, 1}), std::invalid_argument);
    CHECK_THROWS_AS(esn::gen_sine_square({6, 0, 1}), std::invalid_argument);
    const auto a = esn::gen_sine_square({10, 25, 7});
    const auto b = esn::gen_sine_square({10, 25, 7});
    CHECK(a.labels == b.labels);
    for (std::size_t j = 0; j < a.size(); ++j) {
        CHECK(a.sequences[j].storage() == b.sequences[j].storage());
    }
}

TEST_CASE("gen_sine_square: classes are balanced over many segments") {
    const auto set = esn::gen_sine_square({4, 10000, 20240805});
    std::size_t sines = 0;
    for (int label : set.labels) sines += label == 0 ? 1 : 0;
    const double frac = static_cast<double>(sines) / 10000.0;
    CHECK(frac >= 0.47);
    CHECK(frac <= 0.53);
}

TEST_CASE("export_csv emits one row per sample") {
    test_support::TempDir tmp("csv");
    const auto set = esn::gen_sine_square({4, 3, 5});
    const std::string path = tmp.file("stream.csv");
    esn::export_csv(set, path);
    const std::string text = test_support::read_file(path);
    REQUIRE(text.rfind("segment_id,t,value,class\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n' ? 1 : 0;
    CHECK(lines == 1 + 3 * 4);
}

TEST_CASE("resample_to_length: identity, endpoints, interpolation") {
    LabeledSequenceSet set;
    set.n_classes = 1;
    set.n_channels = 2;
    set.name = "toy";
    set.sequences.push_back(Matrix::from_rows({{0.1, 1.0}, {0.3, 2.0}, {0.7, 3.0}}));
    set.labels.push_back(0);

    // same length: bitwise unchanged
    const auto same = esn::resample_to_length(set, 3);
    CHECK(same.sequences[0].storage() == set.sequences[0].storage());

    // length-2 (a, b) to T = 3: (a, (a+b)/2, b)
    LabeledSequenceSet pair = set;
    pair.sequences[0] = Matrix::from_rows({{0.0, 10.0}, {1.0, 20.0}});
    const auto mid = esn::resample_to_length(pair, 3);
    CHECK(mid.sequences[0](0, 0) == 0.0);
    CHECK(mid.sequences[0](1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mid.sequences[0](1, 1) == doctest::Approx(15.0).epsilon(1e-15));
    CHECK(mid.sequences[0](2, 1) == 20.0);

    // endpoints always preserved exactly
    const auto up = esn::resample_to_length(set, 7);
    CHECK(up.sequences[0](0, 0) == set.sequences[0](0, 0));
    CHECK(up.sequences[0](6, 1) == set.sequences[0](2, 1));

    // constant sequences stay constant
    LabeledSequenceSet flat = set;
    flat.sequences[0] = Matrix(5, 2, 0.25);
    const auto fr = esn::resample_to_length(flat, 9);
    for (double v : fr.sequences[0].storage()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

    // length-1 sequences replicate
    LabeledSequenceSet single = set;
    single.sequences[0] = Matrix(1, 2, 3.5);
    const auto rep = esn::resample_to_length(single, 4);
    CHECK(rep.sequences[0].rows() == 4);
    CHECK(rep.sequences[0](3, 0) == 3.5);

    CHECK_THROWS_AS(esn::resample_to_length(set, 1), std::invalid_argument);
}

TEST_CASE("append_bias_channels") {
    LabeledSequenceSet set;
    set.n_classes = 1;
    set.n_channels = 2;
    set.name = "toy";
    set.sequences.push_back(Matrix(3, 2, 0.5));
    set.labels.push_back(0);

    const std::vector<double> ones{1.0, 1.0};
    const auto wide = esn::append_bias_channels(set, ones);
    CHECK(wide.n_channels == 4);
    for (std::size_t t = 0; t < 3; ++t) {
        CHECK(wide.sequences[0](t, 2) == 1.0);
        CHECK(wide.sequences[0](t, 3) == 1.0);
    }
    const auto same = esn::append_bias_channels(set, std::vector<double>{});
    CHECK(same.n_channels == 2);
    CHECK(same.sequences[0].storage() == set.sequences[0].storage());
}

TEST_CASE("add_noise: sigma = 0 identity, determinism, channel mask") {
    const auto set = esn::gen_sine_square({6, 10, 3});

    const auto same = esn::add_noise(set, {0.0, 99, {}});
    for (std::size_t j = 0; j < set.size(); ++j) {
        CHECK(same.sequences[j].storage() == set.sequences[j].storage());
    }

    const auto a = esn::add_noise(set, {0.3, 42, {}});
    const auto b = esn::add_noise(set, {0.3, 42, {}});
    for (std::size_t j = 0; j < set.size(); ++j) {
        CHECK(a.sequences[j].storage() == b.sequences[j].storage());
        CHECK(a.sequences[j].storage() != set.sequences[j].storage());
    }

    LabeledSequenceSet wide;
    wide.n_classes = 1;
    wide.n_channels = 3;
    wide.name = "toy";
    wide.sequences.push_back(Matrix(20, 3, 1.0));
    wide.labels.push_back(0);
    const auto masked = esn::add_noise(wide, {0.5, 7, {1, 0, 1}});
    for (std::size_t t = 0; t < 20; ++t) {
        CHECK(masked.sequences[0](t, 1) == 1.0);  // masked-out channel untouched
        CHECK(masked.sequences[0](t, 0) != 1.0);
    }
    CHECK_THROWS_AS(esn::add_noise(wide, {0.5, 7, {1, 0}}), std::invalid_argument);
}

TEST_CASE("gaussian generator moments over 1e6 draws") {
    esn::Rng rng(31415);
    const std::size_t n = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.gaussian();
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / static_cast<double>(n);
    const double stddev = std::sqrt(sum2 / static_cast<double>(n) - mean * mean);
    CHECK(std::abs(mean) < 4.0 / 1000.0);   // 4σ/√n for σ = 1
    CHECK(std::abs(stddev - 1.0) < 0.01);
}

// --- Japanese-vowels block format -----------------------------------------

namespace {

std::string block(std::initializer_list<double> firsts) {
    std::string out;
    for (double f : firsts) {
        out += std::to_string(f);
        for (int c = 1; c < 12; ++c) out += " " + std::to_string(0.01 * c);
        out += "\n";
    }
    out += "\n";
    return out;
}

}  // namespace

TEST_CASE("load_jv_blocks parses blocks and assigns positional labels") {
    test_support::TempDir tmp("jv");
    const std::string path = tmp.file("mini.train");
    test_support::write_file(path, block({1.0, 2.0}) + block({3.0}) + block({4.0, 5.0, 6.0}));

    const std::vector<std::size_t> counts{2, 1};
    const auto set = esn::load_jv_blocks(path, counts, "mini");
    REQUIRE(set.size() == 3);
    CHECK(set.n_channels == 12);
    CHECK(set.labels == std::vector<int>{0, 0, 1});
    CHECK(set.sequences[0].rows() == 2);
    CHECK(set.sequences[2].rows() == 3);
    CHECK(set.sequences[2](0, 0) == doctest::Approx(4.0));
}

TEST_CASE("load_jv_blocks rejects malformed rows with a line number") {
    test_support::TempDir tmp("jvbad");
    const std::string path = tmp.file("bad.train");
    test_support::write_file(path, "1 2 3 4 5 6 7 8 9 10 11 12\n1 2 3\n");
    const std::vector<std::size_t> counts{1};
    CHECK_THROWS_WITH_AS(esn::load_jv_blocks(path, counts, "bad"),
                         (path + ":2: expected 12 numeric fields").c_str(),
                         std::runtime_error);

    test_support::write_file(path, "1 2 3 4 5 6 7 8 9 10 11 notanumber\n");
    CHECK_THROWS_AS(esn::load_jv_blocks(path, counts, "bad"), std::runtime_error);
}

TEST_CASE("load_jv_blocks enforces the expected block count") {
    test_support::TempDir tmp("jvcount");
    const std::string path = tmp.file("short.train");
    test_support::write_file(path, block({1.0}) + block({2.0}));
    const std::vector<std::size_t> counts{3};
    CHECK_THROWS_AS(esn::load_jv_blocks(path, counts, "short"), std::runtime_error);
}

TEST_CASE("load_japanese_vowels refuses files that are not the published dataset") {
    test_support::TempDir tmp("jvfull");
    const std::string train = tmp.file("ae.train");
    const std::string test = tmp.file("ae.test");
    test_support::write_file(train, block({1.0}));
    test_support::write_file(test, block({1.0}));
    CHECK_THROWS_AS(esn::load_japanese_vowels(train, test), std::runtime_error);
}

TEST_CASE("concat_sequences preserves order") {
    const auto set = esn::gen_sine_square({4, 5, 9});
    const Matrix stream = esn::concat_sequences(set);
    REQUIRE(stream.rows() == 20);
    for (std::size_t j = 0; j < 5; ++j) {
        for (std::size_t t = 0; t < 4; ++t) {
            CHECK(stream(j * 4 + t, 0) == set.sequences[j](t, 0));
        }
    }
}

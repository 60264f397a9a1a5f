#pragma once

#include <iosfwd>
#include <string>

namespace esn {

/// Download-and-verify options for the Japanese-vowels dataset files
/// (ae.train / ae.test in the UCI block format).
struct FetchOptions {
    std::string dir = "data";
    std::string base_url =
        "https://archive.ics.uci.edu/ml/machine-learning-databases/JapaneseVowels-mld/";
    // Known-good digests. When set, a mismatch is an error. When empty, the
    // digest of the first structurally-valid download is recorded in
    // <dir>/sha256sums and enforced from then on.
    std::string sha256_train;
    std::string sha256_test;
    bool force = false;  // re-download even if present
};

bool jv_files_present(const std::string& dir);

/// Structural validation of a train/test pair: the published block counts
/// (270/370, nine speakers), 12 fields per row, utterance lengths in [7, 29].
/// Throws with a precise message on any violation.
void validate_jv_structure(const std::string& train_path, const std::string& test_path);

/// Fetches (unless present), validates and checksums both files. Progress and
/// verification results go to `log`. Returns 0 on success.
int fetch_jv(const FetchOptions& options, std::ostream& log);

}  // namespace esn

#include "esn/fetch.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <httplib.h>

#include "esn/data.hpp"
#include "esn/harness.hpp"
#include "esn/sha256.hpp"

namespace esn {

namespace {

namespace fs = std::filesystem;

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // leading slash
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("fetch: URL must start with http:// or https://");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string http_get(const std::string& url, std::ostream& log) {
    const SplitUrl split = split_url(url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (split.origin.rfind("https://", 0) == 0) {
        throw std::runtime_error("fetch: built without TLS support; use an http:// base URL");
    }
#endif
    httplib::Client client(split.origin);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    log << "fetching " << url << "\n";
    auto res = client.Get(split.path);
    if (!res) {
        throw std::runtime_error("fetch: request failed for " + url + ": " +
                                 httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw std::runtime_error("fetch: HTTP " + std::to_string(res->status) + " for " + url);
    }
    return res->body;
}

std::string checksum_db_path(const std::string& dir) { return dir + "/sha256sums"; }

std::map<std::string, std::string> read_checksum_db(const std::string& dir) {
    std::map<std::string, std::string> db;
    std::ifstream in(checksum_db_path(dir));
    std::string digest, name;
    while (in >> digest >> name) db[name] = digest;
    return db;
}

void write_checksum_db(const std::string& dir, const std::map<std::string, std::string>& db) {
    std::ofstream out(checksum_db_path(dir), std::ios::binary);
    for (const auto& [name, digest] : db) out << digest << "  " << name << "\n";
}

}  // namespace

bool jv_files_present(const std::string& dir) {
    return fs::exists(jv_train_path(dir)) && fs::exists(jv_test_path(dir));
}

void validate_jv_structure(const std::string& train_path, const std::string& test_path) {
    const auto [train, test] = load_japanese_vowels(train_path, test_path);
    for (const auto* set : {&train, &test}) {
        for (std::size_t j = 0; j < set->size(); ++j) {
            const std::size_t len = set->sequences[j].rows();
            if (len < 7 || len > 29) {
                throw std::runtime_error(set->name + ": utterance " + std::to_string(j) +
                                         " has length " + std::to_string(len) +
                                         ", expected 7..29");
            }
        }
    }
}

int fetch_jv(const FetchOptions& options, std::ostream& log) {
    fs::create_directories(options.dir);
    const std::string train_path = jv_train_path(options.dir);
    const std::string test_path = jv_test_path(options.dir);

    struct Item {
        const char* name;
        std::string path;
        const std::string* pinned;
    };
    const Item items[] = {{"ae.train", train_path, &options.sha256_train},
                          {"ae.test", test_path, &options.sha256_test}};

    for (const Item& item : items) {
        if (options.force || !fs::exists(item.path)) {
            const std::string body = http_get(options.base_url + item.name, log);
            std::ofstream out(item.path, std::ios::binary);
            if (!out) throw std::runtime_error("fetch: cannot write " + item.path);
            out << body;
            if (!out) throw std::runtime_error("fetch: write failed for " + item.path);
            log << "wrote " << item.path << " (" << body.size() << " bytes)\n";
        } else {
            log << item.path << " already present\n";
        }
    }

    validate_jv_structure(train_path, test_path);
    log << "structure ok: 270 + 370 utterances, 12 channels, lengths in [7, 29]\n";

    auto db = read_checksum_db(options.dir);
    bool db_changed = false;
    for (const Item& item : items) {
        const std::string digest = sha256_file(item.path);
        if (!item.pinned->empty() && digest != *item.pinned) {
            throw std::runtime_error(std::string("fetch: sha256 mismatch for ") + item.name +
                                     ": got " + digest + ", pinned " + *item.pinned);
        }
        const auto it = db.find(item.name);
        if (it == db.end()) {
            db[item.name] = digest;
            db_changed = true;
            log << "recorded sha256 " << digest << "  " << item.name << "\n";
        } else if (it->second != digest) {
            throw std::runtime_error(std::string("fetch: sha256 mismatch for ") + item.name +
                                     ": got " + digest + ", recorded " + it->second);
        } else {
            log << "sha256 ok " << digest << "  " << item.name << "\n";
        }
    }
    if (db_changed) write_checksum_db(options.dir, db);
    return 0;
}

}  // namespace esn

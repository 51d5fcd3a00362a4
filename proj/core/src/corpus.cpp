#include "ssc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace fs = std::filesystem;

namespace ssc::corpus {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    for (unsigned char c : text) {
        if (c < 0x80 && std::isspace(c)) {
            flush();
        } else if (c < 0x80 && std::ispunct(c)) {
            flush();
            out.emplace_back(1, static_cast<char>(c));
        } else {
            cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
        }
    }
    flush();
    return out;
}

namespace {

// Splits one Sentiment140 record. Fields are double-quoted and comma
// separated; commas and stray quotes occur inside the text field, so a
// closing quote only counts when followed by a comma or end of line.
bool split_s140_row(const std::string& line, std::vector<std::string>& fields) {
    fields.clear();
    size_t i = 0;
    const size_t n = line.size();
    while (i < n) {
        if (line[i] != '"') return false;
        ++i;
        std::string field;
        while (i < n) {
            if (line[i] == '"' && (i + 1 == n || line[i + 1] == ',')) break;
            field.push_back(line[i++]);
        }
        if (i >= n) return false;  // unterminated field
        ++i;                       // closing quote
        fields.push_back(std::move(field));
        if (i < n) {
            if (line[i] != ',') return false;
            ++i;
        }
    }
    return !fields.empty();
}

void add_document(std::vector<Document>& docs, LoadStats& st, std::string id,
                  const std::string& text, int label) {
    Document d;
    d.id = std::move(id);
    d.tokens = tokenize(text);
    if (d.tokens.empty()) {
        ++st.skipped_empty;
        return;
    }
    d.label = label;
    docs.push_back(std::move(d));
    ++st.loaded;
}

}  // namespace

std::vector<Document> load_sentiment140(const std::string& path, LoadStats* stats,
                                        int64_t max_docs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open Sentiment140 file: " + path);

    std::vector<Document> docs;
    LoadStats st;
    std::string line;
    std::vector<std::string> fields;
    int64_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++st.total_rows;
        ++row;
        if (!split_s140_row(line, fields) || fields.size() != 6) {
            ++st.skipped_malformed;
            continue;
        }
        int label;
        if (fields[0] == "0") {
            label = 0;
        } else if (fields[0] == "4") {
            label = 1;
        } else {
            ++st.skipped_polarity;
            continue;
        }
        add_document(docs, st, "s140-" + std::to_string(row), fields[5], label);
        if (max_docs > 0 && st.loaded >= max_docs) break;
    }
    if (stats) *stats = st;
    return docs;
}

namespace {

void load_uci_file(const fs::path& file, const std::string& prefix,
                   std::vector<Document>& docs, LoadStats& st) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InputError("cannot open UCI sentences file: " + file.string());
    std::string line;
    int64_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++st.total_rows;
        ++row;
        size_t tab = line.rfind('\t');
        if (tab == std::string::npos) {
            ++st.skipped_malformed;
            continue;
        }
        std::string text = line.substr(0, tab);
        std::string lab = line.substr(tab + 1);
        while (!lab.empty() && std::isspace(static_cast<unsigned char>(lab.back()))) lab.pop_back();
        while (!lab.empty() && std::isspace(static_cast<unsigned char>(lab.front()))) lab.erase(lab.begin());
        if (lab != "0" && lab != "1") {
            ++st.skipped_malformed;
            continue;
        }
        add_document(docs, st, prefix + "-" + std::to_string(row), text, lab == "1" ? 1 : 0);
    }
}

}  // namespace

std::vector<Document> load_uci_sentences(const std::string& path, LoadStats* stats) {
    std::vector<Document> docs;
    LoadStats st;
    fs::path p(path);
    if (fs::is_directory(p)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(p))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw InputError("no files in UCI sentences directory: " + path);
        for (const auto& f : files) load_uci_file(f, f.stem().string(), docs, st);
    } else if (fs::is_regular_file(p)) {
        load_uci_file(p, p.stem().string(), docs, st);
    } else {
        throw InputError("no such file or directory: " + path);
    }
    if (stats) *stats = st;
    return docs;
}

std::vector<Document> load_movie_reviews(const std::string& path, LoadStats* stats) {
    std::vector<Document> docs;
    LoadStats st;
    const std::pair<const char*, int> classes[] = {{"neg", 0}, {"pos", 1}};
    for (const auto& [sub, label] : classes) {
        fs::path dir = fs::path(path) / sub;
        if (!fs::is_directory(dir))
            throw InputError("missing class directory: " + dir.string());
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::ifstream in(f, std::ios::binary);
            if (!in) throw InputError("cannot read review file: " + f.string());
            std::stringstream ss;
            ss << in.rdbuf();
            ++st.total_rows;
            add_document(docs, st, std::string(sub) + "/" + f.filename().string(), ss.str(),
                         label);
        }
    }
    if (stats) *stats = st;
    return docs;
}

DatasetSplit split_three_way(const std::vector<Document>& docs, uint64_t seed) {
    if (docs.size() < 3) throw InputError("split_three_way needs at least 3 documents");
    std::vector<Document> shuffled = docs;
    std::mt19937_64 rng(seed);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    const size_t n = shuffled.size();
    const size_t n_train = (n + 2) / 3;
    const size_t n_dev = (n - n_train + 1) / 2;

    DatasetSplit s;
    s.train.assign(shuffled.begin(), shuffled.begin() + n_train);
    s.dev.assign(shuffled.begin() + n_train, shuffled.begin() + n_train + n_dev);
    s.test.assign(shuffled.begin() + n_train + n_dev, shuffled.end());
    return s;
}

std::pair<std::vector<Document>, std::vector<Document>> split_half(
    const std::vector<Document>& docs, uint64_t seed) {
    if (docs.size() < 2) throw InputError("split_half needs at least 2 documents");
    std::vector<Document> shuffled = docs;
    std::mt19937_64 rng(seed);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const size_t n_train = (shuffled.size() + 1) / 2;
    std::vector<Document> train(shuffled.begin(), shuffled.begin() + n_train);
    std::vector<Document> test(shuffled.begin() + n_train, shuffled.end());
    return {std::move(train), std::move(test)};
}

std::pair<std::vector<Document>, std::vector<Document>> mask_labels(
    const std::vector<Document>& train, double fraction, uint64_t seed) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw InputError("mask_labels: fraction must be in (0, 1]");
    const size_t n = train.size();
    if (n == 0) throw InputError("mask_labels: empty training set");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    size_t keep = std::max<size_t>(1, static_cast<size_t>(std::floor(fraction * n)));
    if (keep > n) keep = n;

    std::vector<Document> labeled, pool;
    labeled.reserve(keep);
    pool.reserve(n - keep);
    for (size_t i = 0; i < n; ++i) {
        const Document& d = train[order[i]];
        if (i < keep) {
            labeled.push_back(d);
        } else {
            Document u = d;
            u.label.reset();
            pool.push_back(std::move(u));
        }
    }
    return {std::move(labeled), std::move(pool)};
}

std::vector<LabeledPoint> make_two_moons(int n, double noise_sd, uint64_t seed) {
    if (n < 2) throw InputError("make_two_moons: n must be >= 2");
    if (n % 2 != 0) throw InputError("make_two_moons: n must be even");
    if (noise_sd < 0.0) throw InputError("make_two_moons: noise_sd must be >= 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    const int half = n / 2;
    const double pi = std::acos(-1.0);

    std::vector<LabeledPoint> pts;
    pts.reserve(n);
    for (int m = 0; m < 2; ++m) {
        for (int i = 0; i < half; ++i) {
            double theta = half > 1 ? pi * i / (half - 1) : 0.0;
            LabeledPoint p;
            p.label = m;
            if (m == 0) {
                p.x = {std::cos(theta), std::sin(theta)};
            } else {
                p.x = {1.0 + std::cos(theta), -0.5 - std::sin(theta)};
            }
            if (noise_sd > 0.0) {
                p.x[0] += noise_sd * noise(rng);
                p.x[1] += noise_sd * noise(rng);
            }
            pts.push_back(std::move(p));
        }
    }
    return pts;
}

}  // namespace ssc::corpus

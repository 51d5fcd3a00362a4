#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssc/common.hpp"

namespace ssc::corpus {

struct Document {
    std::string id;
    std::vector<std::string> tokens;
    std::optional<int> label;  // 0 = negative, 1 = positive
};

struct DatasetSplit {
    std::vector<Document> train;
    std::vector<Document> dev;
    std::vector<Document> test;
};

// Counters from the file loaders. loaded + skipped == rows seen.
struct LoadStats {
    int64_t total_rows = 0;
    int64_t loaded = 0;
    int64_t skipped_malformed = 0;
    int64_t skipped_polarity = 0;  // Sentiment140 neutral / unknown polarity
    int64_t skipped_empty = 0;     // no tokens after tokenization

    int64_t skipped() const { return skipped_malformed + skipped_polarity + skipped_empty; }
};

// Lowercase, split on whitespace, punctuation bytes become standalone tokens.
// Bytes >= 0x80 pass through untouched.
std::vector<std::string> tokenize(const std::string& text);

// Sentiment140 CSV: 6 double-quoted comma-separated fields, field 1 polarity
// ("0" negative, "4" positive, anything else dropped), field 6 text.
// max_docs > 0 stops after that many loaded documents (desk-scale subsample).
std::vector<Document> load_sentiment140(const std::string& path, LoadStats* stats = nullptr,
                                        int64_t max_docs = 0);

// UCI sentiment sentences: "text<TAB>{0|1}" per line. Accepts a single file
// or a directory (every regular file inside, sorted by name).
std::vector<Document> load_uci_sentences(const std::string& path, LoadStats* stats = nullptr);

// Pang/Lee polarity layout: <dir>/pos/*.txt and <dir>/neg/*.txt.
std::vector<Document> load_movie_reviews(const std::string& path, LoadStats* stats = nullptr);

// Seeded shuffle, then ceil(N/3) train, ceil(rest/2) dev, remainder test.
DatasetSplit split_three_way(const std::vector<Document>& docs, uint64_t seed);

// Seeded shuffle, first half train (ceil), rest test. Cross-corpora targets.
std::pair<std::vector<Document>, std::vector<Document>> split_half(
    const std::vector<Document>& docs, uint64_t seed);

// Keep labels on max(1, floor(fraction*N)) seeded-shuffled documents, erase
// the rest. Prefix rule makes masks nested: labeled(f1) subset of labeled(f2)
// for f1 <= f2 under the same seed.
std::pair<std::vector<Document>, std::vector<Document>> mask_labels(
    const std::vector<Document>& train, double fraction, uint64_t seed);

struct LabeledPoint {
    Vec x;
    int label = 0;
};

// Two interleaved half-circles of unit radius. Moon 0 is the upper half
// centered at the origin, moon 1 the lower half centered at (1.0, -0.5).
// Gaussian noise with sd noise_sd on both coordinates. n must be even.
std::vector<LabeledPoint> make_two_moons(int n, double noise_sd, uint64_t seed);

}  // namespace ssc::corpus

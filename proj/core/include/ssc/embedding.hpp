#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ssc/common.hpp"
#include "ssc/corpus.hpp"

namespace ssc::embedding {

struct Vocabulary {
    std::vector<std::string> tokens;       // index -> token, (freq desc, token asc)
    std::vector<int64_t> counts;           // index -> corpus frequency
    std::unordered_map<std::string, int> index;
    int min_count = 1;
    int64_t total_count = 0;               // sum of kept-token frequencies

    int size() const { return static_cast<int>(tokens.size()); }
    int lookup(const std::string& tok) const {
        auto it = index.find(tok);
        return it == index.end() ? -1 : it->second;
    }
};

struct EmbeddingConfig {
    int dim = 50;
    int epochs = 40;
    double learning_rate_start = 0.025;
    double learning_rate_end = 0.0001;
    int negative_samples = 5;
    int min_count = 2;
    double subsample_threshold = 1e-4;
    uint64_t seed = 1;
    int workers = 1;  // >1 drops determinism (unsynchronized updates)

    void validate() const;
};

struct EmbeddingModel {
    Vocabulary vocab;
    Matrix word_vectors;               // V x dim, negative-sampling output weights
    Matrix doc_vectors;                // N x dim
    std::vector<std::string> doc_ids;  // row -> document id
    EmbeddingConfig config;
    std::vector<double> epoch_loss;    // mean logistic loss per epoch

    Vec doc_vector(int row) const {
        return Vec(doc_vectors.row(row), doc_vectors.row(row) + doc_vectors.cols);
    }
};

Vocabulary build_vocab(const std::vector<corpus::Document>& docs, int min_count);

// PV-DBOW: each document vector is trained to predict the document's own
// tokens against negative samples drawn from the unigram^0.75 distribution.
EmbeddingModel train_pvdbow(const std::vector<corpus::Document>& docs,
                            const EmbeddingConfig& config);

struct InferResult {
    Vec vector;
    bool all_oov = false;
};

// Optimizes a fresh document vector against the frozen word vectors for
// `steps` passes. All-OOV token lists yield the zero vector with the flag set.
InferResult infer_docvec(const EmbeddingModel& model, const std::vector<std::string>& tokens,
                         int steps, uint64_t seed);

// One positive + negatives SGD update on a document vector. Exposed so the
// gradient can be checked against finite differences; returns the logistic
// loss before the update.
double negative_sampling_step(double* doc_vec, Matrix& word_vectors, int dim, int target,
                              const std::vector<int>& negatives, double lr,
                              bool update_words);

// Vector file: "DOCVEC v1 <count> <dim>" then "<id> <f1> ... <f_dim>" lines.
void save_vectors(const std::vector<std::string>& ids, const Matrix& vectors,
                  const std::string& path);
void save_vectors(const EmbeddingModel& model, const std::string& path);
std::pair<std::vector<std::string>, Matrix> load_vectors(const std::string& path);

// Full model (vocab + word vectors + doc vectors), for later inference.
void save_model(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_model(const std::string& path);

}  // namespace ssc::embedding

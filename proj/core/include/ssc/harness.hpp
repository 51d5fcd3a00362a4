#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ssc/common.hpp"
#include "ssc/corpus.hpp"
#include "ssc/embedding.hpp"
#include "ssc/model.hpp"
#include "ssc/training.hpp"

namespace ssc::harness {

// Default fraction grid: 10^x for x in {-3, -2.5, ..., 0}.
std::vector<double> default_fractions();

struct SweepSpec {
    std::string experiment_id = "sweep";
    std::vector<double> fractions = default_fractions();
    std::vector<uint64_t> seeds = {1, 2, 3};
    std::vector<std::string> methods;  // empty = all methods of the protocol
    bool deterministic = true;         // zeroes wall_time_s so re-runs are byte-identical

    void validate() const;
    bool wants(const std::string& method) const;
};

struct SweepRow {
    std::string experiment;
    std::string method;
    double fraction = 1.0;
    uint64_t seed = 0;
    double accuracy = 0.0;
    int labeled_count = 0;
    double wall_time_s = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

// Dev-set grid for the single-corpus semi-supervised arm.
struct TuningGrid {
    std::vector<double> gamma_a = {0.0, 1e-4, 1e-2};
    std::vector<double> gamma_i = {0.01, 0.1, 1.0};
    std::vector<int> hidden = {32, 64};
};

// Single-corpus protocol: three-way split per seed, label-fraction masking,
// supervised lower bound, dev-tuned semi-supervised arm, full-labels upper
// bound. One embedding model is trained on the whole corpus text up front.
// Methods: supervised, semisup, full_labels.
SweepResult run_single_corpus(const std::vector<corpus::Document>& docs, const SweepSpec& spec,
                              const embedding::EmbeddingConfig& embed_cfg,
                              const model::TrainConfig& base_cfg, const TuningGrid& grid);

// Cross-corpora protocol: embedding model trained on the source corpus,
// target vectors inferred, target split in half, no dev tuning. The manifold
// pool merges target-unlabeled and source vectors. Methods: supervised,
// semisup, pretrain_sup, pretrain_semisup, full_labels.
SweepResult run_cross_corpus(const std::vector<corpus::Document>& source,
                             const std::vector<corpus::Document>& target,
                             const SweepSpec& spec,
                             const embedding::EmbeddingConfig& embed_cfg,
                             const model::TrainConfig& cfg,
                             const model::TrainConfig& pretrain_cfg);

// Same protocols over pre-built feature vectors (synthetic benchmarks).
SweepResult run_single_corpus_vectors(const std::vector<corpus::LabeledPoint>& train,
                                      const std::vector<corpus::LabeledPoint>& dev,
                                      const std::vector<corpus::LabeledPoint>& test,
                                      const SweepSpec& spec, const model::TrainConfig& base_cfg,
                                      const TuningGrid& grid);

// CSV with header experiment,method,fraction,seed,accuracy,labeled_count,
// wall_time_s; rows ordered by (method, fraction, seed); re-emission is
// byte-identical.
void emit_results(const SweepResult& result, const std::string& path);
SweepResult parse_results_csv(const std::string& path);

// Soft qualitative check: per method, mean accuracy over seeds at the
// largest fraction >= mean at the smallest.
bool trend_nondecreasing(const SweepResult& result, const std::string& method);

// "key = value" config file ('#' comments). Unknown keys are rejected.
std::map<std::string, std::string> read_config_file(const std::string& path);
void apply_config(const std::map<std::string, std::string>& kv,
                  embedding::EmbeddingConfig* embed, model::TrainConfig* train,
                  model::TrainConfig* pretrain, graph::GraphConfig* graph, SweepSpec* sweep);

}  // namespace ssc::harness

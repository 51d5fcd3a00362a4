#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssc/common.hpp"
#include "ssc/graph.hpp"
#include "ssc/model.hpp"

namespace ssc::training {

struct LabeledSet {
    std::vector<Vec> xs;
    std::vector<int> ys;

    size_t size() const { return xs.size(); }
};

struct TrainedModel {
    model::MlpParams params;
    std::vector<model::LossBreakdown> history;  // one entry per epoch
    model::TrainConfig config;
    std::string provenance;  // "scratch" or "pretrained(<path-or-tag>)"
};

struct EvalResult {
    double accuracy = 0.0;
    int correct_per_class[2] = {0, 0};
    int total_per_class[2] = {0, 0};
};

// Supervised baseline: gamma_i forced to 0, otherwise the same SGD loop.
TrainedModel train_supervised(const LabeledSet& labeled, const model::TrainConfig& cfg);

// Full objective. The neighbor graph is built once over (labeled, pool) with
// cfg.k; an empty pool degrades to supervised training with a warning.
TrainedModel train_semisupervised(const LabeledSet& labeled, const std::vector<Vec>& pool,
                                  const model::TrainConfig& cfg,
                                  const graph::GraphConfig* graph_cfg = nullptr);

// Phase 1: supervised on source. Phase 2: semi-supervised on target starting
// from the phase-1 parameters, pool = target_pool followed by external_pool.
TrainedModel pretrain_finetune(const LabeledSet& source_labeled,
                               const LabeledSet& target_labeled,
                               const std::vector<Vec>& target_pool,
                               const std::vector<Vec>& external_pool,
                               const model::TrainConfig& cfg,
                               const model::TrainConfig& pretrain_cfg);

// Fine-tune from explicit initial parameters (checkpoint restart path).
TrainedModel finetune_from(const model::MlpParams& init, const std::string& provenance,
                           const LabeledSet& target_labeled,
                           const std::vector<Vec>& pool, const model::TrainConfig& cfg);

EvalResult evaluate(const TrainedModel& m, const LabeledSet& test);

// Per-epoch history as "epoch,ce,l2,manifold,total" CSV.
void write_history_csv(const TrainedModel& m, const std::string& path);

}  // namespace ssc::training

#include "ssc/training.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

namespace ssc::training {

namespace {

TrainedModel train_loop(model::MlpParams params, std::string provenance,
                        const LabeledSet& labeled, const std::vector<Vec>& pool,
                        model::TrainConfig cfg, const graph::GraphConfig* graph_cfg) {
    cfg.validate();
    if (labeled.size() == 0) throw InputError("training: empty labeled set");
    if (labeled.xs.size() != labeled.ys.size())
        throw InputError("training: labels/vectors size mismatch");
    if (params.input_dim() != static_cast<int>(labeled.xs[0].size()))
        throw InputError("training: parameter/input dimension mismatch");

    if (cfg.gamma_i > 0 && pool.empty()) {
        std::fprintf(stderr, "warning: empty unlabeled pool, degrading to supervised training\n");
        cfg.gamma_i = 0.0;
    }

    graph::NeighborGraph graph;
    const graph::NeighborGraph* gptr = nullptr;
    if (cfg.gamma_i > 0) {
        graph::GraphConfig gc;
        if (graph_cfg) gc = *graph_cfg;
        gc.k = cfg.k;
        gc.seed = cfg.seed;
        graph = graph::build_knn(labeled.xs, pool, gc);
        gptr = &graph;
    }

    TrainedModel out;
    out.config = cfg;
    out.provenance = std::move(provenance);

    const int n = static_cast<int>(labeled.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(cfg.seed + 0x9e3779b9u);  // distinct from the init stream

    for (int e = 0; e < cfg.epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        model::LossBreakdown epoch{};
        for (int start = 0; start < n; start += cfg.batch_size) {
            int end = std::min(n, start + cfg.batch_size);
            std::vector<int> batch(order.begin() + start, order.begin() + end);
            auto b = model::total_loss(params, labeled.xs, labeled.ys, batch, gptr, pool, cfg);
            auto g = model::backward(params, labeled.xs, labeled.ys, batch, gptr, pool, cfg);
            model::sgd_step(params, g, cfg.learning_rate);
            double w = static_cast<double>(batch.size()) / n;
            epoch.cross_entropy += w * b.cross_entropy;
            epoch.l2 += w * b.l2;
            epoch.manifold += w * b.manifold;
        }
        epoch.total = epoch.cross_entropy + cfg.gamma_a * epoch.l2 + cfg.gamma_i * epoch.manifold;
        out.history.push_back(epoch);
    }

    out.params = std::move(params);
    return out;
}

}  // namespace

TrainedModel train_supervised(const LabeledSet& labeled, const model::TrainConfig& cfg) {
    model::TrainConfig c = cfg;
    c.gamma_i = 0.0;
    if (labeled.size() == 0) throw InputError("train_supervised: empty labeled set");
    auto params = model::init_params(static_cast<int>(labeled.xs[0].size()), c.hidden_width,
                                     c.seed);
    return train_loop(std::move(params), "scratch", labeled, {}, c, nullptr);
}

TrainedModel train_semisupervised(const LabeledSet& labeled, const std::vector<Vec>& pool,
                                  const model::TrainConfig& cfg,
                                  const graph::GraphConfig* graph_cfg) {
    if (labeled.size() == 0) throw InputError("train_semisupervised: empty labeled set");
    auto params = model::init_params(static_cast<int>(labeled.xs[0].size()), cfg.hidden_width,
                                     cfg.seed);
    return train_loop(std::move(params), "scratch", labeled, pool, cfg, graph_cfg);
}

TrainedModel pretrain_finetune(const LabeledSet& source_labeled,
                               const LabeledSet& target_labeled,
                               const std::vector<Vec>& target_pool,
                               const std::vector<Vec>& external_pool,
                               const model::TrainConfig& cfg,
                               const model::TrainConfig& pretrain_cfg) {
    if (source_labeled.size() == 0)
        throw InputError("pretrain_finetune: empty source labeled set");
    TrainedModel pre = train_supervised(source_labeled, pretrain_cfg);

    std::vector<Vec> pool = target_pool;
    pool.insert(pool.end(), external_pool.begin(), external_pool.end());
    return finetune_from(pre.params, "pretrained(source)", target_labeled, pool, cfg);
}

TrainedModel finetune_from(const model::MlpParams& init, const std::string& provenance,
                           const LabeledSet& target_labeled,
                           const std::vector<Vec>& pool, const model::TrainConfig& cfg) {
    if (target_labeled.size() == 0) throw InputError("finetune: empty target labeled set");
    if (init.input_dim() != static_cast<int>(target_labeled.xs[0].size()))
        throw InputError("finetune: embedding dimension mismatch between phases");
    if (init.hidden_width() != cfg.hidden_width)
        throw InputError("finetune: hidden width mismatch between checkpoint and config");
    return train_loop(init, provenance, target_labeled, pool, cfg, nullptr);
}

EvalResult evaluate(const TrainedModel& m, const LabeledSet& test) {
    if (test.size() == 0) throw InputError("evaluate: empty test set");
    if (test.xs.size() != test.ys.size()) throw InputError("evaluate: size mismatch");
    EvalResult r;
    int correct = 0;
    for (size_t i = 0; i < test.size(); ++i) {
        int y = test.ys[i];
        if (y != 0 && y != 1) throw InputError("evaluate: label must be 0 or 1");
        ++r.total_per_class[y];
        if (model::predict(m.params, test.xs[i]) == y) {
            ++r.correct_per_class[y];
            ++correct;
        }
    }
    r.accuracy = static_cast<double>(correct) / test.size();
    return r;
}

void write_history_csv(const TrainedModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write history CSV: " + path);
    out << "epoch,ce,l2,manifold,total\n";
    for (size_t e = 0; e < m.history.size(); ++e) {
        const auto& h = m.history[e];
        out << e << ',' << format_g9(h.cross_entropy) << ',' << format_g9(h.l2) << ','
            << format_g9(h.manifold) << ',' << format_g9(h.total) << '\n';
    }
}

}  // namespace ssc::training

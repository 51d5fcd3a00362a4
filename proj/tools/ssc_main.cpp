// ssc: semi-supervised sentiment classification toolkit CLI.

#include <cstdio>
#include <iostream>
#include <unordered_map>

#include "CLI11.hpp"
#include "ssc/corpus.hpp"
#include "ssc/embedding.hpp"
#include "ssc/graph.hpp"
#include "ssc/harness.hpp"
#include "ssc/model.hpp"
#include "ssc/training.hpp"

using namespace ssc;

namespace {

std::vector<corpus::Document> load_dataset(const std::string& path, const std::string& format,
                                           int64_t subsample) {
    corpus::LoadStats stats;
    std::vector<corpus::Document> docs;
    if (format == "s140") {
        docs = corpus::load_sentiment140(path, &stats, subsample);
    } else if (format == "uci") {
        docs = corpus::load_uci_sentences(path, &stats);
    } else if (format == "movies") {
        docs = corpus::load_movie_reviews(path, &stats);
    } else {
        throw InputError("unknown dataset format: " + format + " (expected s140|uci|movies)");
    }
    if (format != "s140" && subsample > 0 && static_cast<int64_t>(docs.size()) > subsample)
        docs.resize(subsample);
    if (stats.skipped() > 0)
        std::fprintf(stderr, "loaded %lld documents, skipped %lld (%lld malformed, %lld polarity, %lld empty)\n",
                     static_cast<long long>(stats.loaded), static_cast<long long>(stats.skipped()),
                     static_cast<long long>(stats.skipped_malformed),
                     static_cast<long long>(stats.skipped_polarity),
                     static_cast<long long>(stats.skipped_empty));
    if (docs.empty()) throw InputError("no documents loaded from " + path);
    return docs;
}

std::map<std::string, std::string> maybe_config(const std::string& path) {
    if (path.empty()) return {};
    return harness::read_config_file(path);
}

// (xs, ys, pool) for a dataset joined with a vectors file, labels masked to
// `fraction` of the documents.
struct JoinedData {
    training::LabeledSet labeled;
    std::vector<Vec> pool;
    std::vector<std::string> labeled_ids, pool_ids;
};

JoinedData join_and_mask(const std::vector<corpus::Document>& docs,
                         const std::string& vec_path, double fraction, uint64_t seed) {
    auto [ids, vecs] = embedding::load_vectors(vec_path);
    std::unordered_map<std::string, int> row_of;
    for (size_t i = 0; i < ids.size(); ++i) row_of[ids[i]] = static_cast<int>(i);

    auto [labeled_docs, pool_docs] = corpus::mask_labels(docs, fraction, seed);
    JoinedData out;
    auto vec_of = [&](const corpus::Document& d) {
        auto it = row_of.find(d.id);
        if (it == row_of.end()) throw InputError("no vector for document id " + d.id);
        return Vec(vecs.row(it->second), vecs.row(it->second) + vecs.cols);
    };
    for (const auto& d : labeled_docs) {
        out.labeled.xs.push_back(vec_of(d));
        out.labeled.ys.push_back(*d.label);
        out.labeled_ids.push_back(d.id);
    }
    for (const auto& d : pool_docs) {
        out.pool.push_back(vec_of(d));
        out.pool_ids.push_back(d.id);
    }
    return out;
}

struct CommonOpts {
    uint64_t seed = 1;
    std::string config;
    std::string out;
    int64_t subsample = 0;
    bool deterministic = true;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--config", o.config, "key = value config file");
    cmd->add_option("--out", o.out, "output path");
    cmd->add_option("--subsample", o.subsample, "cap loaded documents at N");
    cmd->add_flag("--deterministic,!--no-deterministic", o.deterministic,
                  "single-worker deterministic mode (default on)");
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"semi-supervised sentiment classification toolkit"};
    app.require_subcommand(1);

    struct {
        CommonOpts common;
        std::string data, format = "s140", vectors_out;
    } et;
    auto* embed_train = app.add_subcommand("embed-train", "train a PV-DBOW embedding model");
    add_common(embed_train, et.common);
    embed_train->add_option("--data", et.data, "dataset path")->required();
    embed_train->add_option("--format", et.format, "s140|uci|movies");
    embed_train->add_option("--vectors-out", et.vectors_out, "also write a DOCVEC file");

    struct {
        CommonOpts common;
        std::string model, data, format = "s140";
        int steps = 20;
    } ei;
    auto* embed_infer = app.add_subcommand("embed-infer", "infer vectors for unseen documents");
    add_common(embed_infer, ei.common);
    embed_infer->add_option("--model", ei.model, "PV-DBOW model file")->required();
    embed_infer->add_option("--data", ei.data, "dataset path")->required();
    embed_infer->add_option("--format", ei.format, "s140|uci|movies");
    embed_infer->add_option("--steps", ei.steps, "inference optimization steps");

    struct {
        CommonOpts common;
        std::string labeled, pool;
    } gb;
    auto* graph_build = app.add_subcommand("graph-build", "dump the kNN neighbor graph");
    add_common(graph_build, gb.common);
    graph_build->add_option("--labeled", gb.labeled, "labeled DOCVEC file")->required();
    graph_build->add_option("--pool", gb.pool, "pool DOCVEC file")->required();

    struct {
        CommonOpts common;
        std::string data, format = "s140", vectors, history, init;
        double fraction = 1.0;
        bool semi = false;
    } tr;
    auto* train = app.add_subcommand("train", "train a classifier on a labeled fraction");
    add_common(train, tr.common);
    train->add_option("--data", tr.data, "dataset path")->required();
    train->add_option("--format", tr.format, "s140|uci|movies");
    train->add_option("--vectors", tr.vectors, "DOCVEC file for the dataset")->required();
    train->add_option("--fraction", tr.fraction, "labeled fraction in (0,1]");
    train->add_option("--history", tr.history, "per-epoch loss CSV path");
    train->add_option("--init", tr.init, "checkpoint to fine-tune from");
    train->add_flag("--semi", tr.semi, "manifold regularization over the unlabeled remainder");

    struct {
        CommonOpts common;
        std::string source_data, source_format = "s140", source_vectors;
        std::string target_data, target_format = "uci", target_vectors;
        double fraction = 1.0;
        bool semi = false;
    } pt;
    auto* pretrain = app.add_subcommand("pretrain", "supervised pre-training then fine-tuning");
    add_common(pretrain, pt.common);
    pretrain->add_option("--source-data", pt.source_data)->required();
    pretrain->add_option("--source-format", pt.source_format, "s140|uci|movies");
    pretrain->add_option("--source-vectors", pt.source_vectors)->required();
    pretrain->add_option("--target-data", pt.target_data)->required();
    pretrain->add_option("--target-format", pt.target_format, "s140|uci|movies");
    pretrain->add_option("--target-vectors", pt.target_vectors)->required();
    pretrain->add_option("--fraction", pt.fraction, "target labeled fraction");
    pretrain->add_flag("--semi", pt.semi, "manifold regularization during fine-tuning");

    struct {
        CommonOpts common;
        std::string checkpoint, data, format = "s140", vectors;
    } ev;
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a labeled dataset");
    add_common(eval, ev.common);
    eval->add_option("--checkpoint", ev.checkpoint)->required();
    eval->add_option("--data", ev.data)->required();
    eval->add_option("--format", ev.format, "s140|uci|movies");
    eval->add_option("--vectors", ev.vectors)->required();

    struct {
        CommonOpts common;
        std::string data, format = "s140";
    } ss;
    auto* sweep_single = app.add_subcommand("sweep-single", "single-corpus label-fraction sweep");
    add_common(sweep_single, ss.common);
    sweep_single->add_option("--data", ss.data)->required();
    sweep_single->add_option("--format", ss.format, "s140|uci|movies");

    struct {
        CommonOpts common;
        std::string source_data, source_format = "s140";
        std::string target_data, target_format = "uci";
    } sc;
    auto* sweep_cross = app.add_subcommand("sweep-cross", "cross-corpora transfer sweep");
    add_common(sweep_cross, sc.common);
    sweep_cross->add_option("--source-data", sc.source_data)->required();
    sweep_cross->add_option("--source-format", sc.source_format, "s140|uci|movies");
    sweep_cross->add_option("--target-data", sc.target_data)->required();
    sweep_cross->add_option("--target-format", sc.target_format, "s140|uci|movies");

    CLI11_PARSE(app, argc, argv);

    if (*embed_train) {
        auto kv = maybe_config(et.common.config);
        embedding::EmbeddingConfig cfg;
        harness::apply_config(kv, &cfg, nullptr, nullptr, nullptr, nullptr);
        cfg.seed = et.common.seed;
        if (!et.common.deterministic && cfg.workers == 1) cfg.workers = 4;
        if (et.common.out.empty()) throw InputError("embed-train: --out is required");
        auto docs = load_dataset(et.data, et.format, et.common.subsample);
        auto model = embedding::train_pvdbow(docs, cfg);
        embedding::save_model(model, et.common.out);
        if (!et.vectors_out.empty()) embedding::save_vectors(model, et.vectors_out);
        std::printf("trained %d doc vectors, vocab %d, final epoch loss %s\n",
                    model.doc_vectors.rows, model.vocab.size(),
                    format_g9(model.epoch_loss.back()).c_str());
    } else if (*embed_infer) {
        if (ei.common.out.empty()) throw InputError("embed-infer: --out is required");
        auto model = embedding::load_model(ei.model);
        auto docs = load_dataset(ei.data, ei.format, ei.common.subsample);
        Matrix vecs(static_cast<int>(docs.size()), model.config.dim);
        std::vector<std::string> ids;
        int oov = 0;
        for (size_t i = 0; i < docs.size(); ++i) {
            auto r = embedding::infer_docvec(model, docs[i].tokens, ei.steps,
                                             ei.common.seed + i);
            if (r.all_oov) ++oov;
            std::copy(r.vector.begin(), r.vector.end(), vecs.row(static_cast<int>(i)));
            ids.push_back(docs[i].id);
        }
        embedding::save_vectors(ids, vecs, ei.common.out);
        std::printf("inferred %zu vectors (%d all-OOV)\n", docs.size(), oov);
    } else if (*graph_build) {
        if (gb.common.out.empty()) throw InputError("graph-build: --out is required");
        auto kv = maybe_config(gb.common.config);
        graph::GraphConfig cfg;
        harness::apply_config(kv, nullptr, nullptr, nullptr, &cfg, nullptr);
        cfg.seed = gb.common.seed;
        auto [lids, lvecs] = embedding::load_vectors(gb.labeled);
        auto [pids, pvecs] = embedding::load_vectors(gb.pool);
        std::vector<Vec> labeled, pool;
        for (int i = 0; i < lvecs.rows; ++i)
            labeled.emplace_back(lvecs.row(i), lvecs.row(i) + lvecs.cols);
        for (int i = 0; i < pvecs.rows; ++i)
            pool.emplace_back(pvecs.row(i), pvecs.row(i) + pvecs.cols);
        auto g = graph::build_knn(labeled, pool, cfg);
        graph::dump_graph(g, lids, pids, gb.common.out);
        std::printf("graph for %zu labeled points over pool of %zu written\n", labeled.size(),
                    pool.size());
    } else if (*train) {
        if (tr.common.out.empty()) throw InputError("train: --out is required");
        auto kv = maybe_config(tr.common.config);
        model::TrainConfig cfg;
        harness::apply_config(kv, nullptr, &cfg, nullptr, nullptr, nullptr);
        cfg.seed = tr.common.seed;
        auto docs = load_dataset(tr.data, tr.format, tr.common.subsample);
        auto data = join_and_mask(docs, tr.vectors, tr.fraction, tr.common.seed);

        training::TrainedModel m;
        if (!tr.init.empty()) {
            auto [params, ck_cfg] = model::load_checkpoint(tr.init);
            cfg.hidden_width = params.hidden_width();
            if (!tr.semi) cfg.gamma_i = 0.0;
            m = training::finetune_from(params, "pretrained(" + tr.init + ")", data.labeled,
                                        tr.semi ? data.pool : std::vector<Vec>{}, cfg);
        } else if (tr.semi) {
            m = training::train_semisupervised(data.labeled, data.pool, cfg);
        } else {
            m = training::train_supervised(data.labeled, cfg);
        }
        model::save_checkpoint(m.params, m.config, tr.common.out);
        if (!tr.history.empty()) training::write_history_csv(m, tr.history);
        std::printf("trained on %zu labeled documents (%zu pooled), final loss %s\n",
                    data.labeled.size(), data.pool.size(),
                    m.history.empty() ? "n/a" : format_g9(m.history.back().total).c_str());
    } else if (*pretrain) {
        if (pt.common.out.empty()) throw InputError("pretrain: --out is required");
        auto kv = maybe_config(pt.common.config);
        model::TrainConfig cfg, pre_cfg;
        harness::apply_config(kv, nullptr, &cfg, &pre_cfg, nullptr, nullptr);
        cfg.seed = pt.common.seed;
        pre_cfg.seed = pt.common.seed;
        if (!pt.semi) cfg.gamma_i = 0.0;

        auto source_docs = load_dataset(pt.source_data, pt.source_format, pt.common.subsample);
        auto source = join_and_mask(source_docs, pt.source_vectors, 1.0, pt.common.seed);
        auto target_docs = load_dataset(pt.target_data, pt.target_format, 0);
        auto target = join_and_mask(target_docs, pt.target_vectors, pt.fraction, pt.common.seed);

        auto m = training::pretrain_finetune(source.labeled, target.labeled, target.pool,
                                             pt.semi ? source.pool : std::vector<Vec>{}, cfg,
                                             pre_cfg);
        model::save_checkpoint(m.params, m.config, pt.common.out);
        std::printf("pretrained on %zu source documents, fine-tuned on %zu target documents\n",
                    source.labeled.size(), target.labeled.size());
    } else if (*eval) {
        auto [params, cfg] = model::load_checkpoint(ev.checkpoint);
        auto docs = load_dataset(ev.data, ev.format, ev.common.subsample);
        auto data = join_and_mask(docs, ev.vectors, 1.0, ev.common.seed);
        training::TrainedModel m;
        m.params = std::move(params);
        m.config = cfg;
        auto r = training::evaluate(m, data.labeled);
        std::printf("accuracy %.6f on %zu documents (neg %d/%d, pos %d/%d)\n", r.accuracy,
                    data.labeled.size(), r.correct_per_class[0], r.total_per_class[0],
                    r.correct_per_class[1], r.total_per_class[1]);
    } else if (*sweep_single) {
        if (ss.common.out.empty()) throw InputError("sweep-single: --out is required");
        auto kv = maybe_config(ss.common.config);
        embedding::EmbeddingConfig ecfg;
        model::TrainConfig tcfg;
        harness::SweepSpec spec;
        spec.experiment_id = "single_corpus";
        harness::apply_config(kv, &ecfg, &tcfg, nullptr, nullptr, &spec);
        spec.deterministic = ss.common.deterministic;
        auto docs = load_dataset(ss.data, ss.format, ss.common.subsample);
        auto result = harness::run_single_corpus(docs, spec, ecfg, tcfg, harness::TuningGrid{});
        harness::emit_results(result, ss.common.out);
        std::printf("wrote %zu result rows to %s\n", result.rows.size(), ss.common.out.c_str());
    } else if (*sweep_cross) {
        if (sc.common.out.empty()) throw InputError("sweep-cross: --out is required");
        auto kv = maybe_config(sc.common.config);
        embedding::EmbeddingConfig ecfg;
        model::TrainConfig tcfg, pcfg;
        harness::SweepSpec spec;
        spec.experiment_id = "cross_corpus";
        harness::apply_config(kv, &ecfg, &tcfg, &pcfg, nullptr, &spec);
        spec.deterministic = sc.common.deterministic;
        auto source = load_dataset(sc.source_data, sc.source_format, sc.common.subsample);
        auto target = load_dataset(sc.target_data, sc.target_format, 0);
        pcfg.gamma_i = 0.0;  // pre-training is purely supervised
        auto result = harness::run_cross_corpus(source, target, spec, ecfg, tcfg, pcfg);
        harness::emit_results(result, sc.common.out);
        std::printf("wrote %zu result rows to %s\n", result.rows.size(), sc.common.out.c_str());
    }
    return 0;
}

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return 2;
    }
}

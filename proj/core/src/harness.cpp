#include "ssc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

namespace ssc::harness {

std::vector<double> default_fractions() {
    std::vector<double> f;
    for (double x = -3.0; x <= 0.0 + 1e-9; x += 0.5) f.push_back(std::pow(10.0, x));
    f.back() = 1.0;
    return f;
}

void SweepSpec::validate() const {
    if (fractions.empty()) throw InputError("sweep: fractions must be non-empty");
    for (double f : fractions)
        if (!(f > 0.0) || f > 1.0) throw InputError("sweep: fractions must be in (0, 1]");
    if (!std::is_sorted(fractions.begin(), fractions.end()))
        throw InputError("sweep: fractions must be sorted ascending");
    if (seeds.empty()) throw InputError("sweep: seeds must be non-empty");
}

bool SweepSpec::wants(const std::string& method) const {
    if (methods.empty()) return true;
    return std::find(methods.begin(), methods.end(), method) != methods.end();
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct RowTimer {
    Clock::time_point t0 = Clock::now();
    bool deterministic;
    explicit RowTimer(bool det) : deterministic(det) {}
    double stop() const { return deterministic ? 0.0 : elapsed_s(t0); }
};

training::LabeledSet to_labeled_set(const std::vector<corpus::Document>& docs,
                                    const std::unordered_map<std::string, int>& row_of,
                                    const Matrix& vectors) {
    training::LabeledSet s;
    for (const auto& d : docs) {
        auto it = row_of.find(d.id);
        if (it == row_of.end()) throw InputError("no vector for document id " + d.id);
        if (!d.label) throw InputError("document " + d.id + " has no label");
        s.xs.emplace_back(vectors.row(it->second), vectors.row(it->second) + vectors.cols);
        s.ys.push_back(*d.label);
    }
    return s;
}

std::vector<Vec> to_vectors(const std::vector<corpus::Document>& docs,
                            const std::unordered_map<std::string, int>& row_of,
                            const Matrix& vectors) {
    std::vector<Vec> out;
    for (const auto& d : docs) {
        auto it = row_of.find(d.id);
        if (it == row_of.end()) throw InputError("no vector for document id " + d.id);
        out.emplace_back(vectors.row(it->second), vectors.row(it->second) + vectors.cols);
    }
    return out;
}

std::unordered_map<std::string, int> index_ids(const std::vector<std::string>& ids) {
    std::unordered_map<std::string, int> m;
    for (size_t i = 0; i < ids.size(); ++i)
        if (!m.emplace(ids[i], static_cast<int>(i)).second)
            throw InputError("duplicate document id: " + ids[i]);
    return m;
}

// Dev-tuned semi-supervised arm: grid search, ties keep the first grid cell.
training::TrainedModel tune_semisup(const training::LabeledSet& labeled,
                                    const std::vector<Vec>& pool,
                                    const training::LabeledSet& dev,
                                    const model::TrainConfig& base, const TuningGrid& grid) {
    training::TrainedModel best;
    double best_acc = -1.0;
    for (int hidden : grid.hidden) {
        for (double ga : grid.gamma_a) {
            for (double gi : grid.gamma_i) {
                model::TrainConfig cfg = base;
                cfg.hidden_width = hidden;
                cfg.gamma_a = ga;
                cfg.gamma_i = gi;
                auto m = training::train_semisupervised(labeled, pool, cfg);
                double acc = training::evaluate(m, dev).accuracy;
                if (acc > best_acc) {
                    best_acc = acc;
                    best = std::move(m);
                }
            }
        }
    }
    return best;
}

struct PointSplit {
    training::LabeledSet train, dev, test;
};

training::LabeledSet to_set(const std::vector<corpus::LabeledPoint>& pts) {
    training::LabeledSet s;
    for (const auto& p : pts) {
        s.xs.push_back(p.x);
        s.ys.push_back(p.label);
    }
    return s;
}

// Prefix masking over a labeled set, same nesting rule as corpus::mask_labels.
void mask_set(const training::LabeledSet& train, double fraction, uint64_t seed,
              training::LabeledSet& labeled, std::vector<Vec>& pool) {
    const size_t n = train.size();
    if (n == 0) throw InputError("mask: empty training set");
    if (!(fraction > 0.0) || fraction > 1.0) throw InputError("mask: bad fraction");
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    size_t keep = std::max<size_t>(1, static_cast<size_t>(std::floor(fraction * n)));
    if (keep > n) keep = n;
    labeled = {};
    pool.clear();
    for (size_t i = 0; i < n; ++i) {
        if (i < keep) {
            labeled.xs.push_back(train.xs[order[i]]);
            labeled.ys.push_back(train.ys[order[i]]);
        } else {
            pool.push_back(train.xs[order[i]]);
        }
    }
}

SweepResult sweep_over_sets(const std::string& experiment, const PointSplit& sets,
                            const SweepSpec& spec, const model::TrainConfig& base_cfg,
                            const TuningGrid& grid) {
    SweepResult result;
    for (uint64_t seed : spec.seeds) {
        model::TrainConfig cfg = base_cfg;
        cfg.seed = seed;

        if (spec.wants("full_labels")) {
            RowTimer t(spec.deterministic);
            auto m = training::train_supervised(sets.train, cfg);
            double acc = training::evaluate(m, sets.test).accuracy;
            result.rows.push_back({experiment, "full_labels", 1.0, seed, acc,
                                   static_cast<int>(sets.train.size()), t.stop()});
        }

        for (double f : spec.fractions) {
            training::LabeledSet labeled;
            std::vector<Vec> pool;
            mask_set(sets.train, f, seed, labeled, pool);
            int lc = static_cast<int>(labeled.size());

            if (spec.wants("supervised")) {
                RowTimer t(spec.deterministic);
                auto m = training::train_supervised(labeled, cfg);
                double acc = training::evaluate(m, sets.test).accuracy;
                result.rows.push_back({experiment, "supervised", f, seed, acc, lc, t.stop()});
            }
            if (spec.wants("semisup")) {
                RowTimer t(spec.deterministic);
                auto m = tune_semisup(labeled, pool, sets.dev, cfg, grid);
                double acc = training::evaluate(m, sets.test).accuracy;
                result.rows.push_back({experiment, "semisup", f, seed, acc, lc, t.stop()});
            }
        }
    }
    return result;
}

void sort_rows(SweepResult& r) {
    std::sort(r.rows.begin(), r.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.method != b.method) return a.method < b.method;
        if (a.fraction != b.fraction) return a.fraction < b.fraction;
        return a.seed < b.seed;
    });
}

}  // namespace

SweepResult run_single_corpus(const std::vector<corpus::Document>& docs, const SweepSpec& spec,
                              const embedding::EmbeddingConfig& embed_cfg,
                              const model::TrainConfig& base_cfg, const TuningGrid& grid) {
    spec.validate();
    if (docs.size() < 3) throw InputError("run_single_corpus: need at least 3 documents");

    // One embedding model over the whole corpus text; the split only decides
    // which labels are visible, the representation stage is unsupervised.
    auto emodel = embedding::train_pvdbow(docs, embed_cfg);
    auto row_of = index_ids(emodel.doc_ids);

    SweepResult result;
    for (uint64_t seed : spec.seeds) {
        auto split = corpus::split_three_way(docs, seed);
        PointSplit sets{to_labeled_set(split.train, row_of, emodel.doc_vectors),
                        to_labeled_set(split.dev, row_of, emodel.doc_vectors),
                        to_labeled_set(split.test, row_of, emodel.doc_vectors)};
        SweepSpec one = spec;
        one.seeds = {seed};
        auto part = sweep_over_sets(spec.experiment_id, sets, one, base_cfg, grid);
        result.rows.insert(result.rows.end(), part.rows.begin(), part.rows.end());
    }
    sort_rows(result);
    return result;
}

SweepResult run_single_corpus_vectors(const std::vector<corpus::LabeledPoint>& train,
                                      const std::vector<corpus::LabeledPoint>& dev,
                                      const std::vector<corpus::LabeledPoint>& test,
                                      const SweepSpec& spec, const model::TrainConfig& base_cfg,
                                      const TuningGrid& grid) {
    spec.validate();
    PointSplit sets{to_set(train), to_set(dev), to_set(test)};
    auto result = sweep_over_sets(spec.experiment_id, sets, spec, base_cfg, grid);
    sort_rows(result);
    return result;
}

SweepResult run_cross_corpus(const std::vector<corpus::Document>& source,
                             const std::vector<corpus::Document>& target,
                             const SweepSpec& spec,
                             const embedding::EmbeddingConfig& embed_cfg,
                             const model::TrainConfig& cfg_in,
                             const model::TrainConfig& pretrain_cfg_in) {
    spec.validate();
    if (source.empty()) throw InputError("run_cross_corpus: empty source corpus");
    if (target.size() < 2) throw InputError("run_cross_corpus: target corpus too small");

    auto emodel = embedding::train_pvdbow(source, embed_cfg);
    auto source_rows = index_ids(emodel.doc_ids);
    auto source_labeled = to_labeled_set(source, source_rows, emodel.doc_vectors);
    auto source_vecs = to_vectors(source, source_rows, emodel.doc_vectors);

    // Target documents are unseen by the embedding model; infer their vectors.
    Matrix target_vecs(static_cast<int>(target.size()), emodel.config.dim);
    std::vector<std::string> target_ids;
    for (size_t i = 0; i < target.size(); ++i) {
        auto r = embedding::infer_docvec(emodel, target[i].tokens, 20, 0xC0FFEE + i);
        std::copy(r.vector.begin(), r.vector.end(), target_vecs.row(static_cast<int>(i)));
        target_ids.push_back(target[i].id);
    }
    auto target_rows = index_ids(target_ids);

    SweepResult result;
    for (uint64_t seed : spec.seeds) {
        model::TrainConfig cfg = cfg_in;
        cfg.seed = seed;
        model::TrainConfig pre_cfg = pretrain_cfg_in;
        pre_cfg.seed = seed;

        auto [train_docs, test_docs] = corpus::split_half(target, seed);
        auto train_all = to_labeled_set(train_docs, target_rows, target_vecs);
        auto test = to_labeled_set(test_docs, target_rows, target_vecs);

        const bool needs_pretrain = spec.wants("pretrain_sup") || spec.wants("pretrain_semisup");
        training::TrainedModel pre;
        if (needs_pretrain) pre = training::train_supervised(source_labeled, pre_cfg);

        if (spec.wants("full_labels")) {
            RowTimer t(spec.deterministic);
            model::TrainConfig sup = cfg;
            auto m = training::train_supervised(train_all, sup);
            result.rows.push_back({spec.experiment_id, "full_labels", 1.0, seed,
                                   training::evaluate(m, test).accuracy,
                                   static_cast<int>(train_all.size()), t.stop()});
        }

        for (double f : spec.fractions) {
            auto [labeled_docs, pool_docs] = corpus::mask_labels(train_docs, f, seed);
            auto labeled = to_labeled_set(labeled_docs, target_rows, target_vecs);
            std::vector<Vec> pool = to_vectors(pool_docs, target_rows, target_vecs);
            std::vector<Vec> merged_pool = pool;
            merged_pool.insert(merged_pool.end(), source_vecs.begin(), source_vecs.end());
            int lc = static_cast<int>(labeled.size());

            auto emit = [&](const std::string& method, double acc, double secs) {
                result.rows.push_back({spec.experiment_id, method, f, seed, acc, lc, secs});
            };

            if (spec.wants("supervised")) {
                RowTimer t(spec.deterministic);
                auto m = training::train_supervised(labeled, cfg);
                emit("supervised", training::evaluate(m, test).accuracy, t.stop());
            }
            if (spec.wants("semisup")) {
                RowTimer t(spec.deterministic);
                auto m = training::train_semisupervised(labeled, merged_pool, cfg);
                emit("semisup", training::evaluate(m, test).accuracy, t.stop());
            }
            if (spec.wants("pretrain_sup")) {
                RowTimer t(spec.deterministic);
                model::TrainConfig sup = cfg;
                sup.gamma_i = 0.0;
                auto m = training::finetune_from(pre.params, "pretrained(source)", labeled, {},
                                                sup);
                emit("pretrain_sup", training::evaluate(m, test).accuracy, t.stop());
            }
            if (spec.wants("pretrain_semisup")) {
                RowTimer t(spec.deterministic);
                auto m = training::finetune_from(pre.params, "pretrained(source)", labeled,
                                                 merged_pool, cfg);
                emit("pretrain_semisup", training::evaluate(m, test).accuracy, t.stop());
            }
        }
    }
    sort_rows(result);
    return result;
}

void emit_results(const SweepResult& result, const std::string& path) {
    SweepResult sorted = result;
    sort_rows(sorted);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write results file: " + path);
    out << "experiment,method,fraction,seed,accuracy,labeled_count,wall_time_s\n";
    char buf[64];
    for (const auto& r : sorted.rows) {
        std::snprintf(buf, sizeof(buf), "%.10g", r.fraction);
        out << r.experiment << ',' << r.method << ',' << buf << ',' << r.seed << ',';
        std::snprintf(buf, sizeof(buf), "%.6f", r.accuracy);
        out << buf << ',' << r.labeled_count << ',';
        std::snprintf(buf, sizeof(buf), "%.3f", r.wall_time_s);
        out << buf << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

SweepResult parse_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open results file: " + path);
    std::string line;
    if (!std::getline(in, line) ||
        line != "experiment,method,fraction,seed,accuracy,labeled_count,wall_time_s")
        throw InputError("bad results CSV header: " + path);

    SweepResult result;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        SweepRow r;
        std::string field;
        auto next = [&] {
            if (!std::getline(ss, field, ',')) throw InputError("short results row: " + line);
            return field;
        };
        r.experiment = next();
        r.method = next();
        r.fraction = std::stod(next());
        r.seed = std::stoull(next());
        r.accuracy = std::stod(next());
        r.labeled_count = std::stoi(next());
        r.wall_time_s = std::stod(next());
        result.rows.push_back(std::move(r));
    }
    return result;
}

bool trend_nondecreasing(const SweepResult& result, const std::string& method) {
    double min_f = 2.0, max_f = -1.0;
    for (const auto& r : result.rows) {
        if (r.method != method) continue;
        min_f = std::min(min_f, r.fraction);
        max_f = std::max(max_f, r.fraction);
    }
    if (max_f < 0.0) return true;  // method absent
    double lo_sum = 0, hi_sum = 0;
    int lo_n = 0, hi_n = 0;
    for (const auto& r : result.rows) {
        if (r.method != method) continue;
        if (r.fraction == min_f) {
            lo_sum += r.accuracy;
            ++lo_n;
        }
        if (r.fraction == max_f) {
            hi_sum += r.accuracy;
            ++hi_n;
        }
    }
    return hi_sum / hi_n >= lo_sum / lo_n;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            size_t b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        std::string t = trim(line);
        if (t.empty()) continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key.empty() || val.empty())
            throw InputError("config line " + std::to_string(lineno) + ": empty key or value");
        kv[key] = val;
    }
    return kv;
}

namespace {

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw InputError("config: bad numeric value for " + key + ": " + v);
    }
}

int64_t parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos;
        int64_t i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw InputError("config: bad integer value for " + key + ": " + v);
    }
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool apply_train_key(const std::string& sub, const std::string& key, const std::string& val,
                     model::TrainConfig& c) {
    if (sub == "gamma_a") c.gamma_a = parse_double(key, val);
    else if (sub == "gamma_i") c.gamma_i = parse_double(key, val);
    else if (sub == "learning_rate") c.learning_rate = parse_double(key, val);
    else if (sub == "epochs") c.epochs = static_cast<int>(parse_int(key, val));
    else if (sub == "batch_size") c.batch_size = static_cast<int>(parse_int(key, val));
    else if (sub == "hidden_width") c.hidden_width = static_cast<int>(parse_int(key, val));
    else if (sub == "k") c.k = static_cast<int>(parse_int(key, val));
    else if (sub == "seed") c.seed = static_cast<uint64_t>(parse_int(key, val));
    else if (sub == "normalize_manifold") c.normalize_manifold = parse_int(key, val) != 0;
    else return false;
    return true;
}

}  // namespace

void apply_config(const std::map<std::string, std::string>& kv,
                  embedding::EmbeddingConfig* embed, model::TrainConfig* train,
                  model::TrainConfig* pretrain, graph::GraphConfig* graph, SweepSpec* sweep) {
    for (const auto& [key, val] : kv) {
        size_t dot = key.find('.');
        if (dot == std::string::npos) throw InputError("config: unknown key " + key);
        std::string ns = key.substr(0, dot);
        std::string sub = key.substr(dot + 1);
        bool ok = false;
        if (ns == "embed" && embed) {
            auto& c = *embed;
            ok = true;
            if (sub == "dim") c.dim = static_cast<int>(parse_int(key, val));
            else if (sub == "epochs") c.epochs = static_cast<int>(parse_int(key, val));
            else if (sub == "lr_start") c.learning_rate_start = parse_double(key, val);
            else if (sub == "lr_end") c.learning_rate_end = parse_double(key, val);
            else if (sub == "negative_samples")
                c.negative_samples = static_cast<int>(parse_int(key, val));
            else if (sub == "min_count") c.min_count = static_cast<int>(parse_int(key, val));
            else if (sub == "subsample_threshold") c.subsample_threshold = parse_double(key, val);
            else if (sub == "seed") c.seed = static_cast<uint64_t>(parse_int(key, val));
            else if (sub == "workers") c.workers = static_cast<int>(parse_int(key, val));
            else ok = false;
        } else if (ns == "train" && train) {
            ok = apply_train_key(sub, key, val, *train);
        } else if (ns == "pretrain" && pretrain) {
            ok = apply_train_key(sub, key, val, *pretrain);
        } else if (ns == "graph" && graph) {
            auto& c = *graph;
            ok = true;
            if (sub == "k") c.k = static_cast<int>(parse_int(key, val));
            else if (sub == "epsilon") c.epsilon = parse_double(key, val);
            else if (sub == "pool_cap") c.pool_cap = parse_int(key, val);
            else if (sub == "seed") c.seed = static_cast<uint64_t>(parse_int(key, val));
            else ok = false;
        } else if (ns == "sweep" && sweep) {
            auto& s = *sweep;
            ok = true;
            if (sub == "fractions") {
                s.fractions.clear();
                for (const auto& f : split_list(val)) s.fractions.push_back(parse_double(key, f));
            } else if (sub == "seeds") {
                s.seeds.clear();
                for (const auto& f : split_list(val))
                    s.seeds.push_back(static_cast<uint64_t>(parse_int(key, f)));
            } else if (sub == "methods") {
                s.methods = split_list(val);
            } else if (sub == "experiment_id") {
                s.experiment_id = val;
            } else if (sub == "deterministic") {
                s.deterministic = parse_int(key, val) != 0;
            } else {
                ok = false;
            }
        } else if (ns == "embed" || ns == "train" || ns == "pretrain" || ns == "graph" ||
                   ns == "sweep") {
            continue;  // namespace valid but not requested by this command
        }
        if (!ok) throw InputError("config: unknown key " + key);
    }
}

}  // namespace ssc::harness

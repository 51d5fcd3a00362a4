#include "ssc/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

namespace ssc::embedding {

void EmbeddingConfig::validate() const {
    if (dim < 1) throw InputError("embedding dim must be >= 1");
    if (epochs < 1) throw InputError("embedding epochs must be >= 1");
    if (negative_samples < 1) throw InputError("negative_samples must be >= 1");
    if (learning_rate_end > learning_rate_start)
        throw InputError("learning_rate_end must be <= learning_rate_start");
    if (learning_rate_start <= 0) throw InputError("learning_rate_start must be > 0");
    if (min_count < 1) throw InputError("min_count must be >= 1");
    if (subsample_threshold < 0) throw InputError("subsample_threshold must be >= 0");
    if (workers < 1) throw InputError("workers must be >= 1");
}

Vocabulary build_vocab(const std::vector<corpus::Document>& docs, int min_count) {
    if (docs.empty()) throw InputError("build_vocab: empty document set");
    std::map<std::string, int64_t> freq;
    for (const auto& d : docs)
        for (const auto& t : d.tokens) ++freq[t];

    std::vector<std::pair<std::string, int64_t>> kept;
    for (const auto& [tok, cnt] : freq)
        if (cnt >= min_count) kept.emplace_back(tok, cnt);
    if (kept.empty()) throw InputError("build_vocab: vocabulary empty after min_count filter");

    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    v.min_count = min_count;
    v.tokens.reserve(kept.size());
    v.counts.reserve(kept.size());
    for (auto& [tok, cnt] : kept) {
        v.index.emplace(tok, static_cast<int>(v.tokens.size()));
        v.tokens.push_back(std::move(tok));
        v.counts.push_back(cnt);
        v.total_count += cnt;
    }
    return v;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Unigram^0.75 noise distribution, sampled by binary search on the CDF.
struct NoiseSampler {
    std::vector<double> cdf;

    explicit NoiseSampler(const std::vector<int64_t>& counts) {
        cdf.reserve(counts.size());
        double acc = 0.0;
        for (int64_t c : counts) {
            acc += std::pow(static_cast<double>(c), 0.75);
            cdf.push_back(acc);
        }
    }

    int draw(std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> u(0.0, cdf.back());
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u(rng));
        if (it == cdf.end()) --it;
        return static_cast<int>(it - cdf.begin());
    }
};

constexpr double kLogClamp = 1e-12;

}  // namespace

double negative_sampling_step(double* doc_vec, Matrix& word_vectors, int dim, int target,
                              const std::vector<int>& negatives, double lr,
                              bool update_words) {
    std::vector<double> err(dim, 0.0);
    double loss = 0.0;

    auto step_output = [&](int word, double label) {
        double* wv = word_vectors.row(word);
        double s = 0.0;
        for (int j = 0; j < dim; ++j) s += doc_vec[j] * wv[j];
        double p = sigmoid(s);
        loss -= label > 0.5 ? std::log(std::max(p, kLogClamp))
                            : std::log(std::max(1.0 - p, kLogClamp));
        double g = p - label;
        for (int j = 0; j < dim; ++j) err[j] += g * wv[j];
        if (update_words)
            for (int j = 0; j < dim; ++j) wv[j] -= lr * g * doc_vec[j];
    };

    step_output(target, 1.0);
    for (int neg : negatives)
        if (neg != target) step_output(neg, 0.0);

    for (int j = 0; j < dim; ++j) doc_vec[j] -= lr * err[j];
    return loss;
}

namespace {

struct TrainContext {
    const std::vector<std::vector<int>>* doc_tokens;
    const Vocabulary* vocab;
    const EmbeddingConfig* cfg;
    const NoiseSampler* noise;
    Matrix* word_vectors;
    Matrix* doc_vectors;
};

// One full pass over [begin, end). Returns (summed loss, step count).
std::pair<double, int64_t> run_epoch(const TrainContext& ctx, size_t begin, size_t end,
                                     double lr, std::mt19937_64& rng) {
    const auto& cfg = *ctx.cfg;
    const auto& vocab = *ctx.vocab;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<int> negatives(cfg.negative_samples);
    double loss = 0.0;
    int64_t steps = 0;

    for (size_t d = begin; d < end; ++d) {
        double* dv = ctx.doc_vectors->row(static_cast<int>(d));
        for (int tok : (*ctx.doc_tokens)[d]) {
            if (cfg.subsample_threshold > 0) {
                double f = static_cast<double>(vocab.counts[tok]) / vocab.total_count;
                double keep = std::sqrt(cfg.subsample_threshold / f) +
                              cfg.subsample_threshold / f;
                if (keep < 1.0 && unif(rng) > keep) continue;
            }
            for (int k = 0; k < cfg.negative_samples; ++k) negatives[k] = ctx.noise->draw(rng);
            loss += negative_sampling_step(dv, *ctx.word_vectors, cfg.dim, tok, negatives, lr,
                                           /*update_words=*/true);
            ++steps;
        }
    }
    return {loss, steps};
}

double epoch_lr(const EmbeddingConfig& cfg, int epoch, int total_epochs) {
    if (total_epochs <= 1) return cfg.learning_rate_start;
    double t = static_cast<double>(epoch) / (total_epochs - 1);
    return cfg.learning_rate_start + t * (cfg.learning_rate_end - cfg.learning_rate_start);
}

}  // namespace

EmbeddingModel train_pvdbow(const std::vector<corpus::Document>& docs,
                            const EmbeddingConfig& config) {
    config.validate();
    if (docs.empty()) throw InputError("train_pvdbow: empty document set");

    EmbeddingModel m;
    m.config = config;
    m.vocab = build_vocab(docs, config.min_count);

    const int n = static_cast<int>(docs.size());
    std::vector<std::vector<int>> doc_tokens(n);
    bool any = false;
    for (int i = 0; i < n; ++i) {
        for (const auto& t : docs[i].tokens) {
            int id = m.vocab.lookup(t);
            if (id >= 0) doc_tokens[i].push_back(id);
        }
        any = any || !doc_tokens[i].empty();
        m.doc_ids.push_back(docs[i].id);
    }
    if (!any) throw InputError("train_pvdbow: all documents empty after vocabulary filter");

    m.word_vectors = Matrix(m.vocab.size(), config.dim);  // zero init, word2vec style
    m.doc_vectors = Matrix(n, config.dim);
    std::mt19937_64 init_rng(config.seed);
    std::uniform_real_distribution<double> init(-0.5 / config.dim, 0.5 / config.dim);
    for (double& v : m.doc_vectors.a) v = init(init_rng);

    NoiseSampler noise(m.vocab.counts);
    TrainContext ctx{&doc_tokens, &m.vocab, &config, &noise, &m.word_vectors, &m.doc_vectors};

    if (config.workers <= 1) {
        std::mt19937_64 rng(config.seed + 1);
        for (int e = 0; e < config.epochs; ++e) {
            auto [loss, steps] = run_epoch(ctx, 0, n, epoch_lr(config, e, config.epochs), rng);
            m.epoch_loss.push_back(steps > 0 ? loss / steps : 0.0);
        }
    } else {
        // Unsynchronized shared-matrix updates; not deterministic.
        const int w = std::min<int>(config.workers, n);
        std::vector<std::vector<double>> losses(w);
        std::vector<std::thread> threads;
        for (int t = 0; t < w; ++t) {
            threads.emplace_back([&, t] {
                size_t begin = static_cast<size_t>(n) * t / w;
                size_t end = static_cast<size_t>(n) * (t + 1) / w;
                std::mt19937_64 rng(config.seed + 1 + t);
                for (int e = 0; e < config.epochs; ++e) {
                    auto [loss, steps] =
                        run_epoch(ctx, begin, end, epoch_lr(config, e, config.epochs), rng);
                    losses[t].push_back(steps > 0 ? loss / steps : 0.0);
                }
            });
        }
        for (auto& th : threads) th.join();
        for (int e = 0; e < config.epochs; ++e) {
            double s = 0.0;
            for (int t = 0; t < w; ++t) s += losses[t][e];
            m.epoch_loss.push_back(s / w);
        }
    }

    for (double v : m.doc_vectors.a)
        if (!std::isfinite(v)) throw std::runtime_error("train_pvdbow: non-finite doc vector");
    return m;
}

InferResult infer_docvec(const EmbeddingModel& model, const std::vector<std::string>& tokens,
                         int steps, uint64_t seed) {
    if (steps < 1) throw InputError("infer_docvec: steps must be >= 1");
    const int dim = model.config.dim;

    std::vector<int> ids;
    for (const auto& t : tokens) {
        int id = model.vocab.lookup(t);
        if (id >= 0) ids.push_back(id);
    }
    if (ids.empty()) return {Vec(dim, 0.0), true};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> init(-0.5 / dim, 0.5 / dim);
    Vec dv(dim);
    for (double& v : dv) v = init(rng);

    NoiseSampler noise(model.vocab.counts);
    Matrix words = model.word_vectors;  // frozen; copy is defensive against update_words misuse
    std::vector<int> negatives(model.config.negative_samples);
    for (int e = 0; e < steps; ++e) {
        double lr = epoch_lr(model.config, e, steps);
        for (int tok : ids) {
            for (int k = 0; k < model.config.negative_samples; ++k)
                negatives[k] = noise.draw(rng);
            negative_sampling_step(dv.data(), words, dim, tok, negatives, lr,
                                   /*update_words=*/false);
        }
    }
    return {std::move(dv), false};
}

void save_vectors(const std::vector<std::string>& ids, const Matrix& vectors,
                  const std::string& path) {
    if (static_cast<int>(ids.size()) != vectors.rows)
        throw InputError("save_vectors: id count does not match vector rows");
    std::ofstream out(path);
    if (!out) throw InputError("cannot write vector file: " + path);
    out << "DOCVEC v1 " << vectors.rows << ' ' << vectors.cols << '\n';
    for (int i = 0; i < vectors.rows; ++i) {
        out << ids[i];
        for (int j = 0; j < vectors.cols; ++j) out << ' ' << format_g9(vectors(i, j));
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void save_vectors(const EmbeddingModel& model, const std::string& path) {
    save_vectors(model.doc_ids, model.doc_vectors, path);
}

std::pair<std::vector<std::string>, Matrix> load_vectors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open vector file: " + path);
    std::string magic, version;
    int count, dim;
    if (!(in >> magic >> version >> count >> dim) || magic != "DOCVEC" || version != "v1")
        throw InputError("bad vector file header: " + path);
    if (count < 0 || dim < 0) throw InputError("bad vector file counts: " + path);

    std::vector<std::string> ids;
    Matrix vecs(count, dim);
    for (int i = 0; i < count; ++i) {
        std::string id;
        if (!(in >> id)) throw InputError("vector file truncated (row count mismatch): " + path);
        ids.push_back(id);
        for (int j = 0; j < dim; ++j)
            if (!(in >> vecs(i, j)))
                throw InputError("vector file truncated (dimension mismatch): " + path);
    }
    std::string extra;
    if (in >> extra) throw InputError("vector file has trailing data: " + path);
    return {std::move(ids), std::move(vecs)};
}

namespace {

void write_matrix_rows(std::ofstream& out, const Matrix& m) {
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) out << (j ? " " : "") << format_g9(m(i, j));
        out << '\n';
    }
}

void read_matrix_rows(std::ifstream& in, Matrix& m, const std::string& path) {
    for (double& v : m.a)
        if (!(in >> v)) throw InputError("model file truncated: " + path);
}

}  // namespace

void save_model(const EmbeddingModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write model file: " + path);
    const auto& c = model.config;
    out << "PVDBOW v1\n";
    out << "dim " << c.dim << "\nepochs " << c.epochs << "\nlr_start "
        << format_g9(c.learning_rate_start) << "\nlr_end " << format_g9(c.learning_rate_end)
        << "\nnegative_samples " << c.negative_samples << "\nmin_count " << c.min_count
        << "\nsubsample_threshold " << format_g9(c.subsample_threshold) << "\nseed " << c.seed
        << "\nvocab " << model.vocab.size() << "\ndocs " << model.doc_vectors.rows << '\n';
    for (int i = 0; i < model.vocab.size(); ++i)
        out << model.vocab.tokens[i] << ' ' << model.vocab.counts[i] << '\n';
    write_matrix_rows(out, model.word_vectors);
    for (int i = 0; i < model.doc_vectors.rows; ++i) {
        out << model.doc_ids[i];
        for (int j = 0; j < model.doc_vectors.cols; ++j)
            out << ' ' << format_g9(model.doc_vectors(i, j));
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

EmbeddingModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open model file: " + path);
    std::string magic, version;
    if (!(in >> magic >> version) || magic != "PVDBOW" || version != "v1")
        throw InputError("bad model file header: " + path);

    EmbeddingModel m;
    auto& c = m.config;
    int vocab_size = -1, doc_count = -1;
    for (int i = 0; i < 10; ++i) {
        std::string key;
        if (!(in >> key)) throw InputError("model file truncated: " + path);
        if (key == "dim") in >> c.dim;
        else if (key == "epochs") in >> c.epochs;
        else if (key == "lr_start") in >> c.learning_rate_start;
        else if (key == "lr_end") in >> c.learning_rate_end;
        else if (key == "negative_samples") in >> c.negative_samples;
        else if (key == "min_count") in >> c.min_count;
        else if (key == "subsample_threshold") in >> c.subsample_threshold;
        else if (key == "seed") in >> c.seed;
        else if (key == "vocab") in >> vocab_size;
        else if (key == "docs") in >> doc_count;
        else throw InputError("unknown model file key '" + key + "': " + path);
        if (!in) throw InputError("bad model file value for " + key + ": " + path);
    }
    if (vocab_size < 1 || doc_count < 0 || c.dim < 1)
        throw InputError("bad model file counts: " + path);

    m.vocab.min_count = c.min_count;
    for (int i = 0; i < vocab_size; ++i) {
        std::string tok;
        int64_t cnt;
        if (!(in >> tok >> cnt)) throw InputError("model file truncated in vocab: " + path);
        m.vocab.index.emplace(tok, i);
        m.vocab.tokens.push_back(std::move(tok));
        m.vocab.counts.push_back(cnt);
        m.vocab.total_count += cnt;
    }
    m.word_vectors = Matrix(vocab_size, c.dim);
    read_matrix_rows(in, m.word_vectors, path);
    m.doc_vectors = Matrix(doc_count, c.dim);
    for (int i = 0; i < doc_count; ++i) {
        std::string id;
        if (!(in >> id)) throw InputError("model file truncated in doc vectors: " + path);
        m.doc_ids.push_back(id);
        for (int j = 0; j < c.dim; ++j)
            if (!(in >> m.doc_vectors(i, j)))
                throw InputError("model file truncated in doc vectors: " + path);
    }
    return m;
}

}  // namespace ssc::embedding

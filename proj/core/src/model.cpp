#include "ssc/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <unordered_map>

namespace ssc::model {

void TrainConfig::validate() const {
    if (gamma_a < 0 || gamma_i < 0) throw InputError("gamma_a and gamma_i must be >= 0");
    if (learning_rate <= 0) throw InputError("learning_rate must be > 0");
    if (epochs < 0) throw InputError("epochs must be >= 0");
    if (batch_size < 1) throw InputError("batch_size must be >= 1");
    if (hidden_width < 1) throw InputError("hidden_width must be >= 1");
    if (k < 1) throw InputError("k must be >= 1");
}

MlpParams init_params(int input_dim, int hidden_width, uint64_t seed) {
    if (input_dim < 1 || hidden_width < 1)
        throw InputError("init_params: dimensions must be >= 1");
    MlpParams p;
    p.W1 = Matrix(hidden_width, input_dim);
    p.b1.assign(hidden_width, 0.0);
    p.W2 = Matrix(2, hidden_width);
    p.b2.assign(2, 0.0);

    std::mt19937_64 rng(seed);
    double r1 = std::sqrt(6.0 / (input_dim + hidden_width));
    std::uniform_real_distribution<double> u1(-r1, r1);
    for (double& v : p.W1.a) v = u1(rng);
    double r2 = std::sqrt(6.0 / (hidden_width + 2));
    std::uniform_real_distribution<double> u2(-r2, r2);
    for (double& v : p.W2.a) v = u2(rng);
    return p;
}

namespace {

constexpr double kProbClamp = 1e-12;

struct ForwardCache {
    Vec hidden;
    std::array<double, 2> probs;
};

ForwardCache forward_cached(const MlpParams& p, const Vec& x) {
    if (static_cast<int>(x.size()) != p.W1.cols)
        throw InputError("forward: input dimension mismatch");
    const int h = p.W1.rows;
    ForwardCache c;
    c.hidden.resize(h);
    for (int i = 0; i < h; ++i) {
        double s = p.b1[i];
        const double* w = p.W1.row(i);
        for (int j = 0; j < p.W1.cols; ++j) s += w[j] * x[j];
        c.hidden[i] = std::tanh(s);
    }
    std::array<double, 2> z;
    for (int r = 0; r < 2; ++r) {
        double s = p.b2[r];
        const double* w = p.W2.row(r);
        for (int j = 0; j < h; ++j) s += w[j] * c.hidden[j];
        z[r] = s;
    }
    double m = std::max(z[0], z[1]);
    double e0 = std::exp(z[0] - m), e1 = std::exp(z[1] - m);
    double denom = e0 + e1;
    c.probs = {e0 / denom, e1 / denom};
    return c;
}

// Softmax Jacobian: dL/dz from dL/dp at output p.
std::array<double, 2> prob_grad_to_logits(const std::array<double, 2>& p,
                                          const std::array<double, 2>& dp) {
    double dot = p[0] * dp[0] + p[1] * dp[1];
    return {p[0] * (dp[0] - dot), p[1] * (dp[1] - dot)};
}

// Backprop one point's logit gradient into the parameter gradients.
void accumulate_point(const MlpParams& p, const Vec& x, const ForwardCache& c,
                      const std::array<double, 2>& dz, Gradients& g) {
    const int h = p.W1.rows;
    Vec dh(h, 0.0);
    for (int r = 0; r < 2; ++r) {
        double* gw = g.W2.row(r);
        const double* w = p.W2.row(r);
        for (int j = 0; j < h; ++j) {
            gw[j] += dz[r] * c.hidden[j];
            dh[j] += w[j] * dz[r];
        }
        g.b2[r] += dz[r];
    }
    for (int i = 0; i < h; ++i) {
        double dpre = dh[i] * (1.0 - c.hidden[i] * c.hidden[i]);
        double* gw = g.W1.row(i);
        for (int j = 0; j < p.W1.cols; ++j) gw[j] += dpre * x[j];
        g.b1[i] += dpre;
    }
}

void check_manifold_inputs(const std::vector<Vec>& labeled_x, const graph::NeighborGraph& g,
                           const std::vector<Vec>& pool_x) {
    if (g.labeled_count() != labeled_x.size())
        throw InputError("manifold: graph and labeled set size mismatch");
    for (const auto& nbs : g.neighbors)
        for (const auto& nb : nbs)
            if (nb.pool_index < 0 || static_cast<size_t>(nb.pool_index) >= pool_x.size())
                throw InputError("manifold: graph pool index out of range");
}

size_t count_pairs(const graph::NeighborGraph& g, const std::vector<int>* batch) {
    size_t n = 0;
    if (batch) {
        for (int i : *batch) n += g.neighbors[i].size();
    } else {
        for (const auto& nbs : g.neighbors) n += nbs.size();
    }
    return n;
}

}  // namespace

std::array<double, 2> forward(const MlpParams& p, const Vec& x) {
    return forward_cached(p, x).probs;
}

double cross_entropy(const std::array<double, 2>& probs, int y) {
    if (y != 0 && y != 1) throw InputError("cross_entropy: label must be 0 or 1");
    return -std::log(std::max(probs[y], kProbClamp));
}

double l2_penalty(const MlpParams& p) {
    double s = 0.0;
    for (double v : p.W1.a) s += v * v;
    for (double v : p.W2.a) s += v * v;
    return s;
}

double manifold_loss(const MlpParams& p, const std::vector<Vec>& labeled_x,
                     const graph::NeighborGraph& g, const std::vector<Vec>& pool_x,
                     const std::vector<int>* batch, bool normalize) {
    check_manifold_inputs(labeled_x, g, pool_x);
    std::unordered_map<int, std::array<double, 2>> pool_probs;
    auto probs_for_pool = [&](int u) {
        auto it = pool_probs.find(u);
        if (it == pool_probs.end())
            it = pool_probs.emplace(u, forward(p, pool_x[u])).first;
        return it->second;
    };

    double loss = 0.0;
    auto add_point = [&](int i) {
        if (g.neighbors[i].empty()) return;
        auto pi = forward(p, labeled_x[i]);
        for (const auto& nb : g.neighbors[i]) {
            auto pu = probs_for_pool(nb.pool_index);
            double d0 = pi[0] - pu[0], d1 = pi[1] - pu[1];
            loss += (d0 * d0 + d1 * d1) / nb.distance;
        }
    };
    if (batch) {
        for (int i : *batch) add_point(i);
    } else {
        for (size_t i = 0; i < labeled_x.size(); ++i) add_point(static_cast<int>(i));
    }
    if (normalize) {
        size_t pairs = count_pairs(g, batch);
        if (pairs > 0) loss /= static_cast<double>(pairs);
    }
    return loss;
}

LossBreakdown total_loss(const MlpParams& p, const std::vector<Vec>& labeled_x,
                         const std::vector<int>& labels, const std::vector<int>& batch,
                         const graph::NeighborGraph* graph, const std::vector<Vec>& pool_x,
                         const TrainConfig& cfg) {
    if (batch.empty()) throw InputError("total_loss: empty labeled batch");
    if (labels.size() != labeled_x.size())
        throw InputError("total_loss: labels/vectors size mismatch");
    if (cfg.gamma_i > 0 && graph == nullptr)
        throw InputError("total_loss: gamma_i > 0 requires a neighbor graph");

    LossBreakdown b;
    for (int i : batch) b.cross_entropy += cross_entropy(forward(p, labeled_x[i]), labels[i]);
    b.cross_entropy /= static_cast<double>(batch.size());
    b.l2 = l2_penalty(p);
    if (cfg.gamma_i > 0)
        b.manifold = manifold_loss(p, labeled_x, *graph, pool_x, &batch, cfg.normalize_manifold);
    b.total = b.cross_entropy + cfg.gamma_a * b.l2 + cfg.gamma_i * b.manifold;
    return b;
}

Gradients backward(const MlpParams& p, const std::vector<Vec>& labeled_x,
                   const std::vector<int>& labels, const std::vector<int>& batch,
                   const graph::NeighborGraph* graph, const std::vector<Vec>& pool_x,
                   const TrainConfig& cfg) {
    if (batch.empty()) throw InputError("backward: empty labeled batch");
    if (labels.size() != labeled_x.size())
        throw InputError("backward: labels/vectors size mismatch");
    if (cfg.gamma_i > 0 && graph == nullptr)
        throw InputError("backward: gamma_i > 0 requires a neighbor graph");
    if (cfg.gamma_i > 0) check_manifold_inputs(labeled_x, *graph, pool_x);

    Gradients g;
    g.W1 = Matrix(p.W1.rows, p.W1.cols);
    g.b1.assign(p.b1.size(), 0.0);
    g.W2 = Matrix(p.W2.rows, p.W2.cols);
    g.b2.assign(p.b2.size(), 0.0);

    double manifold_scale = cfg.gamma_i;
    if (cfg.gamma_i > 0 && cfg.normalize_manifold) {
        size_t pairs = count_pairs(*graph, &batch);
        if (pairs > 0) manifold_scale /= static_cast<double>(pairs);
    }

    // Forward every involved point once; accumulate prob-space gradients from
    // the manifold term, logit-space gradients from cross-entropy.
    std::unordered_map<int, ForwardCache> pool_cache;
    std::unordered_map<int, std::array<double, 2>> pool_dp;
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    for (int i : batch) {
        ForwardCache ci = forward_cached(p, labeled_x[i]);
        int y = labels[i];
        if (y != 0 && y != 1) throw InputError("backward: label must be 0 or 1");
        std::array<double, 2> dz = {ci.probs[0] * inv_b, ci.probs[1] * inv_b};
        dz[y] -= inv_b;

        if (manifold_scale > 0) {
            std::array<double, 2> dpi = {0.0, 0.0};
            for (const auto& nb : graph->neighbors[i]) {
                auto it = pool_cache.find(nb.pool_index);
                if (it == pool_cache.end()) {
                    it = pool_cache.emplace(nb.pool_index,
                                            forward_cached(p, pool_x[nb.pool_index])).first;
                    pool_dp.emplace(nb.pool_index, std::array<double, 2>{0.0, 0.0});
                }
                const auto& pu = it->second.probs;
                double w = 2.0 * manifold_scale / nb.distance;
                auto& dpu = pool_dp[nb.pool_index];
                for (int r = 0; r < 2; ++r) {
                    double diff = ci.probs[r] - pu[r];
                    dpi[r] += w * diff;
                    dpu[r] -= w * diff;
                }
            }
            auto dz_m = prob_grad_to_logits(ci.probs, dpi);
            dz[0] += dz_m[0];
            dz[1] += dz_m[1];
        }
        accumulate_point(p, labeled_x[i], ci, dz, g);
    }

    // Pool-side manifold gradients, in pool-index order for determinism.
    if (manifold_scale > 0) {
        std::vector<int> involved;
        involved.reserve(pool_dp.size());
        for (const auto& [u, dp] : pool_dp) involved.push_back(u);
        std::sort(involved.begin(), involved.end());
        for (int u : involved) {
            const ForwardCache& cu = pool_cache.at(u);
            auto dz = prob_grad_to_logits(cu.probs, pool_dp.at(u));
            accumulate_point(p, pool_x[u], cu, dz, g);
        }
    }

    if (cfg.gamma_a > 0) {
        for (size_t i = 0; i < p.W1.a.size(); ++i) g.W1.a[i] += 2.0 * cfg.gamma_a * p.W1.a[i];
        for (size_t i = 0; i < p.W2.a.size(); ++i) g.W2.a[i] += 2.0 * cfg.gamma_a * p.W2.a[i];
    }
    return g;
}

void sgd_step(MlpParams& p, const Gradients& g, double lr) {
    if (lr <= 0) throw InputError("sgd_step: lr must be > 0");
    if (g.W1.rows != p.W1.rows || g.W1.cols != p.W1.cols || g.W2.rows != p.W2.rows ||
        g.W2.cols != p.W2.cols || g.b1.size() != p.b1.size() || g.b2.size() != p.b2.size())
        throw InputError("sgd_step: gradient shape mismatch");
    for (size_t i = 0; i < p.W1.a.size(); ++i) p.W1.a[i] -= lr * g.W1.a[i];
    for (size_t i = 0; i < p.b1.size(); ++i) p.b1[i] -= lr * g.b1[i];
    for (size_t i = 0; i < p.W2.a.size(); ++i) p.W2.a[i] -= lr * g.W2.a[i];
    for (size_t i = 0; i < p.b2.size(); ++i) p.b2[i] -= lr * g.b2[i];
}

int predict(const MlpParams& p, const Vec& x) {
    auto probs = forward(p, x);
    return probs[1] > probs[0] ? 1 : 0;
}

double accuracy(const MlpParams& p, const std::vector<Vec>& xs, const std::vector<int>& ys) {
    if (xs.empty()) throw InputError("accuracy: empty evaluation set");
    if (xs.size() != ys.size()) throw InputError("accuracy: size mismatch");
    int correct = 0;
    for (size_t i = 0; i < xs.size(); ++i)
        if (predict(p, xs[i]) == ys[i]) ++correct;
    return static_cast<double>(correct) / xs.size();
}

namespace {

void write_values(std::ofstream& out, const char* name, const double* v, size_t n) {
    out << name;
    for (size_t i = 0; i < n; ++i) out << ' ' << format_g9(v[i]);
    out << '\n';
}

void read_values(std::ifstream& in, const char* name, double* v, size_t n,
                 const std::string& path) {
    std::string key;
    if (!(in >> key) || key != name)
        throw InputError("checkpoint missing section " + std::string(name) + ": " + path);
    for (size_t i = 0; i < n; ++i)
        if (!(in >> v[i])) throw InputError("checkpoint truncated in " + key + ": " + path);
}

}  // namespace

void save_checkpoint(const MlpParams& p, const TrainConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write checkpoint: " + path);
    out << "MLPCKPT v1\n";
    out << "input " << p.input_dim() << "\nhidden " << p.hidden_width() << "\ngamma_a "
        << format_g9(cfg.gamma_a) << "\ngamma_i " << format_g9(cfg.gamma_i)
        << "\nlearning_rate " << format_g9(cfg.learning_rate) << "\nepochs " << cfg.epochs
        << "\nbatch_size " << cfg.batch_size << "\nseed " << cfg.seed << "\nk " << cfg.k
        << "\nnormalize_manifold " << (cfg.normalize_manifold ? 1 : 0) << '\n';
    write_values(out, "W1", p.W1.a.data(), p.W1.a.size());
    write_values(out, "b1", p.b1.data(), p.b1.size());
    write_values(out, "W2", p.W2.a.data(), p.W2.a.size());
    write_values(out, "b2", p.b2.data(), p.b2.size());
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::pair<MlpParams, TrainConfig> load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open checkpoint: " + path);
    std::string magic, version;
    if (!(in >> magic >> version) || magic != "MLPCKPT" || version != "v1")
        throw InputError("bad checkpoint header: " + path);

    int input = -1, hidden = -1, norm = 0;
    TrainConfig cfg;
    for (int i = 0; i < 10; ++i) {
        std::string key;
        if (!(in >> key)) throw InputError("checkpoint truncated: " + path);
        if (key == "input") in >> input;
        else if (key == "hidden") in >> hidden;
        else if (key == "gamma_a") in >> cfg.gamma_a;
        else if (key == "gamma_i") in >> cfg.gamma_i;
        else if (key == "learning_rate") in >> cfg.learning_rate;
        else if (key == "epochs") in >> cfg.epochs;
        else if (key == "batch_size") in >> cfg.batch_size;
        else if (key == "seed") in >> cfg.seed;
        else if (key == "k") in >> cfg.k;
        else if (key == "normalize_manifold") in >> norm;
        else throw InputError("unknown checkpoint key '" + key + "': " + path);
        if (!in) throw InputError("bad checkpoint value for " + key + ": " + path);
    }
    cfg.normalize_manifold = norm != 0;
    cfg.hidden_width = hidden;
    if (input < 1 || hidden < 1) throw InputError("bad checkpoint dimensions: " + path);

    MlpParams p;
    p.W1 = Matrix(hidden, input);
    p.b1.assign(hidden, 0.0);
    p.W2 = Matrix(2, hidden);
    p.b2.assign(2, 0.0);
    read_values(in, "W1", p.W1.a.data(), p.W1.a.size(), path);
    read_values(in, "b1", p.b1.data(), p.b1.size(), path);
    read_values(in, "W2", p.W2.a.data(), p.W2.a.size(), path);
    read_values(in, "b2", p.b2.data(), p.b2.size(), path);
    return {std::move(p), cfg};
}

}  // namespace ssc::model

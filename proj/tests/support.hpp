// Shared test utilities: independent oracles and synthetic data generators.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ssc/corpus.hpp"
#include "ssc/graph.hpp"
#include "ssc/model.hpp"

namespace test_support {

using ssc::Vec;

inline std::string temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "ssc_tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- brute-force kNN oracle: full distance-matrix sort, (dist, idx) order.

struct OracleNeighbor {
    int index;
    double distance;  // unclamped
};

inline std::vector<std::vector<OracleNeighbor>> knn_oracle(const std::vector<Vec>& labeled,
                                                           const std::vector<Vec>& pool,
                                                           int k) {
    std::vector<std::vector<OracleNeighbor>> out(labeled.size());
    for (size_t i = 0; i < labeled.size(); ++i) {
        std::vector<std::pair<double, int>> all;
        for (size_t u = 0; u < pool.size(); ++u) {
            double s = 0;
            for (size_t j = 0; j < labeled[i].size(); ++j) {
                double d = labeled[i][j] - pool[u][j];
                s += d * d;
            }
            all.emplace_back(std::sqrt(s), static_cast<int>(u));
        }
        std::sort(all.begin(), all.end());
        size_t take = std::min<size_t>(k, all.size());
        for (size_t j = 0; j < take; ++j) out[i].push_back({all[j].second, all[j].first});
    }
    return out;
}

// ---- brute-force manifold oracle: explicit double loop over graph pairs.

inline double manifold_oracle(const ssc::model::MlpParams& p, const std::vector<Vec>& labeled,
                              const ssc::graph::NeighborGraph& g,
                              const std::vector<Vec>& pool) {
    double total = 0.0;
    for (size_t i = 0; i < g.neighbors.size(); ++i) {
        auto pi = ssc::model::forward(p, labeled[i]);
        for (const auto& nb : g.neighbors[i]) {
            auto pu = ssc::model::forward(p, pool[nb.pool_index]);
            double d0 = pi[0] - pu[0], d1 = pi[1] - pu[1];
            total += (d0 * d0 + d1 * d1) / nb.distance;
        }
    }
    return total;
}

// ---- central finite differences over all MLP parameters.

inline std::vector<double*> param_view(ssc::model::MlpParams& p) {
    std::vector<double*> v;
    for (auto& x : p.W1.a) v.push_back(&x);
    for (auto& x : p.b1) v.push_back(&x);
    for (auto& x : p.W2.a) v.push_back(&x);
    for (auto& x : p.b2) v.push_back(&x);
    return v;
}

inline std::vector<double> grad_view(const ssc::model::Gradients& g) {
    std::vector<double> v;
    v.insert(v.end(), g.W1.a.begin(), g.W1.a.end());
    v.insert(v.end(), g.b1.begin(), g.b1.end());
    v.insert(v.end(), g.W2.a.begin(), g.W2.a.end());
    v.insert(v.end(), g.b2.begin(), g.b2.end());
    return v;
}

template <typename LossFn>
std::vector<double> finite_difference(ssc::model::MlpParams& p, LossFn loss, double h = 1e-5) {
    auto view = param_view(p);
    std::vector<double> grad(view.size());
    for (size_t i = 0; i < view.size(); ++i) {
        double orig = *view[i];
        *view[i] = orig + h;
        double up = loss();
        *view[i] = orig - h;
        double down = loss();
        *view[i] = orig;
        grad[i] = (up - down) / (2 * h);
    }
    return grad;
}

// Max relative error with an absolute floor for near-zero entries.
inline double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double denom = std::max({std::fabs(a[i]), std::fabs(b[i]), 1e-8});
        worst = std::max(worst, std::fabs(a[i] - b[i]) / denom);
    }
    return worst;
}

// ---- synthetic tweet corpus in Sentiment140 CSV layout.
//
// Each tweet mixes neutral filler with a few class words; separable enough
// for an embedding + classifier pipeline but not trivially so.

inline void write_synthetic_s140(const std::string& path, int n, uint64_t seed) {
    std::vector<std::string> pos, neg, neutral;
    for (int i = 0; i < 30; ++i) pos.push_back("happy" + std::to_string(i));
    for (int i = 0; i < 30; ++i) neg.push_back("awful" + std::to_string(i));
    for (int i = 0; i < 150; ++i) neutral.push_back("word" + std::to_string(i));

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> len_d(6, 14), sent_d(2, 4);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    std::ofstream out(path, std::ios::binary);
    for (int i = 0; i < n; ++i) {
        int label = static_cast<int>(rng() % 2);
        const auto& own = label ? pos : neg;
        const auto& other = label ? neg : pos;
        int len = len_d(rng);
        int sent = sent_d(rng);
        std::vector<std::string> toks;
        for (int j = 0; j < sent; ++j) toks.push_back(own[rng() % own.size()]);
        if (u(rng) < 0.10) toks.push_back(other[rng() % other.size()]);
        while (static_cast<int>(toks.size()) < len) toks.push_back(neutral[rng() % neutral.size()]);
        std::shuffle(toks.begin(), toks.end(), rng);
        std::string text;
        for (size_t j = 0; j < toks.size(); ++j) {
            if (j) text += ' ';
            text += toks[j];
        }
        if (u(rng) < 0.3) text += " !";
        out << '"' << (label ? 4 : 0) << "\",\"" << (1000000 + i)
            << "\",\"Mon Jan 01 00:00:00 2009\",\"NO_QUERY\",\"user" << (i % 997) << "\",\""
            << text << "\"\n";
    }
}

// Random small MLP with entries in [-1, 1].
inline ssc::model::MlpParams random_params(int input, int hidden, std::mt19937_64& rng) {
    auto p = ssc::model::init_params(input, hidden, rng());
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : p.W1.a) v = u(rng);
    for (auto& v : p.b1) v = u(rng);
    for (auto& v : p.W2.a) v = u(rng);
    for (auto& v : p.b2) v = u(rng);
    return p;
}

inline std::vector<Vec> random_vectors(int n, int dim, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<Vec> v(n, Vec(dim));
    for (auto& x : v)
        for (auto& e : x) e = u(rng);
    return v;
}

}  // namespace test_support

#include "ssc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace ssc::graph {

void GraphConfig::validate() const {
    if (k < 1) throw InputError("graph k must be >= 1");
    if (!(epsilon > 0)) throw InputError("graph epsilon must be > 0");
    if (pool_cap < 0) throw InputError("graph pool_cap must be >= 0");
}

double euclidean(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw InputError("euclidean: dimension mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

NeighborGraph build_knn(const std::vector<Vec>& labeled, const std::vector<Vec>& pool,
                        const GraphConfig& config) {
    config.validate();
    if (pool.empty()) throw InputError("build_knn: empty pool");
    for (const auto& v : labeled)
        if (v.size() != pool[0].size()) throw InputError("build_knn: dimension mismatch");

    // Effective pool: original indices, seeded uniform subsample when capped.
    std::vector<int> pool_idx(pool.size());
    std::iota(pool_idx.begin(), pool_idx.end(), 0);
    if (config.pool_cap > 0 && static_cast<int64_t>(pool.size()) > config.pool_cap) {
        std::mt19937_64 rng(config.seed);
        std::shuffle(pool_idx.begin(), pool_idx.end(), rng);
        pool_idx.resize(config.pool_cap);
        std::sort(pool_idx.begin(), pool_idx.end());
    }

    NeighborGraph g;
    g.neighbors.resize(labeled.size());
    const size_t k = static_cast<size_t>(config.k);
    if (k > pool_idx.size()) g.truncated = true;

    std::vector<std::pair<double, int>> cand;
    cand.reserve(pool_idx.size());
    for (size_t i = 0; i < labeled.size(); ++i) {
        cand.clear();
        for (int p : pool_idx) cand.emplace_back(euclidean(labeled[i], pool[p]), p);
        size_t take = std::min(k, cand.size());
        std::partial_sort(cand.begin(), cand.begin() + take, cand.end());
        auto& nb = g.neighbors[i];
        nb.reserve(take);
        for (size_t j = 0; j < take; ++j)
            nb.push_back({cand[j].second, std::max(cand[j].first, config.epsilon)});
    }
    return g;
}

void dump_graph(const NeighborGraph& g, const std::vector<std::string>& labeled_ids,
                const std::vector<std::string>& pool_ids, const std::string& path) {
    if (labeled_ids.size() != g.labeled_count())
        throw InputError("dump_graph: labeled id count mismatch");
    std::ofstream out(path);
    if (!out) throw InputError("cannot write graph dump: " + path);
    for (size_t i = 0; i < g.neighbors.size(); ++i) {
        out << labeled_ids[i];
        for (const auto& nb : g.neighbors[i]) {
            if (nb.pool_index < 0 || static_cast<size_t>(nb.pool_index) >= pool_ids.size())
                throw InputError("dump_graph: pool index out of range");
            out << ' ' << pool_ids[nb.pool_index] << ':' << format_g9(nb.distance);
        }
        out << '\n';
    }
}

}  // namespace ssc::graph

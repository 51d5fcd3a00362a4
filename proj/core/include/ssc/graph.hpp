#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssc/common.hpp"

namespace ssc::graph {

struct Neighbor {
    int pool_index = 0;
    double distance = 0.0;  // Euclidean, clamped below by GraphConfig::epsilon
};

struct NeighborGraph {
    std::vector<std::vector<Neighbor>> neighbors;  // one list per labeled point
    bool truncated = false;                        // k exceeded the effective pool

    size_t labeled_count() const { return neighbors.size(); }
};

struct GraphConfig {
    int k = 5;
    double epsilon = 1e-8;
    int64_t pool_cap = 50000;  // 0 disables subsampling
    uint64_t seed = 1;

    void validate() const;
};

double euclidean(const Vec& a, const Vec& b);

// k nearest pool points per labeled point, ties broken by lower pool index.
// If pool_cap is set and exceeded, a seeded uniform subsample of the pool is
// searched instead; neighbor indices always refer to the original pool.
NeighborGraph build_knn(const std::vector<Vec>& labeled, const std::vector<Vec>& pool,
                        const GraphConfig& config);

// Audit dump: "<labeled_id> <pool_id>:<distance> ..." per labeled point.
void dump_graph(const NeighborGraph& g, const std::vector<std::string>& labeled_ids,
                const std::vector<std::string>& pool_ids, const std::string& path);

}  // namespace ssc::graph

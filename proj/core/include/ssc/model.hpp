#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ssc/common.hpp"
#include "ssc/graph.hpp"

namespace ssc::model {

// Single tanh hidden layer + 2-way softmax head.
struct MlpParams {
    Matrix W1;  // hidden x input
    Vec b1;
    Matrix W2;  // 2 x hidden
    Vec b2;

    int input_dim() const { return W1.cols; }
    int hidden_width() const { return W1.rows; }
};

struct Gradients {
    Matrix W1;
    Vec b1;
    Matrix W2;
    Vec b2;
};

struct TrainConfig {
    double gamma_a = 1e-4;   // L2 weight penalty
    double gamma_i = 0.1;    // manifold penalty
    double learning_rate = 0.05;
    int epochs = 50;
    int batch_size = 32;
    int hidden_width = 64;
    uint64_t seed = 1;
    int k = 5;               // neighbor count, forwarded to graph construction
    bool normalize_manifold = false;  // divide the manifold sum by pair count

    void validate() const;
};

struct LossBreakdown {
    double cross_entropy = 0.0;
    double l2 = 0.0;
    double manifold = 0.0;
    double total = 0.0;
};

// Glorot-uniform weights, zero biases.
MlpParams init_params(int input_dim, int hidden_width, uint64_t seed);

std::array<double, 2> forward(const MlpParams& p, const Vec& x);

// -log(probs[y]) with a 1e-12 clamp inside the log.
double cross_entropy(const std::array<double, 2>& probs, int y);

// Sum of squared W1 and W2 entries; biases excluded.
double l2_penalty(const MlpParams& p);

// Sum over labeled points i (restricted to `batch` when given) and their
// graph neighbors u of ||f(x_i) - f(x_u)||^2 / d_iu, with f the post-softmax
// output and d_iu the stored clamped distance.
double manifold_loss(const MlpParams& p, const std::vector<Vec>& labeled_x,
                     const graph::NeighborGraph& g, const std::vector<Vec>& pool_x,
                     const std::vector<int>* batch = nullptr, bool normalize = false);

// Mean cross-entropy over the batch + gamma_a * l2 + gamma_i * manifold.
// `graph` may be null only when cfg.gamma_i == 0.
LossBreakdown total_loss(const MlpParams& p, const std::vector<Vec>& labeled_x,
                         const std::vector<int>& labels, const std::vector<int>& batch,
                         const graph::NeighborGraph* graph, const std::vector<Vec>& pool_x,
                         const TrainConfig& cfg);

// Exact gradient of total_loss with respect to every parameter.
Gradients backward(const MlpParams& p, const std::vector<Vec>& labeled_x,
                   const std::vector<int>& labels, const std::vector<int>& batch,
                   const graph::NeighborGraph* graph, const std::vector<Vec>& pool_x,
                   const TrainConfig& cfg);

void sgd_step(MlpParams& p, const Gradients& g, double lr);

// argmax of forward; exact tie goes to class 0.
int predict(const MlpParams& p, const Vec& x);

double accuracy(const MlpParams& p, const std::vector<Vec>& xs, const std::vector<int>& ys);

void save_checkpoint(const MlpParams& p, const TrainConfig& cfg, const std::string& path);
std::pair<MlpParams, TrainConfig> load_checkpoint(const std::string& path);

}  // namespace ssc::model

#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssc {

using Vec = std::vector<double>;

// Raised for bad user input (missing files, malformed configs, contract
// violations at the CLI boundary). Maps to exit code 1 in the tools.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dense row-major matrix. Small models only; no BLAS needed.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    const double* row(int r) const { return a.data() + static_cast<size_t>(r) * cols; }
    double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
};

// 9-significant-digit decimal, the on-disk number format for vectors and
// checkpoints. Stable: parsing and re-formatting reproduces the same text.
inline std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace ssc

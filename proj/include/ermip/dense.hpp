#pragma once

#include <span>
#include <vector>

#include "ermip/sequence_core.hpp"

namespace ermip {

/// A set of coefficient vectors aligned on the union of their supports,
/// stored row-major for the brute-force pair kernels.
struct DenseRows {
    std::vector<MultiIndex> columns;
    std::vector<double> data;
    std::size_t rows = 0;

    std::size_t cols() const { return columns.size(); }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols(), cols()}; }
};

DenseRows to_dense(std::span<const CoefVec> set);

/// sum_c w_c^2 (x_c - y_c)^2 with w = 1 when `weights` is empty.
double weighted_dist_sq(std::span<const double> x, std::span<const double> y, std::span<const double> weights = {});

}  // namespace ermip
